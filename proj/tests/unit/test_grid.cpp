#include <gtest/gtest.h>

#include <set>

#include "mwt/error.hpp"
#include "mwt/grid.hpp"
#include "mwt/index.hpp"

using namespace mwt;

namespace {

GridConfig line(int L, bool shifted = false) { return GridConfig{1, 2, L, shifted}; }

}  // namespace

TEST(Grid, Resolution) {
  EXPECT_EQ(line(3).resolution(), 8);
  EXPECT_EQ(line(2, true).resolution(), 12);
  EXPECT_EQ((GridConfig{2, 3, 2, false}).resolution(), 9);
  EXPECT_THROW((GridConfig{1, 3, 2, true}).validate(), ValidationError);
  EXPECT_NO_THROW((GridConfig{1, 5, 1, true}).validate());
  EXPECT_TRUE(GridConfig::from_resolution(1, 2, 2, 12).shifted);
  EXPECT_THROW(GridConfig::from_resolution(1, 2, 2, 10), ValidationError);
}

TEST(Grid, NuForRho) {
  EXPECT_EQ(nu_for_rho(2.0), 2);
  EXPECT_EQ(nu_for_rho(1.5), 2);
  EXPECT_EQ(nu_for_rho(2.5), 3);
  EXPECT_THROW(nu_for_rho(1.0), ValidationError);
}

TEST(Grid, AncestorExamples) {
  const GridConfig g = line(2);
  const Cube q = grid_cube(g, GridId::standard(), 2, {0});
  const Cube a = ancestor(g, q, 1);
  EXPECT_EQ(a.level, 1);
  EXPECT_EQ(a.corner, std::vector<int>{0});
  EXPECT_EQ(a.side, 2);
  EXPECT_EQ(ancestor(g, q, 0), q);
  const Cube r = ancestor(g, grid_cube(g, GridId::standard(), 2, {3}), 2);
  EXPECT_EQ(r, root_cube(g));
  EXPECT_THROW(ancestor(g, q, 3), DomainError);
}

TEST(Grid, AncestorMatchesBruteForceContainment) {
  const GridConfig g{2, 3, 2, false};
  const auto cubes = enumerate_cubes(g, GridScope::standard());
  for (const Cube& q : cubes)
    for (int j = 0; j <= q.level; ++j) {
      int found = 0;
      for (const Cube& p : cubes)
        if (p.level == q.level - j && p.contains(q)) {
          ++found;
          EXPECT_EQ(ancestor(g, q, j), p);
        }
      EXPECT_EQ(found, 1);
    }
}

TEST(Grid, EnumerationCounts) {
  EXPECT_EQ(enumerate_cubes(line(2), GridScope::standard()).size(), 7u);
  EXPECT_EQ(enumerate_cubes(GridConfig{2, 2, 1, false}, GridScope::standard()).size(), 5u);
  const auto lat = enumerate_cubes(line(2), GridScope::lattice());
  ASSERT_EQ(lat.size(), 10u);
  std::vector<int> by_side(5, 0);
  for (const Cube& q : lat) ++by_side[q.side];
  EXPECT_EQ(by_side, (std::vector<int>{0, 4, 3, 2, 1}));
  EXPECT_EQ(count_lattice_cubes(line(2)), 10);
  EXPECT_EQ(count_lattice_cubes(GridConfig{2, 2, 2, false}), 16 + 9 + 4 + 1);
}

TEST(Grid, LevelsPartitionTheDomain) {
  for (const GridConfig g : {GridConfig{1, 2, 3, false}, GridConfig{2, 2, 2, true}, GridConfig{2, 3, 2, false}}) {
    const auto cubes = enumerate_cubes(g, GridScope::standard());
    for (int k = 0; k <= g.max_level; ++k) {
      std::vector<int> hits(static_cast<std::size_t>(g.cell_count()), 0);
      for (const Cube& q : cubes) {
        if (q.level != k) continue;
        for_each_point_in(q.corner, q.side,
                          [&](std::span<const int> c) { ++hits[static_cast<std::size_t>(linear_index(c, g.resolution()))]; });
      }
      for (int h : hits) EXPECT_EQ(h, 1);
    }
  }
}

TEST(Grid, NestingTrichotomy) {
  const GridConfig g{2, 2, 2, true};
  for (unsigned alpha = 0; alpha < 4; ++alpha) {
    const auto cubes = enumerate_cubes(g, alpha == 0 ? GridScope::standard() : GridScope::shifted(alpha));
    for (const Cube& a : cubes)
      for (const Cube& b : cubes) {
        if (!a.intersects(b)) continue;
        EXPECT_TRUE(a.contains(b) || b.contains(a));
        if (a.level == b.level) EXPECT_EQ(a, b);
      }
  }
}

TEST(Grid, ChildrenTileParent) {
  const GridConfig g{2, 2, 2, true};
  for (unsigned alpha = 0; alpha < 4; ++alpha) {
    const auto cubes = enumerate_cubes(g, alpha == 0 ? GridScope::standard() : GridScope::shifted(alpha));
    for (const Cube& q : cubes) {
      if (q.level == g.max_level) continue;
      std::int64_t cells = 0;
      for (const Cube& c : children(g, q)) {
        EXPECT_TRUE(q.contains(c));
        EXPECT_EQ(c.level, q.level + 1);
        cells += c.cells();
      }
      // Truncated shifted cubes may lose children off the domain; standard ones tile.
      if (alpha == 0) EXPECT_EQ(cells, q.cells());
    }
  }
}

TEST(Grid, GridIdNames) {
  EXPECT_EQ(GridId::standard().name(2), "standard");
  EXPECT_EQ(GridId::shifted(1).name(2), "shifted:10");
  EXPECT_EQ(GridId::parse("shifted:01", 2), GridId::shifted(2));
  EXPECT_EQ(GridId::parse("lattice", 1), GridId::lattice());
  EXPECT_THROW(GridId::parse("diagonal", 1), ValidationError);
}

TEST(Grid, LatticeCubeFromUnitChecksAlignment) {
  const GridConfig g = line(2);
  const double lo[] = {0.25};
  EXPECT_EQ(lattice_cube_from_unit(g, lo, 0.5).corner, std::vector<int>{1});
  const double bad[] = {0.3};
  EXPECT_THROW(lattice_cube_from_unit(g, bad, 0.25), DomainError);
  EXPECT_THROW(lattice_cube_from_unit(g, lo, 1.0), DomainError);
}

namespace {

// All cubes of the shifted grids written out from their definition
// nu^-k ([0,1)^d + j + (-1)^k alpha), truncated to the domain.
std::vector<std::pair<std::vector<int>, int>> shifted_boxes_1d(int L) {
  const int n = 3 << L;
  std::vector<std::pair<std::vector<int>, int>> out;
  for (int k = 0; k <= L; ++k) {
    const int side = n >> k;
    for (int a = 0; a < 2; ++a) {
      const int shift = a == 0 ? 0 : (k % 2 == 0 ? side / 3 : -side / 3);
      for (int j = -2; j <= (1 << k) + 1; ++j) {
        const int lo = j * side + shift;
        if (lo >= 0 && lo + side <= n) out.push_back({{lo}, side});
      }
    }
  }
  return out;
}

}  // namespace

TEST(Grid, ShiftedCoverStraddlingMidpoint) {
  const GridConfig g = line(2, true);  // 12 cells
  const Cube q = lattice_cube(g, {5}, 2);
  int best = 1 << 30;
  for (const auto& [lo, side] : shifted_boxes_1d(2))
    if (lo[0] <= 5 && lo[0] + side >= 7) best = std::min(best, side);
  const Cube c = shifted_cover(g, q);
  EXPECT_TRUE(c.contains(q));
  EXPECT_EQ(c.side, best);
  EXPECT_EQ(c.corner, std::vector<int>{4});
  EXPECT_EQ(c.side, 3);
  EXPECT_LE(c.side, 6 * q.side);
}

TEST(Grid, ShiftedCoverOfGridCubeIsItself) {
  const GridConfig g{2, 2, 2, true};
  for (const Cube& q : enumerate_cubes(g, GridScope::shifted(3))) {
    const Cube c = shifted_cover(g, q);
    EXPECT_EQ(c.side, q.side);
    EXPECT_EQ(c.corner, q.corner);
  }
}

TEST(Grid, ShiftedCoverRatioSweep) {
  for (const GridConfig g : {GridConfig{1, 2, 2, true}, GridConfig{2, 2, 2, true}}) {
    for (const Cube& q : enumerate_cubes(g, GridScope::lattice())) {
      const Cube c = shifted_cover(g, q);
      EXPECT_TRUE(c.contains(q));
      EXPECT_LE(c.side, 6 * q.side);
      EXPECT_TRUE(in_domain(g, c));
    }
  }
}

TEST(Grid, ShiftedCoverRequiresShiftedGrids) {
  const GridConfig g = line(2);
  EXPECT_THROW(shifted_cover(g, lattice_cube(g, {1}, 2)), DomainError);
}
