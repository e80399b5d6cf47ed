#include <gtest/gtest.h>

#include <omp.h>

#include <random>

#include "fixtures.hpp"
#include "mwt/kernels.hpp"

using namespace mwt;

namespace {

struct Threads {
  explicit Threads(int n) : old(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(old); }
  int old;
};

std::vector<DiscreteWeight> inputs(const GridConfig& g, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<DiscreteWeight> out;
  const fixture::Profile prof[] = {fixture::Profile::lognormal, fixture::Profile::sparse, fixture::Profile::spiky};
  for (int i = 0; i < m; ++i) out.emplace_back(g.d, g.resolution(), fixture::density(g, prof[i % 3], rng));
  return out;
}

}  // namespace

TEST(Kernels, TreeLayoutIndexing) {
  const GridConfig g{2, 3, 2, true};
  const TreeLayout t(g);
  EXPECT_EQ(t.node_count(), 1 + 9 + 81);
  EXPECT_EQ(t.cells_per_leaf(), 9);
  const auto cubes = enumerate_cubes(g, GridScope::standard());
  ASSERT_EQ(static_cast<std::int64_t>(cubes.size()), t.node_count());
  for (std::int64_t v = 0; v < t.node_count(); ++v) {
    EXPECT_EQ(t.cube(v), cubes[static_cast<std::size_t>(v)]);
    EXPECT_EQ(t.node_of(cubes[static_cast<std::size_t>(v)]), v);
    if (v > 0) EXPECT_TRUE(t.cube(t.parent(v)).contains(t.cube(v)));
  }
}

TEST(Kernels, SerialAndParallelAgreeBitExactly) {
  Threads four(4);
  for (const GridConfig g : {GridConfig{1, 2, 5, false}, GridConfig{2, 2, 3, false}, GridConfig{2, 2, 2, true},
                             GridConfig{2, 3, 2, false}}) {
    const auto in = inputs(g, 2, 11);
    const TreeLayout t(g);
    std::vector<std::vector<double>> ms, mp;
    for (const auto& w : in) {
      ms.push_back(tree_masses_serial(t, w.density()));
      mp.push_back(tree_masses(t, w.density()));
      EXPECT_EQ(ms.back(), mp.back());
    }
    const auto prod = tree_products(t, ms);
    const LeafMax a = tree_running_max_serial(t, prod), b = tree_running_max(t, prod);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.level, b.level);
    std::vector<std::int64_t> roots(static_cast<std::size_t>(t.node_count()));
    for (std::size_t v = 0; v < roots.size(); ++v) roots[v] = static_cast<std::int64_t>(v);
    const std::vector<double> leafw(ms[0].begin() + t.level_begin(t.levels()), ms[0].end());
    EXPECT_EQ(tree_local_energy_serial(t, prod, leafw, 1.7, roots), tree_local_energy(t, prod, leafw, 1.7, roots));

    const LatticeTable ls = lattice_products_serial(in), lp = lattice_products(in);
    for (int s = 1; s <= g.resolution(); ++s) EXPECT_EQ(ls.side(s), lp.side(s));
    EXPECT_EQ(lattice_max_field_serial(ls), lattice_max_field(ls));
    const auto cubes = enumerate_cubes(g, GridScope::lattice());
    EXPECT_EQ(lattice_local_energy_serial(ls, in[0].density(), 2.5, cubes),
              lattice_local_energy(ls, in[0].density(), 2.5, cubes));
  }
}

TEST(Kernels, TreeMassesAreExactlyAdditive) {
  const GridConfig g{2, 2, 3, false};
  const auto in = inputs(g, 1, 2);
  const TreeLayout t(g);
  const auto m = tree_masses(t, in[0].density());
  for (std::int64_t v = 0; v < t.level_begin(t.levels()); ++v) {
    double s = 0.0;
    for (auto c : t.children(v)) s += m[static_cast<std::size_t>(c)];
    EXPECT_EQ(s, m[static_cast<std::size_t>(v)]);
  }
}

TEST(Kernels, LatticeProductsMatchOracle) {
  const GridConfig g{2, 2, 2, false};
  const auto in = inputs(g, 3, 9);
  std::vector<oracle::Density> raw;
  for (const auto& w : in) raw.emplace_back(w.density().begin(), w.density().end());
  const LatticeTable t = lattice_products(in);
  for (const oracle::Box& b : oracle::lattice_boxes(2, 4))
    EXPECT_TRUE(oracle::close(t.at(b.side, b.corner), oracle::product_average(raw, 4, b), 1e-12));
}

TEST(Kernels, LocalEnergyMatchesOracle) {
  const GridConfig g{1, 2, 3, false};
  const auto in = inputs(g, 2, 4);
  oracle::System s;
  s.d = 1;
  s.n = 8;
  s.p_i = {3.0, 3.0};
  s.omega = oracle::Density(8, 1.0);
  for (const auto& w : in) s.sigma.emplace_back(w.density().begin(), w.density().end());
  const auto cubes = enumerate_cubes(g, GridScope::lattice());
  const auto e = lattice_local_energy(lattice_products(in), s.omega, s.p(), cubes);
  const auto boxes = oracle::lattice_boxes(1, 8);
  for (std::size_t q = 0; q < cubes.size(); ++q)
    EXPECT_TRUE(oracle::close(e[q], oracle::local_energy(s, boxes, {cubes[q].corner, cubes[q].side}), 1e-12));
}
