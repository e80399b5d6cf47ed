#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mwt/error.hpp"
#include "mwt/weights.hpp"
#include "oracles.hpp"

using namespace mwt;

TEST(Weights, MeasureExamples) {
  const GridConfig g{1, 2, 2, false};
  const DiscreteWeight w(1, 4, {4, 0, 0, 0});
  EXPECT_DOUBLE_EQ(w.measure(lattice_cube(g, {0}, 1)), 1.0);
  const DiscreteWeight one(1, 4, {1, 1, 1, 1});
  EXPECT_DOUBLE_EQ(one.measure(lattice_cube(g, {0}, 2)), 0.5);
  EXPECT_DOUBLE_EQ(w.mass(root_cube(g)), 4.0);
  EXPECT_DOUBLE_EQ(one.average(lattice_cube(g, {1}, 3)), 1.0);
}

TEST(Weights, RejectsBadDensity) {
  try {
    DiscreteWeight(1, 4, {1, -1, 1, 1}, "omega");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "omega[1]");
  }
  EXPECT_THROW(DiscreteWeight(1, 4, {1, NAN, 1, 1}), ValidationError);
  EXPECT_THROW(DiscreteWeight(1, 4, {1, 1, 1}), ValidationError);
}

TEST(Weights, PrefixMatchesDirectSums) {
  std::mt19937_64 rng(3);
  const GridConfig g{2, 2, 3, false};
  for (auto prof : {fixture::Profile::lognormal, fixture::Profile::spiky, fixture::Profile::sparse}) {
    const auto dens = fixture::density(g, prof, rng);
    const DiscreteWeight w(2, 8, dens);
    double total = 0.0;
    for (double v : dens) total += v;
    EXPECT_LE(std::fabs(w.total_mass() - total), 1e-12 * total);
    for (const Cube& q : enumerate_cubes(g, GridScope::lattice())) {
      const double ref = oracle::mass(dens, 8, {q.corner, q.side});
      EXPECT_TRUE(oracle::close(w.mass(q), ref, 1e-12)) << w.mass(q) << " vs " << ref;
      EXPECT_EQ(w.vanishes_on(q), ref == 0.0);
      if (ref == 0.0) EXPECT_EQ(w.mass(q), 0.0);
    }
  }
}

TEST(Weights, GridAdditivityAndMonotonicity) {
  std::mt19937_64 rng(5);
  const GridConfig g{2, 3, 2, false};
  const DiscreteWeight w(2, 9, fixture::density(g, fixture::Profile::lognormal, rng));
  for (const Cube& q : enumerate_cubes(g, GridScope::standard())) {
    if (q.level == g.max_level) continue;
    double sum = 0.0;
    for (const Cube& c : children(g, q)) {
      sum += w.mass(c);
      EXPECT_LE(w.mass(c), w.mass(q));
    }
    EXPECT_TRUE(oracle::close(sum, w.mass(q), 1e-12));
  }
}

TEST(Weights, ExponentIdentities) {
  const ExponentVector e({2.0, 3.0, 6.0});
  EXPECT_NEAR(1.0 / e.p(), 1.0 / 2 + 1.0 / 3 + 1.0 / 6, 1e-12);
  double shares = 0.0, conj = 0.0;
  for (std::size_t i = 0; i < e.m(); ++i) {
    EXPECT_NEAR(1.0 / e.p_i(i) + 1.0 / e.conjugate(i), 1.0, 1e-12);
    shares += e.share(i);
    conj += e.conjugate_share(i);
  }
  EXPECT_NEAR(shares, 1.0, 1e-12);
  EXPECT_NEAR(conj, 3 * e.p() - 1.0, 1e-12);
  EXPECT_THROW(ExponentVector({1.0, 2.0}), ValidationError);
  EXPECT_THROW(ExponentVector(std::vector<double>{}), ValidationError);
}

TEST(Weights, ProductMass) {
  const auto ones = fixture::lebesgue(1, 2, {2.0, 2.0});
  EXPECT_DOUBLE_EQ(product_mass(ones, lattice_cube(ones.grid, {1}, 2)), 2.0);
  const auto disjoint = fixture::system(1, 2, 1, false, {2.0, 2.0}, {1, 1}, {{2, 0}, {0, 2}});
  EXPECT_EQ(product_mass(disjoint, root_cube(disjoint.grid)), 0.0);
  std::mt19937_64 rng(1);
  const GridConfig g{1, 2, 3, false};
  const auto s = fixture::density(g, fixture::Profile::lognormal, rng);
  const auto same = fixture::system(1, 2, 3, false, {3.0, 3.0, 3.0}, s, {s, s, s});
  for (const Cube& q : enumerate_cubes(g, GridScope::lattice()))
    EXPECT_TRUE(oracle::close(product_mass(same, q), same.sigmas[0].mass(q), 1e-12));
}

TEST(Weights, ValidateReports) {
  WeightInput in;
  in.d = 1;
  in.max_level = 1;
  in.resolution = 2;
  in.p = {2.0, 2.0};
  in.omega = {1, 1};
  in.sigma = {{1, 1}, {1, 1}};
  auto r = validate(in);
  EXPECT_TRUE(r.valid());
  EXPECT_TRUE(r.degenerate_cells.empty());

  in.p_total = 0.9;
  r = validate(in);
  ASSERT_FALSE(r.valid());
  EXPECT_EQ(r.issues[0].field, "p_total");
  in.p_total.reset();

  in.omega = {1, -1};
  r = validate(in);
  ASSERT_FALSE(r.valid());
  EXPECT_EQ(r.issues[0].field, "omega[1]");
  EXPECT_THROW(build_system(in), ValidationError);
  in.omega = {1, 1};

  in.sigma = {{1, 0}, {1, 1}};
  r = validate(in);
  EXPECT_TRUE(r.valid());
  EXPECT_EQ(r.degenerate_cells, std::vector<std::int64_t>{1});

  in.sigma = {{1, 1, 1}, {1, 1}};
  EXPECT_FALSE(validate(in).valid());
}
