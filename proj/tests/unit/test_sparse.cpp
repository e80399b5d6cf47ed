#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mwt/error.hpp"
#include "mwt/sparse.hpp"

using namespace mwt;

namespace {

std::vector<std::vector<double>> random_f(const WeightSystem& ws, std::uint64_t seed, bool spiky) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> f;
  for (std::size_t i = 0; i < ws.m(); ++i)
    f.push_back(fixture::density(ws.grid, spiky ? fixture::Profile::spiky : fixture::Profile::lognormal, rng));
  return f;
}

}  // namespace

TEST(Sparse, DefaultBase) {
  EXPECT_DOUBLE_EQ(default_base(1, 2, 1), 4.0);
  EXPECT_DOUBLE_EQ(default_base(2, 2, 3), 512.0);
  EXPECT_DOUBLE_EQ(default_base(1, 3, 2), 36.0);
}

TEST(Sparse, ConstantInputGivesRoot) {
  const auto ws = fixture::lebesgue(2, 3, {2.0, 2.0});
  const auto fam = build_sparse(ws);
  ASSERT_EQ(fam.generations.size(), 1u);
  ASSERT_EQ(fam.generations[0].cubes.size(), 1u);
  EXPECT_EQ(fam.generations[0].cubes[0].cube, root_cube(ws.grid));
  EXPECT_EQ(fam.generations[0].cubes[0].e_cells.size(), 64u);
  const auto co = coefficients(ws, fam);
  ASSERT_EQ(co.size(), 1u);
  EXPECT_DOUBLE_EQ(co[0].value, 64.0);  // w(E) = 64 cells, averages 1
}

TEST(Sparse, ConcentratedExample) {
  const auto ws = fixture::system(1, 2, 2, false, {2.0}, {1, 1, 1, 1}, {{4, 0, 0, 0}});
  const auto fam = build_sparse(ws, {}, 4.0);
  EXPECT_DOUBLE_EQ(fam.tau, 0.5);
  ASSERT_EQ(fam.generations.size(), 2u);
  EXPECT_EQ(fam.generations[0].omega_cells, (std::vector<std::int64_t>{0, 1, 2, 3}));
  EXPECT_EQ(fam.generations[1].omega_cells, (std::vector<std::int64_t>{0}));
  EXPECT_EQ(fam.generations[1].threshold, 2.0);
  ASSERT_EQ(fam.generations[1].cubes.size(), 1u);
  EXPECT_EQ(fam.generations[1].cubes[0].cube.side, 1);
  EXPECT_EQ(fam.generations[0].cubes[0].e_cells, (std::vector<std::int64_t>{1, 2, 3}));

  // Hand computation: root a = w({1,2,3}) <sigma>^2 = 3; leaf a = w({0}) 4^2 = 16.
  const auto co = coefficients(ws, fam);
  ASSERT_EQ(co.size(), 2u);
  EXPECT_DOUBLE_EQ(co[0].value, 3.0);
  EXPECT_DOUBLE_EQ(co[1].value, 16.0);
}

TEST(Sparse, ZeroOmegaGivesZeroCoefficients) {
  const auto ws = fixture::system(1, 2, 2, false, {2.0}, {0, 0, 0, 0}, {{4, 1, 0, 2}});
  for (const auto& c : coefficients(ws, build_sparse(ws))) EXPECT_EQ(c.value, 0.0);
}

TEST(Sparse, ZeroFieldHasNoGenerations) {
  const auto ws = fixture::system(1, 2, 2, false, {2.0, 2.0}, {1, 1, 1, 1}, {{3, 3, 0, 0}, {0, 0, 0, 0}});
  const auto fam = build_sparse(ws);
  for (double v : fam.field) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(fam.generations.empty());
  EXPECT_TRUE(domination_check(ws, {}, fam).holds);
}

TEST(Sparse, InvariantsAndInequalitiesOnRandomFixtures) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto spec = fixture::random_spec(seed, 64, 32);
    const auto ws = fixture::build(spec);
    const std::vector<std::vector<std::vector<double>>> tests{{}, random_f(ws, seed, false), random_f(ws, seed, true)};
    for (const auto& f : tests) {
      const auto fam = build_sparse(ws, f);
      const auto inv = check_invariants(ws.grid, fam);
      ASSERT_TRUE(inv.all()) << spec.label();
      EXPECT_LE(inv.max_overlap_cells, 0);
      const auto dom = domination_check(ws, f, fam);
      EXPECT_TRUE(dom.holds) << spec.label() << dom.to_json().dump();
      const auto car = carleson_check(ws, coefficients(ws, fam), f);
      EXPECT_TRUE(car.holds) << spec.label() << car.to_json(ws.grid).dump();
      EXPECT_TRUE(car.scaling_holds) << spec.label();
    }
  }
}

TEST(Sparse, SmallBaseCanBreakSparsity) {
  std::vector<double> s(16, 0.0);
  s[0] = 100.0;
  const auto ws = fixture::system(1, 2, 4, false, {2.0}, std::vector<double>(16, 1.0), {s});
  EXPECT_NO_THROW(build_sparse(ws));
  EXPECT_THROW(build_sparse(ws, {}, 1.05), VerificationFailure);
  EXPECT_THROW(build_sparse(ws, {}, 1.0), ValidationError);
}

TEST(Sparse, DominationExamples) {
  const auto ws = fixture::lebesgue(1, 3, {2.0, 3.0});
  const auto r = domination_check(ws);
  EXPECT_TRUE(r.holds);
  EXPECT_GT(r.lhs, 0.0);
  EXPECT_GT(r.sum, 0.0);
  EXPECT_LE(r.lhs / r.sum, r.constant);
  EXPECT_DOUBLE_EQ(r.constant, std::pow(16.0, ws.exponents.p()));
  const std::vector<std::vector<double>> zero(2, std::vector<double>(8, 0.0));
  const auto z = domination_check(ws, zero);
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_EQ(z.sum, 0.0);
  EXPECT_TRUE(z.holds);
}

TEST(Sparse, CarlesonExamples) {
  const auto ws = fixture::lebesgue(1, 3, {2.0, 2.0});
  const Cube root = root_cube(ws.grid);
  std::vector<Coefficient> one{{0, 0, root, 8.0}};  // a_root = |root| in cell units
  const auto r = carleson_check(ws, one);
  EXPECT_DOUBLE_EQ(r.lhs, 8.0);
  EXPECT_DOUBLE_EQ(r.a_star, 1.0);
  EXPECT_DOUBLE_EQ(r.conjugate_factor, 4.0);  // (p_i')^p = 2 for each i
  EXPECT_DOUBLE_EQ(r.rhs, 4.0 * 8.0);
  EXPECT_TRUE(r.holds);
  EXPECT_LE(r.lhs / (r.a_star * r.norm_product), 1.0);
  EXPECT_NEAR(r.lhs_scaled, 4.0 * r.lhs, 1e-12);  // 2^(mp) with mp = 2

  const auto disjoint = fixture::system(1, 2, 1, false, {2.0, 2.0}, {1, 1}, {{2, 0}, {0, 2}});
  std::vector<Coefficient> c{{0, 0, root_cube(disjoint.grid), 1.0}};
  const auto v = carleson_check(disjoint, c);
  EXPECT_TRUE(v.vacuous);
  EXPECT_TRUE(v.holds);
}

TEST(Sparse, DeterministicFamilies) {
  const auto ws = fixture::build(fixture::random_spec(5, 64, 32));
  EXPECT_EQ(build_sparse(ws).to_json(ws.grid).dump(), build_sparse(ws).to_json(ws.grid).dump());
}
