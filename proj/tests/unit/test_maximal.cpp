#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mwt/error.hpp"
#include "mwt/maximal.hpp"

using namespace mwt;

namespace {

std::vector<DiscreteWeight> weights(int d, int n, std::vector<std::vector<double>> dens) {
  std::vector<DiscreteWeight> out;
  for (auto& v : dens) out.emplace_back(d, n, std::move(v));
  return out;
}

std::vector<oracle::Density> raw(const std::vector<DiscreteWeight>& w) {
  std::vector<oracle::Density> out;
  for (const auto& x : w) out.emplace_back(x.density().begin(), x.density().end());
  return out;
}

}  // namespace

TEST(Maximal, DyadicExamples) {
  const GridConfig g{1, 2, 2, false};
  const auto a = weights(1, 4, {{4, 0, 0, 0}});
  EXPECT_EQ(dyadic_maximal(g, a).values, (std::vector<double>{4, 2, 1, 1}));
  const auto b = weights(1, 4, {{4, 0, 0, 0}, {1, 1, 1, 1}});
  EXPECT_EQ(dyadic_maximal(g, b).values, (std::vector<double>{4, 2, 1, 1}));
  const auto c = weights(1, 4, {{1, 1, 1, 1}, {1, 1, 1, 1}});
  EXPECT_EQ(dyadic_maximal(g, c).values, (std::vector<double>(4, 1.0)));
}

TEST(Maximal, GeneralExample) {
  const GridConfig g{1, 2, 2, false};
  const auto a = weights(1, 4, {{0, 4, 0, 0}});
  const auto gen = general_maximal_bruteforce(g, a);
  const auto dy = dyadic_maximal(g, a);
  EXPECT_DOUBLE_EQ(gen.values[0], 2.0);
  EXPECT_EQ(gen.witnesses[0].side, 2);
  EXPECT_EQ(gen.witnesses[0].corner, std::vector<int>{0});
  EXPECT_DOUBLE_EQ(dy.values[0], 2.0);
  EXPECT_EQ(general_maximal(g, a).values, gen.values);
}

TEST(Maximal, TiesKeepTheLargerCube) {
  const GridConfig g{1, 2, 2, false};
  const auto a = weights(1, 4, {{1, 1, 1, 1}});
  const auto f = dyadic_maximal(g, a);
  for (const Cube& w : f.witnesses) EXPECT_EQ(w.level, 0);
}

TEST(Maximal, MatchesOraclesOnRandomFixtures) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto spec = fixture::random_spec(seed);
    const auto ws = fixture::build(spec);
    const GridConfig& g = ws.grid;
    const int n = g.resolution();
    const auto hw = weighted_inputs(ws, {});
    const auto dy = dyadic_maximal(g, hw);
    const auto ref_dy = oracle::maximal(raw(hw), g.d, n, oracle::grid_boxes(g.d, g.nu, g.max_level));
    const auto brute_dy = general_maximal_bruteforce(g, hw, kDefaultBudget, GridScope::standard());
    const auto gen = general_maximal(g, hw);
    const auto brute = general_maximal_bruteforce(g, hw);
    const auto ref_gen = oracle::maximal(raw(hw), g.d, n, oracle::lattice_boxes(g.d, n));
    for (std::size_t x = 0; x < dy.values.size(); ++x) {
      EXPECT_TRUE(oracle::close(dy.values[x], ref_dy[x], 1e-12)) << spec.label();
      EXPECT_TRUE(oracle::close(dy.values[x], brute_dy.values[x], 1e-12)) << spec.label();
      EXPECT_TRUE(oracle::close(gen.values[x], ref_gen[x], 1e-12)) << spec.label();
      EXPECT_TRUE(oracle::close(brute.values[x], ref_gen[x], 1e-12)) << spec.label();
      EXPECT_GE(gen.values[x] * (1 + 1e-12), dy.values[x]);
    }
  }
}

TEST(Maximal, WitnessConsistency) {
  std::mt19937_64 rng(8);
  const GridConfig g{2, 2, 3, false};
  const auto in = weights(2, 8, {fixture::density(g, fixture::Profile::lognormal, rng),
                                 fixture::density(g, fixture::Profile::sparse, rng)});
  for (const auto& f : {dyadic_maximal(g, in), general_maximal_bruteforce(g, in)}) {
    ASSERT_EQ(f.witnesses.size(), f.values.size());
    for (std::size_t x = 0; x < f.values.size(); ++x) {
      const Cube& q = f.witnesses[x];
      double prod = 1.0;
      for (const auto& w : in) prod *= w.average(q);
      EXPECT_TRUE(oracle::close(prod, f.values[x], 1e-10));
      EXPECT_TRUE(q.contains_cell(unlinear_index(static_cast<std::int64_t>(x), 2, 8)));
    }
  }
}

TEST(Maximal, HomogeneityAndMonotonicity) {
  std::mt19937_64 rng(12);
  const GridConfig g{1, 2, 4, false};
  auto a = fixture::density(g, fixture::Profile::lognormal, rng);
  auto b = fixture::density(g, fixture::Profile::uniform, rng);
  const auto base = dyadic_maximal(g, weights(1, 16, {a, b})).values;
  const auto base_gen = general_maximal(g, weights(1, 16, {a, b})).values;
  auto a3 = a;
  for (auto& v : a3) v *= 3.0;
  const auto scaled = dyadic_maximal(g, weights(1, 16, {a3, b})).values;
  const auto scaled_gen = general_maximal(g, weights(1, 16, {a3, b})).values;
  auto bigger = b;
  bigger[5] += 10.0;
  const auto raised = dyadic_maximal(g, weights(1, 16, {a, bigger})).values;
  for (std::size_t x = 0; x < base.size(); ++x) {
    EXPECT_TRUE(oracle::close(scaled[x], 3.0 * base[x], 1e-12));
    EXPECT_TRUE(oracle::close(scaled_gen[x], 3.0 * base_gen[x], 1e-12));
    EXPECT_GE(raised[x], base[x]);
  }
}

TEST(Maximal, BruteForceBudget) {
  const GridConfig g{2, 2, 3, false};
  const auto in = weights(2, 8, {std::vector<double>(64, 1.0)});
  EXPECT_THROW(general_maximal_bruteforce(g, in, 1000), BudgetError);
  EXPECT_NO_THROW(general_maximal_bruteforce(g, in, 1000000));
}

TEST(Maximal, ShiftedBound) {
  const GridConfig g{1, 2, 2, true};
  const auto leb = weights(1, 12, {std::vector<double>(12, 1.0)});
  const auto r = shifted_bound_check(g, leb);
  EXPECT_DOUBLE_EQ(r.max_ratio, 1.0);
  EXPECT_TRUE(r.holds);

  std::vector<double> spike(12, 0.0);
  spike[5] = 12.0;
  const auto one = weights(1, 12, {spike});
  const auto r1 = shifted_bound_check(g, one);
  EXPECT_TRUE(r1.holds);
  EXPECT_LE(r1.max_ratio, 6.0);
  EXPECT_EQ(r1.bound, 6.0);

  std::mt19937_64 rng(4);
  const auto two = weights(1, 12, {fixture::density(g, fixture::Profile::spiky, rng), spike});
  const auto r2 = shifted_bound_check(g, two);
  EXPECT_TRUE(r2.holds);
  EXPECT_LE(r2.max_ratio, 36.0);
  EXPECT_EQ(r2.bound, 36.0);
}

TEST(Maximal, GridMaximalOfShiftedGridMatchesOracle) {
  const GridConfig g{1, 2, 2, true};
  std::mt19937_64 rng(21);
  const auto in = weights(1, 12, {fixture::density(g, fixture::Profile::lognormal, rng)});
  const auto f = grid_maximal(g, GridId::shifted(1), in);
  std::vector<oracle::Box> fam;
  for (const Cube& q : enumerate_cubes(g, GridScope::shifted(1))) fam.push_back({q.corner, q.side});
  const auto ref = oracle::maximal(raw(in), 1, 12, fam);
  for (std::size_t x = 0; x < ref.size(); ++x) EXPECT_TRUE(oracle::close(f.values[x], ref[x], 1e-12));
}
