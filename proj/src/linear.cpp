#include "mwt/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mwt/error.hpp"
#include "mwt/index.hpp"
#include "mwt/report.hpp"

namespace mwt {

namespace {

std::vector<Cube> cubes_of(const GridConfig& g, Scope scope) {
  return enumerate_cubes(g, scope == Scope::dyadic ? GridScope::standard() : GridScope::lattice());
}

double direct_sum(const GridConfig& g, const std::vector<double>& w, const Cube& q) {
  double s = 0.0;
  for_each_point_in(q.corner, q.side,
                    [&](std::span<const int> c) { s += w[static_cast<std::size_t>(linear_index(c, g.resolution()))]; });
  return s;
}

double box_sum(const GridConfig& g, const std::vector<double>& w, std::span<const int> corner, int side) {
  double s = 0.0;
  for_each_point_in(corner, side,
                    [&](std::span<const int> c) { s += w[static_cast<std::size_t>(linear_index(c, g.resolution()))]; });
  return s;
}

// Per cube: average of g.
std::vector<double> averages(const GridConfig& g, const std::vector<Cube>& cubes, const std::vector<double>& w) {
  std::vector<double> out(cubes.size());
  for (std::size_t i = 0; i < cubes.size(); ++i)
    out[i] = direct_sum(g, w, cubes[i]) / static_cast<double>(cubes[i].cells());
  return out;
}

// int_Q M(sigma 1_Q)^q w / sigma(Q) for every cube; 0 when sigma(Q) = 0.
std::vector<double> localized_ratios(const LinearSystem& s, const std::vector<Cube>& cubes) {
  const GridConfig& g = s.grid;
  const int n = g.resolution();
  const std::vector<double> avg = averages(g, cubes, s.sigma);
  std::vector<double> out(cubes.size(), 0.0);
  for (std::size_t qi = 0; qi < cubes.size(); ++qi) {
    const Cube& q = cubes[qi];
    const double sq = direct_sum(g, s.sigma, q);
    if (!(sq > 0.0)) continue;
    // Local field on the cells of Q, indexed row-major inside Q.
    std::vector<double> field(static_cast<std::size_t>(q.cells()), 0.0);
    for (std::size_t pi = 0; pi < cubes.size(); ++pi) {
      const Cube& p = cubes[pi];
      if (!q.contains(p)) continue;
      for_each_point_in(p.corner, p.side, [&](std::span<const int> c) {
        std::int64_t idx = 0;
        for (int a = 0; a < g.d; ++a) idx = idx * q.side + (c[a] - q.corner[a]);
        auto& v = field[static_cast<std::size_t>(idx)];
        v = std::max(v, avg[pi]);
      });
    }
    double e = 0.0;
    std::int64_t idx = 0;
    for_each_point_in(q.corner, q.side, [&](std::span<const int> c) {
      const double w = s.omega[static_cast<std::size_t>(linear_index(c, n))];
      const double v = field[static_cast<std::size_t>(idx++)];
      if (w > 0.0 && v > 0.0) e += std::pow(v, s.q) * w;
    });
    out[qi] = e / sq;
  }
  return out;
}

void check_budget(const LinearSystem& s, Scope scope) {
  if (scope == Scope::general && s.grid.cell_count() * count_lattice_cubes(s.grid) > kDefaultBudget)
    throw BudgetError("linear path: general scope exceeds the default budget");
}

double rel_error(double a, double b) {
  if (a == b || (std::isnan(a) && std::isnan(b))) return 0.0;
  if (std::isinf(a) || std::isinf(b) || std::isnan(a) || std::isnan(b))
    return std::numeric_limits<double>::infinity();
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

namespace linear {

double a_constant(const LinearSystem& s, Scope scope) {
  const auto cubes = cubes_of(s.grid, scope);
  const auto w = averages(s.grid, cubes, s.omega);
  const auto sg = averages(s.grid, cubes, s.sigma);
  double best = 0.0;
  for (std::size_t i = 0; i < cubes.size(); ++i) best = std::max(best, w[i] * std::pow(sg[i], s.q - 1.0));
  return best;
}

double s_constant(const LinearSystem& s, Scope scope) {
  check_budget(s, scope);
  const auto r = localized_ratios(s, cubes_of(s.grid, scope));
  return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

double testing_constant(const LinearSystem& s, Scope scope, double rho, double D) {
  check_budget(s, scope);
  const GridConfig& g = s.grid;
  const int n = g.resolution();
  const auto cubes = cubes_of(g, scope);
  const auto r = localized_ratios(s, cubes);
  double best = 0.0;
  for (std::size_t qi = 0; qi < cubes.size(); ++qi) {
    const Cube& q = cubes[qi];
    int big = static_cast<int>(std::ceil(rho * q.side - 1e-9 * rho * q.side));
    big = std::max(big, q.side + 1);
    if (big > n) continue;
    const double bound = D * direct_sum(g, s.sigma, q);
    bool ok = false;
    for_each_point(g.d, big - q.side + 1, [&](std::span<const int> shift) {
      if (ok) return;
      std::vector<int> corner(static_cast<std::size_t>(g.d));
      for (int a = 0; a < g.d; ++a) {
        corner[a] = q.corner[a] + q.side - big + shift[a];
        if (corner[a] < 0 || corner[a] + big > n) return;
      }
      if (box_sum(g, s.sigma, corner, big) <= bound) ok = true;
    });
    if (ok) best = std::max(best, r[qi]);
  }
  return best;
}

std::vector<double> maximal(const LinearSystem& s, Scope scope, const std::vector<double>& g) {
  const auto cubes = cubes_of(s.grid, scope);
  const auto avg = averages(s.grid, cubes, g);
  std::vector<double> out(static_cast<std::size_t>(s.grid.cell_count()), 0.0);
  for (std::size_t i = 0; i < cubes.size(); ++i)
    for_each_point_in(cubes[i].corner, cubes[i].side, [&](std::span<const int> c) {
      auto& v = out[static_cast<std::size_t>(linear_index(c, s.grid.resolution()))];
      v = std::max(v, avg[i]);
    });
  return out;
}

double norm_ratio(const LinearSystem& s, Scope scope, const std::vector<double>& f) {
  check_budget(s, scope);
  std::vector<double> g(f.size());
  double den = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) {
    g[x] = s.sigma[x] > 0.0 ? f[x] * s.sigma[x] : 0.0;
    if (s.sigma[x] > 0.0 && f[x] > 0.0) den += std::pow(f[x], s.q) * s.sigma[x];
  }
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const auto m = maximal(s, scope, g);
  double num = 0.0;
  for (std::size_t x = 0; x < m.size(); ++x)
    if (m[x] > 0.0 && s.omega[x] > 0.0) num += std::pow(m[x], s.q) * s.omega[x];
  return num / den;
}

}  // namespace linear

WeightSystem replicate(const LinearSystem& s, int m) {
  const int n = s.grid.resolution();
  std::vector<DiscreteWeight> sig;
  for (int i = 0; i < m; ++i) sig.emplace_back(s.grid.d, n, s.sigma, "sigma[" + std::to_string(i) + "]");
  return make_system(s.grid, ExponentVector(std::vector<double>(static_cast<std::size_t>(m), s.q)),
                     DiscreteWeight(s.grid.d, n, s.omega, "omega"), std::move(sig));
}

LinearSystem collapse(const WeightSystem& ws) {
  LinearSystem s;
  s.grid = ws.grid;
  s.q = ws.exponents.p_i(0);
  s.omega.assign(ws.omega.density().begin(), ws.omega.density().end());
  s.sigma.assign(ws.sigmas[0].density().begin(), ws.sigmas[0].density().end());
  for (std::size_t i = 1; i < ws.m(); ++i) {
    if (ws.exponents.p_i(i) != s.q) throw ValidationError("p", "reduction needs p_1 = ... = p_m");
    const auto d = ws.sigmas[i].density();
    if (!std::equal(d.begin(), d.end(), s.sigma.begin()))
      throw ValidationError("sigma", "reduction needs sigma_1 = ... = sigma_m");
  }
  return s;
}

nlohmann::json ReductionCheck::to_json() const {
  return {{"name", name},
          {"multilinear", number_json(multilinear)},
          {"linear", number_json(linear)},
          {"rel_error", number_json(rel_error)},
          {"holds", holds}};
}

bool ReductionReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ReductionCheck& c) { return c.holds; });
}

nlohmann::json ReductionReport::to_json() const {
  nlohmann::json j{{"scope", to_string(scope)}, {"q", number_json(q)}, {"m", m}, {"tolerance", number_json(tolerance)}};
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) j["checks"].push_back(c.to_json());
  j["passed"] = passed();
  return j;
}

ReductionReport reduce_linear(const WeightSystem& ws, const ReductionOptions& opts) {
  const LinearSystem lin = collapse(ws);
  ReductionReport r;
  r.scope = opts.scope;
  r.q = lin.q;
  r.m = ws.m();
  r.tolerance = opts.tolerance;
  auto add = [&](std::string name, double multi, double lin_v) {
    ReductionCheck c{std::move(name), multi, lin_v, rel_error(multi, lin_v), false};
    c.holds = c.rel_error <= opts.tolerance;
    r.checks.push_back(std::move(c));
  };

  const CubeTable t = compute_cube_table(ws, opts.scope);
  const double D = opts.D ? *opts.D : default_doubling(ws.grid.d, ws.grid.nu, ws.exponents);
  add("rh == 1", rh_constant(t).value, 1.0);
  add("a_p == [w,s]_q^q", ap_constant(t).value, linear::a_constant(lin, opts.scope));
  add("testing == P_q^q", testing_constant(ws, t, opts.rho, D).sup.value,
      linear::testing_constant(lin, opts.scope, opts.rho, D));

  const auto cells = static_cast<std::size_t>(ws.grid.cell_count());
  std::vector<std::pair<std::string, std::vector<double>>> tests;
  tests.emplace_back("ones", std::vector<double>(cells, 1.0));
  {
    // Indicator of the first cube of the finest standard level with sigma > 0.
    std::vector<double> f(cells, 0.0);
    for (const Cube& q : enumerate_cubes(ws.grid, GridScope::standard())) {
      if (q.level != std::min(1, ws.grid.max_level) || !(ws.sigmas[0].mass(q) > 0.0)) continue;
      for_each_point_in(q.corner, q.side, [&](std::span<const int> c) {
        f[static_cast<std::size_t>(linear_index(c, ws.grid.resolution()))] = 1.0;
      });
      break;
    }
    tests.emplace_back("indicator", std::move(f));
  }
  {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> f(cells);
    for (auto& v : f) v = std::exp(u(rng)) - 1.0;
    tests.emplace_back("random", std::move(f));
  }
  for (const auto& [name, f] : tests) {
    const std::vector<std::vector<double>> fs(ws.m(), f);
    const auto multi = norm_ratio(ws, opts.scope, fs);
    add("norm[" + name + "]", multi ? *multi : std::numeric_limits<double>::quiet_NaN(),
        linear::norm_ratio(lin, opts.scope, f));
  }
  add("s_p == [w,s]_S_q^q", sp_constant(t).value, linear::s_constant(lin, opts.scope));
  return r;
}

}  // namespace mwt
