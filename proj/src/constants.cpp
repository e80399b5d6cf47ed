#include "mwt/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mwt/error.hpp"
#include "mwt/index.hpp"
#include "mwt/kernels.hpp"

namespace mwt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 0/0 contributes 0, positive/0 is +inf.
double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num > 0.0 ? kInf : 0.0;
}

Witnessed sup_over(const std::vector<Cube>& cubes, const std::vector<double>& values,
                   const std::vector<bool>* mask = nullptr) {
  Witnessed w;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    // Strict comparison: the earliest (largest) cube wins ties.
    if (!w.witness || values[i] > w.value) {
      w.value = values[i];
      w.witness = cubes[i];
    }
  }
  if (!w.witness) w.value = 0.0;
  return w;
}

std::vector<double> field_of(const GridConfig& g, Scope scope, std::span<const DiscreteWeight> inputs) {
  return scope == Scope::dyadic ? dyadic_maximal(g, inputs, false).values : general_maximal(g, inputs).values;
}

bool all_sigma_positive(const CubeTable& t, std::size_t q) {
  for (const auto& s : t.sigma_mass)
    if (!(s[q] > 0.0)) return false;
  return true;
}

}  // namespace

std::string to_string(Scope s) { return s == Scope::dyadic ? "dyadic" : "general"; }

Scope parse_scope(const std::string& text) {
  if (text == "dyadic") return Scope::dyadic;
  if (text == "general") return Scope::general;
  throw ValidationError("scope", "expected dyadic or general, got '" + text + "'");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::indicators: return "indicators";
    case Strategy::random: return "random";
    case Strategy::ascent: return "ascent";
  }
  return "?";
}

Strategy parse_strategy(const std::string& text) {
  if (text == "indicators") return Strategy::indicators;
  if (text == "random") return Strategy::random;
  if (text == "ascent") return Strategy::ascent;
  throw ValidationError("strategy", "expected indicators, random or ascent, got '" + text + "'");
}

bool leq_rel(double lhs, double rhs, double tol) {
  if (std::isnan(lhs) || std::isnan(rhs)) return false;
  if (lhs <= rhs) return true;
  if (std::isinf(lhs)) return false;
  return lhs - rhs <= tol * std::max(std::fabs(lhs), std::fabs(rhs));
}

double default_doubling(int d, int nu, const ExponentVector& e) {
  const double mp = static_cast<double>(e.m()) * e.p();
  if (!(mp > 1.0)) throw ValidationError("p", "mp must exceed 1 for the doubling parameter");
  return std::pow(static_cast<double>(nu), 2.0 * mp * d / (mp - 1.0));
}

double doubling_from_t(int d, int nu, double t) { return std::pow(static_cast<double>(nu), d * t); }

double t_from_doubling(int d, int nu, double D) { return std::log(D) / (d * std::log(static_cast<double>(nu))); }

bool t_condition(double t, const ExponentVector& e) {
  const double mp = static_cast<double>(e.m()) * e.p();
  return (t - 1.0) * (mp - 1.0) - 1.0 > 0.0;
}

CubeTable compute_cube_table(const WeightSystem& ws, Scope scope, std::int64_t budget) {
  const GridConfig& g = ws.grid;
  const ExponentVector& e = ws.exponents;
  const double p = e.p();
  const std::size_t m = ws.m();
  CubeTable t;
  t.scope = scope;
  t.sigma_mass.resize(m);

  std::vector<double> omega_mass;
  std::vector<double> product_mass_v;
  if (scope == Scope::dyadic) {
    const TreeLayout tree(g);
    t.cubes.reserve(static_cast<std::size_t>(tree.node_count()));
    for (std::int64_t v = 0; v < tree.node_count(); ++v) t.cubes.push_back(tree.cube(v));
    omega_mass = tree_masses(tree, ws.omega.density());
    for (std::size_t i = 0; i < m; ++i) t.sigma_mass[i] = tree_masses(tree, ws.sigmas[i].density());
    product_mass_v = tree_masses(tree, ws.product.density());
    const std::vector<double> avg = tree_products(tree, t.sigma_mass);
    const std::int64_t first_leaf = tree.level_begin(tree.levels());
    std::vector<double> leaf_w(omega_mass.begin() + first_leaf, omega_mass.end());
    std::vector<std::int64_t> roots(static_cast<std::size_t>(tree.node_count()));
    for (std::size_t v = 0; v < roots.size(); ++v) roots[v] = static_cast<std::int64_t>(v);
    t.energy = tree_local_energy(tree, avg, leaf_w, p, roots);
  } else {
    const std::int64_t work = g.cell_count() * count_lattice_cubes(g);
    if (work > budget)
      throw BudgetError("general scope needs " + std::to_string(work) + " cell-cube evaluations, budget is " +
                        std::to_string(budget));
    t.cubes = enumerate_cubes(g, GridScope::lattice());
    const LatticeTable avg = lattice_products(ws.sigmas);
    t.energy = lattice_local_energy(avg, ws.omega.density(), p, t.cubes);
    omega_mass.resize(t.cubes.size());
    product_mass_v.resize(t.cubes.size());
    for (std::size_t i = 0; i < m; ++i) t.sigma_mass[i].resize(t.cubes.size());
    for (std::size_t q = 0; q < t.cubes.size(); ++q) {
      omega_mass[q] = ws.omega.mass(t.cubes[q]);
      product_mass_v[q] = ws.product.mass(t.cubes[q]);
      for (std::size_t i = 0; i < m; ++i) t.sigma_mass[i][q] = ws.sigmas[i].mass(t.cubes[q]);
    }
  }

  const std::size_t n = t.cubes.size();
  t.ap_local.resize(n);
  t.sp_ratio.resize(n);
  t.rh_ratio.resize(n);
  for (std::size_t q = 0; q < n; ++q) {
    const double vol = static_cast<double>(t.cubes[q].cells());
    double ap = omega_mass[q] / vol;
    double norm = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double s = t.sigma_mass[i][q];
      ap *= std::pow(s / vol, e.conjugate_share(i));
      norm *= std::pow(s, e.share(i));
    }
    t.ap_local[q] = ap;
    t.sp_ratio[q] = all_sigma_positive(t, q) ? t.energy[q] / norm : 0.0;
    t.rh_ratio[q] = safe_ratio(norm, product_mass_v[q]);
  }
  return t;
}

Witnessed ap_constant(const CubeTable& t) { return sup_over(t.cubes, t.ap_local); }
Witnessed sp_constant(const CubeTable& t) { return sup_over(t.cubes, t.sp_ratio); }
Witnessed rh_constant(const CubeTable& t) { return sup_over(t.cubes, t.rh_ratio); }
Witnessed ap_constant(const WeightSystem& ws, Scope scope) { return ap_constant(compute_cube_table(ws, scope)); }
Witnessed sp_constant(const WeightSystem& ws, Scope scope) { return sp_constant(compute_cube_table(ws, scope)); }
Witnessed rh_constant(const WeightSystem& ws, Scope scope) { return rh_constant(compute_cube_table(ws, scope)); }

std::vector<bool> eligibility(const WeightSystem& ws, const CubeTable& t, double rho, double D) {
  if (!(rho > 1.0)) throw ValidationError("rho", "must exceed 1");
  if (!(D > 1.0)) throw ValidationError("D", "must exceed 1");
  const int n = ws.grid.resolution();
  const int d = ws.grid.d;
  std::vector<bool> out(t.cubes.size(), false);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t qi = 0; qi < static_cast<std::int64_t>(t.cubes.size()); ++qi) {
    const Cube& q = t.cubes[static_cast<std::size_t>(qi)];
    // Minimal admissible side, robust to rho * side landing on an integer.
    const double target = rho * q.side;
    int big = static_cast<int>(std::ceil(target - 1e-9 * target));
    big = std::max(big, q.side + 1);
    if (big > n) continue;
    std::vector<int> lo(d), extent(d);
    for (int c = 0; c < d; ++c) {
      lo[c] = std::max(0, q.corner[c] + q.side - big);
      const int hi = std::min(q.corner[c], n - big);
      extent[c] = hi - lo[c] + 1;
    }
    bool ok = false;
    for (std::size_t i = 0; i < ws.m() && !ok; ++i) {
      const double bound = D * t.sigma_mass[i][static_cast<std::size_t>(qi)];
      // Positions form a box; walk it and stop at the first admissible P.
      std::vector<int> pos(lo);
      while (true) {
        if (ws.sigmas[i].box_mass(pos, big) <= bound) {
          ok = true;
          break;
        }
        int c = d - 1;
        while (c >= 0 && ++pos[c] == lo[c] + extent[c]) {
          pos[c] = lo[c];
          --c;
        }
        if (c < 0) break;
      }
    }
    out[static_cast<std::size_t>(qi)] = ok;
  }
  return out;
}

std::vector<Cube> eligible_cubes(const WeightSystem& ws, Scope scope, double rho, double D) {
  const CubeTable t = compute_cube_table(ws, scope);
  const std::vector<bool> ok = eligibility(ws, t, rho, D);
  std::vector<Cube> out;
  for (std::size_t q = 0; q < ok.size(); ++q)
    if (ok[q]) out.push_back(t.cubes[q]);
  return out;
}

TestingConstant testing_constant(const WeightSystem& ws, const CubeTable& t, double rho, double D) {
  const std::vector<bool> ok = eligibility(ws, t, rho, D);
  TestingConstant out;
  out.rho = rho;
  out.D = D;
  out.sup = sup_over(t.cubes, t.sp_ratio, &ok);
  out.eligible_count = std::count(ok.begin(), ok.end(), true);
  return out;
}

TestingConstant testing_constant(const WeightSystem& ws, Scope scope, double rho, double D) {
  return testing_constant(ws, compute_cube_table(ws, scope), rho, D);
}

std::optional<double> norm_ratio(const WeightSystem& ws, Scope scope, const std::vector<std::vector<double>>& f) {
  const auto inputs = weighted_inputs(ws, f);
  const double p = ws.exponents.p();
  double den = 1.0;
  for (std::size_t i = 0; i < ws.m(); ++i) {
    const double pi = ws.exponents.p_i(i);
    double s = 0.0;
    const auto sigma = ws.sigmas[i].density();
    for (std::size_t x = 0; x < sigma.size(); ++x) {
      const double fx = f.empty() ? 1.0 : f[i][x];
      if (sigma[x] > 0.0 && fx > 0.0) s += std::pow(fx, pi) * sigma[x];
    }
    if (!(s > 0.0)) return std::nullopt;
    den *= std::pow(s, ws.exponents.share(i));
  }
  const std::vector<double> field = field_of(ws.grid, scope, inputs);
  return field_energy(field, ws.omega, p) / den;
}

namespace {

struct IndicatorPass {
  double localized = 0.0;
  std::optional<std::size_t> localized_arg;
  double full = 0.0;
  std::optional<std::size_t> full_arg;
  std::int64_t trials = 0;
};

// f_i = 1_Q substituted into the generic maximal function for every cube Q
// with all sigma_i(Q) > 0.
IndicatorPass indicator_pass(const WeightSystem& ws, Scope scope, const CubeTable& t) {
  const GridConfig& g = ws.grid;
  const int n = g.resolution();
  const double p = ws.exponents.p();
  const std::size_t count = t.cubes.size();
  std::vector<double> local(count, -1.0), full(count, -1.0);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t qi = 0; qi < static_cast<std::int64_t>(count); ++qi) {
    const auto q = static_cast<std::size_t>(qi);
    if (!all_sigma_positive(t, q)) continue;
    const Cube& cube = t.cubes[q];
    std::vector<DiscreteWeight> inputs;
    double den = 1.0;
    for (std::size_t i = 0; i < ws.m(); ++i) {
      std::vector<double> dens(static_cast<std::size_t>(g.cell_count()), 0.0);
      double s = 0.0;
      for_each_point_in(cube.corner, cube.side, [&](std::span<const int> c) {
        const auto x = static_cast<std::size_t>(linear_index(c, n));
        dens[x] = ws.sigmas[i].at(static_cast<std::int64_t>(x));
        s += dens[x];
      });
      den *= std::pow(s, ws.exponents.share(i));
      inputs.emplace_back(g.d, n, std::move(dens), "indicator");
    }
    const std::vector<double> field = field_of(g, scope, inputs);
    double inside = 0.0;
    for_each_point_in(cube.corner, cube.side, [&](std::span<const int> c) {
      const auto x = static_cast<std::size_t>(linear_index(c, n));
      const double w = ws.omega.at(static_cast<std::int64_t>(x));
      if (w > 0.0 && field[x] > 0.0) inside += std::pow(field[x], p) * w;
    });
    local[q] = inside / den;
    full[q] = field_energy(field, ws.omega, p) / den;
  }
  IndicatorPass out;
  for (std::size_t q = 0; q < count; ++q) {
    if (local[q] < 0.0) continue;
    ++out.trials;
    if (!out.localized_arg || local[q] > out.localized) {
      out.localized = local[q];
      out.localized_arg = q;
    }
    if (!out.full_arg || full[q] > out.full) {
      out.full = full[q];
      out.full_arg = q;
    }
  }
  return out;
}

std::vector<std::vector<double>> indicator_functions(const WeightSystem& ws, const Cube& q) {
  const int n = ws.grid.resolution();
  std::vector<std::vector<double>> f(ws.m(), std::vector<double>(static_cast<std::size_t>(ws.grid.cell_count()), 0.0));
  for (std::size_t i = 0; i < ws.m(); ++i)
    for_each_point_in(q.corner, q.side, [&](std::span<const int> c) {
      const auto x = static_cast<std::size_t>(linear_index(c, n));
      if (ws.sigmas[i].at(static_cast<std::int64_t>(x)) > 0.0) f[i][x] = 1.0;
    });
  return f;
}

std::vector<std::vector<double>> random_functions(const WeightSystem& ws, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> f(ws.m(), std::vector<double>(static_cast<std::size_t>(ws.grid.cell_count()), 0.0));
  for (std::size_t i = 0; i < ws.m(); ++i)
    for (std::size_t x = 0; x < f[i].size(); ++x) {
      const double z = normal(rng);  // drawn for every cell so streams do not depend on the support
      if (ws.sigmas[i].at(static_cast<std::int64_t>(x)) > 0.0) f[i][x] = std::exp(z);
    }
  return f;
}

struct Strand {
  double value = -1.0;
  std::vector<std::vector<double>> f;
  std::int64_t trials = 0;
};

Strand climb(const WeightSystem& ws, Scope scope, std::vector<std::vector<double>> f, std::mt19937_64& rng,
             int steps, double step) {
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t i = 0; i < ws.m(); ++i)
    for (std::size_t x = 0; x < f[i].size(); ++x)
      if (ws.sigmas[i].at(static_cast<std::int64_t>(x)) > 0.0 && f[i][x] > 0.0) coords.emplace_back(i, x);
  Strand s;
  const auto r0 = norm_ratio(ws, scope, f);
  ++s.trials;
  s.value = r0 ? *r0 : -1.0;
  s.f = f;
  if (coords.empty()) return s;
  std::uniform_int_distribution<std::size_t> pick(0, coords.size() - 1);
  std::bernoulli_distribution up(0.5);
  const double factor = std::exp(step);
  for (int k = 0; k < steps; ++k) {
    const auto [i, x] = coords[pick(rng)];
    const double old = f[i][x];
    f[i][x] = up(rng) ? old * factor : old / factor;
    const auto r = norm_ratio(ws, scope, f);
    ++s.trials;
    if (r && *r > s.value) {
      s.value = *r;
      s.f = f;
    } else {
      f[i][x] = old;
    }
  }
  return s;
}

}  // namespace

NormLower norm_lower(const WeightSystem& ws, Scope scope, const NormSearchOptions& opts, std::int64_t budget) {
  NormLower out;
  out.strategy = opts.strategy;
  bool found = false;

  if (opts.strategy != Strategy::random) {
    const CubeTable t = compute_cube_table(ws, scope, budget);
    const IndicatorPass pass = indicator_pass(ws, scope, t);
    out.trials += pass.trials;
    if (pass.localized_arg) {
      found = true;
      out.indicators_value = pass.localized;
      out.value = pass.localized;
      out.witness_cube = t.cubes[*pass.localized_arg];
      out.witness_f = indicator_functions(ws, *out.witness_cube);
    }
    if (opts.strategy == Strategy::ascent) {
      std::vector<std::vector<double>> seed_f;
      if (pass.full_arg) {
        if (pass.full > out.value) {
          out.value = pass.full;
          out.witness_cube = t.cubes[*pass.full_arg];
          out.witness_f = indicator_functions(ws, *out.witness_cube);
        }
        seed_f = indicator_functions(ws, t.cubes[*pass.full_arg]);
      }
      // Strand 0 climbs from the best full-domain indicator, the rest from random starts.
      const int strands = std::max(1, opts.starts);
      std::vector<Strand> results(static_cast<std::size_t>(strands));
#pragma omp parallel for schedule(dynamic, 1)
      for (int s = 0; s < strands; ++s) {
        std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                          static_cast<std::uint32_t>(s)};
        std::mt19937_64 rng(seq);
        auto start = (s == 0 && !seed_f.empty()) ? seed_f : random_functions(ws, rng);
        results[static_cast<std::size_t>(s)] = climb(ws, scope, std::move(start), rng, opts.steps, opts.step);
      }
      for (const Strand& s : results) {
        out.trials += s.trials;
        if (s.value > out.value || (!found && s.value >= 0.0)) {
          found = true;
          out.value = s.value;
          out.witness_cube.reset();
          out.witness_f = s.f;
        }
      }
    }
  } else {
    const int starts = std::max(1, opts.starts);
    std::vector<Strand> results(static_cast<std::size_t>(starts));
#pragma omp parallel for schedule(dynamic, 1)
    for (int s = 0; s < starts; ++s) {
      std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                        static_cast<std::uint32_t>(s)};
      std::mt19937_64 rng(seq);
      Strand st;
      st.f = random_functions(ws, rng);
      const auto r = norm_ratio(ws, scope, st.f);
      st.trials = 1;
      st.value = r ? *r : -1.0;
      results[static_cast<std::size_t>(s)] = std::move(st);
    }
    for (const Strand& s : results) {
      out.trials += s.trials;
      if (s.value >= 0.0 && (!found || s.value > out.value)) {
        found = true;
        out.value = s.value;
        out.witness_f = s.f;
      }
    }
  }
  if (!found) throw DomainError("degenerate system: every trial function has a vanishing norm");
  return out;
}

nlohmann::json Check::to_json() const {
  nlohmann::json j{{"name", name}, {"lhs", number_json(lhs)}, {"rhs", number_json(rhs)}, {"holds", holds}};
  j["ratio"] = number_json(safe_ratio(lhs, rhs));
  return j;
}

Check make_check(std::string name, double lhs, double rhs, double tol) {
  return {std::move(name), lhs, rhs, leq_rel(lhs, rhs, tol)};
}

Check make_equality(std::string name, double lhs, double rhs, double tol) {
  return {std::move(name), lhs, rhs, leq_rel(lhs, rhs, tol) && leq_rel(rhs, lhs, tol)};
}

bool ConstantsReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.holds; });
}

std::optional<double> ConstantsReport::certificate_ratio() const {
  if (!(certificate > 0.0) || std::isinf(certificate)) return std::nullopt;
  return norm.value / certificate;
}

nlohmann::json ConstantsReport::to_json(const GridConfig& g) const {
  auto witnessed = [&](const Witnessed& w) {
    return nlohmann::json{{"value", number_json(w.value)}, {"witness", cube_json(g, w.witness)}};
  };
  nlohmann::json j;
  j["scope"] = to_string(scope);
  j["a_p"] = witnessed(ap);
  j["s_p"] = witnessed(sp);
  j["rh"] = witnessed(rh);
  j["testing"] = witnessed(testing.sup);
  j["testing"]["rho"] = number_json(testing.rho);
  j["testing"]["D"] = number_json(testing.D);
  j["testing"]["eligible_count"] = testing.eligible_count;
  j["norm_lower"] = {{"value", number_json(norm.value)},
                     {"strategy", to_string(norm.strategy)},
                     {"trials", norm.trials},
                     {"witness_cube", cube_json(g, norm.witness_cube)},
                     {"indicators_value", norm.indicators_value ? number_json(*norm.indicators_value)
                                                                : nlohmann::json(nullptr)}};
  j["certificate"] = number_json(certificate);
  const auto r = certificate_ratio();
  j["certificate_ratio"] = r ? number_json(*r) : nlohmann::json(nullptr);
  j["checks"] = nlohmann::json::array();
  for (const Check& c : checks) j["checks"].push_back(c.to_json());
  j["passed"] = passed();
  return j;
}

ConstantsReport compute_constants(const WeightSystem& ws, const ConstantsOptions& opts) {
  ConstantsReport r;
  r.scope = opts.scope;
  const CubeTable t = compute_cube_table(ws, opts.scope, opts.budget);
  r.ap = ap_constant(t);
  r.sp = sp_constant(t);
  r.rh = rh_constant(t);
  const double D = opts.D ? *opts.D : default_doubling(ws.grid.d, ws.grid.nu, ws.exponents);
  r.testing = testing_constant(ws, t, opts.rho, D);
  r.norm = norm_lower(ws, opts.scope, opts.search, opts.budget);
  r.certificate = (r.ap.value + r.testing.sup.value) * r.rh.value;
  if (r.rh.value == kInf && r.ap.value + r.testing.sup.value == 0.0) r.certificate = kInf;

  r.checks.push_back(make_check("ap <= sp", r.ap.value, r.sp.value));
  r.checks.push_back(make_check("testing <= sp", r.testing.sup.value, r.sp.value));
  if (r.norm.indicators_value) {
    r.checks.push_back(make_equality("sp == norm_lower(indicators)", r.sp.value, *r.norm.indicators_value));
    r.checks.push_back(make_check("norm_lower(indicators) <= norm_lower", *r.norm.indicators_value, r.norm.value));
  }
  return r;
}

}  // namespace mwt
