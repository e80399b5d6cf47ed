#include "mwt/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mwt/error.hpp"
#include "mwt/kernels.hpp"
#include "mwt/report.hpp"

namespace mwt {

namespace {

constexpr double kBoundTol = 1e-10;

double ipow(double base, double e) { return std::pow(base, e); }

// Tail of the zeta series past k.
double zeta_tail(double q, int k) {
  double head = 0.0;
  for (int s = 1; s <= k; ++s) head += std::pow(static_cast<double>(s), -q);
  return std::riemann_zeta(q) - head;
}

// a_Q = w(E_Q) prod_i <sigma_i>_Q^p.
double coefficient(const DecompositionContext& ctx, const SparseCube& c) {
  const WeightSystem& ws = *ctx.ws;
  double we = 0.0;
  for (std::int64_t x : c.e_cells) we += ws.omega.at(x);
  if (!(we > 0.0)) return 0.0;
  const double vol = static_cast<double>(c.cube.cells());
  const double p = ws.exponents.p();
  double prod = we;
  for (std::size_t i = 0; i < ws.m(); ++i)
    prod *= std::pow(ctx.table.sigma_mass[i][static_cast<std::size_t>(c.node)] / vol, p);
  return prod;
}

bool top_flag(const DecompositionContext& ctx, TopMode mode, std::int64_t node) {
  if (mode == TopMode::eligibility) return ctx.parent_doubling[static_cast<std::size_t>(node)];
  const double cand = ctx.candidate ? *ctx.candidate : ctx.testing;
  return leq_rel(ctx.table.sp_ratio[static_cast<std::size_t>(node)], cand, 1e-12);
}

BoundCheck make_bound(std::string name, double lhs, double constant, double integral) {
  BoundCheck b{std::move(name), lhs, constant, constant * integral, false};
  if (constant == 0.0 || integral == 0.0) b.rhs = 0.0;
  b.holds = leq_rel(b.lhs, b.rhs, kBoundTol);
  return b;
}

}  // namespace

double ProofParameters::phi(int n) const { return std::pow(static_cast<double>(n), q); }

nlohmann::json ProofParameters::to_json() const {
  return {{"d", d},
          {"nu", nu},
          {"m", m},
          {"p", number_json(p)},
          {"q", number_json(q)},
          {"rho", number_json(rho)},
          {"D", number_json(D)},
          {"t", number_json(t)},
          {"e", number_json(e)},
          {"k", k},
          {"diagnostic", diagnostic}};
}

int minimal_k(double e, int nu, double q) {
  if (!(e > 0.0)) return 1;
  const long double lnu = std::log(static_cast<long double>(nu));
  auto g = [&](int n) { return static_cast<long double>(e) * n * lnu - static_cast<long double>(q) * std::log(static_cast<long double>(n)); };
  // g is convex with its minimum at q / (e ln nu); past that point it increases.
  const long double turn = static_cast<long double>(q) / (static_cast<long double>(e) * lnu);
  int last = 0;
  for (int n = 1;; ++n) {
    const bool fails = !(g(n) > 0.0L);
    if (fails) last = n;
    if (n > turn && !fails) break;
  }
  return last + 1;
}

ProofParameters choose_parameters(int d, int nu, const ExponentVector& e, double q, double rho,
                                  std::optional<double> D, std::optional<double> t, bool diagnostic) {
  if (D && t) throw ValidationError("D", "give D or t, not both");
  if (!(q > 1.0)) throw ValidationError("q", "must exceed 1");
  if (!(rho > 1.0) || rho > nu) throw ValidationError("rho", "must lie in (1, nu]");
  ProofParameters pp;
  pp.d = d;
  pp.nu = nu;
  pp.m = e.m();
  pp.p = e.p();
  pp.q = q;
  pp.rho = rho;
  pp.diagnostic = diagnostic;
  const double mp = static_cast<double>(pp.m) * pp.p;
  if (!(mp > 1.0)) throw ValidationError("p", "mp must exceed 1");
  if (!D && !t) {
    pp.t = 2.0 * mp / (mp - 1.0);
    pp.D = default_doubling(d, nu, e);
    pp.e = d * mp;
  } else {
    if (D) {
      if (!(*D > 1.0)) throw ValidationError("D", "must exceed 1");
      pp.D = *D;
      pp.t = t_from_doubling(d, nu, *D);
    } else {
      pp.t = *t;
      pp.D = doubling_from_t(d, nu, *t);
    }
    if (!diagnostic && !t_condition(pp.t, e))
      throw ValidationError(D ? "D" : "t", "requires (t - 1)(mp - 1) - 1 > 0 with D = nu^(d t); pass --diagnostic to override");
    pp.e = d * ((pp.t - 1.0) * (mp - 1.0) - 1.0);
  }
  pp.k = minimal_k(pp.e, nu, q);
  return pp;
}

std::string to_string(Collection c) {
  switch (c) {
    case Collection::testing: return "testing";
    case Collection::top: return "top";
    case Collection::small: return "small";
    case Collection::remaining: return "remaining";
  }
  return "remaining";
}

std::string to_string(TopMode m) { return m == TopMode::eligibility ? "eligibility" : "numeric"; }

TopMode parse_top_mode(const std::string& text) {
  if (text == "eligibility") return TopMode::eligibility;
  if (text == "numeric") return TopMode::numeric;
  throw ValidationError("mode", "expected eligibility or numeric, got '" + text + "'");
}

std::size_t Partition::count(Collection c) const {
  return static_cast<std::size_t>(
      std::count_if(cubes.begin(), cubes.end(), [c](const ClassifiedCube& x) { return x.collection == c; }));
}

std::size_t Partition::distinct_top() const {
  std::set<std::int64_t> nodes;
  for (const auto& x : cubes)
    if (x.collection == Collection::top) nodes.insert(x.cube->node);
  return nodes.size();
}

nlohmann::json Partition::to_json(const GridConfig& g) const {
  nlohmann::json j{{"root", cube_json(g, root)}, {"mode", to_string(mode)}, {"top_star_count", top_star.size()}};
  nlohmann::json counts;
  for (Collection c : {Collection::testing, Collection::top, Collection::small, Collection::remaining})
    counts[to_string(c)] = count(c);
  j["counts"] = counts;
  j["top_distinct"] = distinct_top();
  j["cubes"] = nlohmann::json::array();
  for (const auto& x : cubes)
    j["cubes"].push_back({{"k", x.cube->k}, {"j", x.cube->j}, {"n", x.n}, {"collection", to_string(x.collection)}});
  return j;
}

DecompositionContext make_context(const WeightSystem& ws, const ProofParameters& params,
                                  std::optional<double> candidate) {
  DecompositionContext ctx;
  ctx.ws = &ws;
  ctx.params = params;
  ctx.table = compute_cube_table(ws, Scope::dyadic);
  ctx.candidate = candidate;
  ctx.a_p = ap_constant(ctx.table).value;
  ctx.rh = rh_constant(ctx.table).value;
  ctx.testing = testing_constant(ws, ctx.table, params.rho, params.D).sup.value;

  ctx.tree = std::make_shared<const TreeLayout>(ws.grid);
  const TreeLayout& tree = *ctx.tree;
  const auto count = static_cast<std::size_t>(tree.node_count());
  ctx.parent_doubling.assign(count, false);
  for (std::size_t v = 1; v < count; ++v) {
    const auto par = static_cast<std::size_t>(tree.parent(static_cast<std::int64_t>(v)));
    for (std::size_t i = 0; i < ws.m(); ++i)
      if (ctx.table.sigma_mass[i][par] <= params.D * ctx.table.sigma_mass[i][v]) {
        ctx.parent_doubling[v] = true;
        break;
      }
  }
  return ctx;
}

Partition partition(const DecompositionContext& ctx, const SparseFamily& family, const Cube& root, TopMode mode) {
  const TreeLayout& tree = *ctx.tree;
  if (!(root.grid == GridId::standard())) throw DomainError("partition root must be a standard-grid cube");
  Partition part;
  part.root = root;
  part.root_node = tree.node_of(root);
  part.mode = mode;
  const int root_level = root.level;

  // Maximal flagged nodes of the subtree of R.
  std::vector<std::int64_t> stack{part.root_node};
  while (!stack.empty()) {
    const std::int64_t v = stack.back();
    stack.pop_back();
    if (top_flag(ctx, mode, v)) {
      part.top_star.push_back(v);
      continue;
    }
    const auto ch = tree.children(v);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  std::sort(part.top_star.begin(), part.top_star.end());

  for (const SparseCube* c : family.cubes()) {
    const int n = c->cube.level - root_level;
    if (n < 0) continue;
    // Walk the chain Q = Q^(0), ..., Q^(n); Q lies inside R iff Q^(n) = R.
    bool testing = false;
    std::int64_t v = c->node;
    for (int j = 0; j < n; ++j) {
      testing = testing || top_flag(ctx, mode, v);
      v = tree.parent(v);
    }
    if (v != part.root_node) continue;
    testing = testing || top_flag(ctx, mode, v);

    ClassifiedCube x{c, n, Collection::remaining};
    if (testing)
      x.collection = Collection::testing;
    else if (n <= ctx.params.k)
      x.collection = Collection::top;
    else if (ctx.table.ap_local[static_cast<std::size_t>(c->node)] <= ctx.a_p / ctx.params.phi(n))
      x.collection = Collection::small;
    part.cubes.push_back(x);
  }
  return part;
}

nlohmann::json EmptinessReport::to_json() const {
  return {{"empty", empty}, {"remaining", remaining}, {"certificate", certificate}};
}

EmptinessReport verify_empty(const DecompositionContext& ctx, const Partition& part) {
  EmptinessReport r;
  r.remaining = part.count(Collection::remaining);
  r.empty = r.remaining == 0;
  if (r.empty) return r;

  const WeightSystem& ws = *ctx.ws;
  const GridConfig& g = ws.grid;
  const ProofParameters& pp = ctx.params;
  const TreeLayout& tree = *ctx.tree;
  const auto it = std::find_if(part.cubes.begin(), part.cubes.end(),
                               [](const ClassifiedCube& x) { return x.collection == Collection::remaining; });
  const SparseCube& q = *it->cube;
  const int n = it->n;

  nlohmann::json chain = nlohmann::json::array();
  bool doubling_fails_everywhere = true;
  std::int64_t v = q.node;
  for (int j = 0; j <= n; ++j) {
    nlohmann::json step{{"j", j}, {"cube", cube_json(g, tree.cube(v))}};
    if (j < n) {
      const auto par = static_cast<std::size_t>(tree.parent(v));
      nlohmann::json ratios = nlohmann::json::array();
      for (std::size_t i = 0; i < ws.m(); ++i) {
        const double num = ctx.table.sigma_mass[i][par];
        const double den = ctx.table.sigma_mass[i][static_cast<std::size_t>(v)];
        const double ratio = den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
        ratios.push_back(number_json(ratio));
        if (!(ratio > pp.D)) doubling_fails_everywhere = false;
      }
      step["doubling_ratios"] = ratios;
      v = static_cast<std::int64_t>(par);
    }
    chain.push_back(step);
  }

  const double mp = static_cast<double>(pp.m) * pp.p;
  const double nu_d = std::pow(static_cast<double>(pp.nu), pp.d);
  const double vol_r = static_cast<double>(part.root.cells());
  const auto qn = static_cast<std::size_t>(q.node);
  double doubled = ipow(pp.D, n * (mp - 1.0)) * ws.omega.mass(q.cube) / vol_r;
  for (std::size_t i = 0; i < ws.m(); ++i)
    doubled *= std::pow(ctx.table.sigma_mass[i][qn] / vol_r, ws.exponents.conjugate_share(i));
  const double scale = ipow(nu_d, -n) * ipow(pp.D / nu_d, n * (mp - 1.0));
  const double a_loc_q = ctx.table.ap_local[qn];
  const double growth = std::pow(static_cast<double>(pp.nu), pp.e * n) / pp.phi(n);

  r.certificate = {
      {"cube", cube_json(g, q.cube)},
      {"k", q.k},
      {"j", q.j},
      {"n", n},
      {"ancestors", chain},
      {"doubling_fails_on_chain", doubling_fails_everywhere},
      {"values",
       {{"a_p", number_json(ctx.a_p)},
        {"a_loc_root", number_json(ctx.table.ap_local[static_cast<std::size_t>(part.root_node)])},
        {"doubled_lower", number_json(doubled)},
        {"scaled_a_loc", number_json(scale * a_loc_q)},
        {"scaled_small_threshold", number_json(scale * ctx.a_p / pp.phi(n))},
        {"growth_bound", number_json(growth * ctx.a_p)},
        {"a_loc_cube", number_json(a_loc_q)},
        {"small_threshold", number_json(ctx.a_p / pp.phi(n))},
        {"growth_factor", number_json(growth)}}},
      {"parameters", pp.to_json()}};
  return r;
}

nlohmann::json BoundCheck::to_json() const {
  return {{"name", name},
          {"lhs", number_json(lhs)},
          {"constant", number_json(constant)},
          {"rhs", number_json(rhs)},
          {"ratio", number_json(rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0))},
          {"holds", holds}};
}

bool CollectionBounds::passed() const {
  if (!top_count_holds) return false;
  return !applicable || (testing.holds && top.holds && small.holds);
}

nlohmann::json CollectionBounds::to_json() const {
  return {{"applicable", applicable},
          {"integral", number_json(integral)},
          {"testing", testing.to_json()},
          {"top", top.to_json()},
          {"small", small.to_json()},
          {"top_distinct", top_distinct},
          {"top_cap", number_json(top_cap)},
          {"top_count_holds", top_count_holds},
          {"passed", passed()}};
}

CollectionBounds verify_collection_bounds(const DecompositionContext& ctx, const Partition& part) {
  const ProofParameters& pp = ctx.params;
  CollectionBounds b;
  b.integral = ctx.ws->product.mass(part.root);
  b.applicable = std::isfinite(ctx.rh);
  b.top_distinct = part.distinct_top();
  b.top_cap = 2.0 * std::pow(static_cast<double>(pp.nu), pp.d * (pp.k + 1.0));
  b.top_count_holds = static_cast<double>(b.top_distinct) <= b.top_cap;

  // Repeated generations of one cube have disjoint E sets, so the multiset
  // sums below are bounded by the distinct-cube sums the argument uses.
  double sum_t = 0.0;
  double sum_u = 0.0;
  double sum_a = 0.0;
  for (const auto& x : part.cubes) {
    const double a = coefficient(ctx, *x.cube);
    switch (x.collection) {
      case Collection::testing: sum_t += a; break;
      case Collection::top: sum_u += a; break;
      case Collection::small: sum_a += a; break;
      case Collection::remaining: break;
    }
  }
  const double rh = b.applicable ? ctx.rh : std::numeric_limits<double>::infinity();
  const double p_const = part.mode == TopMode::numeric && ctx.candidate ? *ctx.candidate : ctx.testing;
  b.testing = make_bound("testing", sum_t, p_const * rh, b.integral);
  b.top = make_bound("top", sum_u, b.top_cap * ctx.a_p * rh, b.integral);
  b.small = make_bound("small", sum_a, zeta_tail(pp.q, pp.k) * ctx.a_p * rh, b.integral);
  return b;
}

bool TheoremReport::passed() const {
  return std::all_of(roots.begin(), roots.end(),
                     [](const RootResult& r) { return r.emptiness.empty && r.bounds.passed(); });
}

nlohmann::json TheoremReport::to_json(const GridConfig& g) const {
  nlohmann::json j{{"parameters", params.to_json()},
                   {"a_p", number_json(a_p)},
                   {"rh", number_json(rh)},
                   {"testing", number_json(testing)},
                   {"sparse_cubes", sparse_cubes},
                   {"root_count", roots.size()}};
  j["roots"] = nlohmann::json::array();
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const RootResult& r = roots[i];
    nlohmann::json rj;
    if (roots.size() == 1) {
      rj["partition"] = r.partition.to_json(g);
    } else {
      nlohmann::json counts;
      for (Collection c : {Collection::testing, Collection::top, Collection::small, Collection::remaining})
        counts[to_string(c)] = r.partition.count(c);
      rj["partition"] = {{"root", cube_json(g, r.partition.root)}, {"counts", counts}};
    }
    rj["emptiness"] = r.emptiness.to_json();
    rj["bounds"] = r.bounds.to_json();
    j["roots"].push_back(rj);
  }
  j["passed"] = passed();
  return j;
}

TheoremReport verify_theorem(const WeightSystem& ws, const TheoremOptions& opts) {
  TheoremReport rep;
  rep.params = choose_parameters(ws.grid.d, ws.grid.nu, ws.exponents, opts.q, opts.rho, opts.D, opts.t, opts.diagnostic);
  const DecompositionContext ctx = make_context(ws, rep.params, opts.candidate);
  rep.a_p = ctx.a_p;
  rep.rh = ctx.rh;
  rep.testing = ctx.testing;
  rep.family = std::make_shared<const SparseFamily>(build_sparse(ws, opts.f));
  const SparseFamily& family = *rep.family;
  rep.sparse_cubes = family.cube_count();

  std::vector<Cube> roots;
  if (opts.all_roots)
    roots = enumerate_cubes(ws.grid, GridScope::standard());
  else
    roots.push_back(opts.root ? *opts.root : root_cube(ws.grid));
  for (const Cube& r : roots) {
    RootResult res;
    res.partition = partition(ctx, family, r, opts.mode);
    res.emptiness = verify_empty(ctx, res.partition);
    res.bounds = verify_collection_bounds(ctx, res.partition);
    rep.roots.push_back(std::move(res));
  }
  return rep;
}

}  // namespace mwt
