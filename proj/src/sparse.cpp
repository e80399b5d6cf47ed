#include "mwt/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mwt/constants.hpp"
#include "mwt/error.hpp"
#include "mwt/index.hpp"
#include "mwt/kernels.hpp"
#include "mwt/report.hpp"

namespace mwt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::int64_t> cells_of(const GridConfig& g, const Cube& q) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(q.cells()));
  for_each_point_in(q.corner, q.side, [&](std::span<const int> c) { out.push_back(linear_index(c, g.resolution())); });
  return out;
}

// [start, length] runs of a sorted index list.
nlohmann::json runs(const std::vector<std::int64_t>& sorted) {
  nlohmann::json out = nlohmann::json::array();
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[j - 1] + 1) ++j;
    out.push_back({sorted[i], static_cast<std::int64_t>(j - i)});
    i = j;
  }
  return out;
}

double threshold(double tau, double a, int k) { return tau * std::pow(a, k); }

// prod_i (g_i(Q) / sigma_i(Q))^p for every coefficient cube.
std::vector<double> average_ratios(const WeightSystem& ws, const std::vector<DiscreteWeight>& g,
                                   const std::vector<Coefficient>& coeffs) {
  const double p = ws.exponents.p();
  std::vector<double> out(coeffs.size(), 1.0);
  for (std::size_t q = 0; q < coeffs.size(); ++q)
    for (std::size_t i = 0; i < ws.m(); ++i) {
      const double s = ws.sigmas[i].mass(coeffs[q].cube);
      const double num = g[i].mass(coeffs[q].cube);
      out[q] *= s > 0.0 ? std::pow(num / s, p) : 0.0;
    }
  return out;
}

double ordered_sum(const std::vector<Coefficient>& coeffs, const std::vector<double>& ratios) {
  double s = 0.0;
  for (std::size_t q = 0; q < coeffs.size(); ++q)
    if (coeffs[q].value > 0.0) s += coeffs[q].value * ratios[q];
  return s;
}

}  // namespace

double default_base(int d, int nu, std::size_t m) {
  return std::pow(2.0, static_cast<double>(m)) * std::pow(static_cast<double>(nu), d * static_cast<double>(m));
}

std::size_t SparseFamily::cube_count() const {
  std::size_t n = 0;
  for (const auto& gen : generations) n += gen.cubes.size();
  return n;
}

std::vector<const SparseCube*> SparseFamily::cubes() const {
  std::vector<const SparseCube*> out;
  for (const auto& gen : generations)
    for (const auto& c : gen.cubes) out.push_back(&c);
  return out;
}

nlohmann::json SparseFamily::to_json(const GridConfig& g) const {
  nlohmann::json j{{"base", number_json(base)}, {"tau", number_json(tau)}, {"cube_count", cube_count()}};
  j["generations"] = nlohmann::json::array();
  for (const auto& gen : generations) {
    nlohmann::json jg{{"k", gen.k},
                      {"threshold", number_json(gen.threshold)},
                      {"omega_cells", gen.omega_cells.size()},
                      {"omega_runs", runs(gen.omega_cells)}};
    jg["cubes"] = nlohmann::json::array();
    for (const auto& c : gen.cubes)
      jg["cubes"].push_back({{"j", c.j},
                             {"cube", cube_json(g, c.cube)},
                             {"product", number_json(c.product)},
                             {"q_cells", c.cube.cells()},
                             {"e_cells", c.e_cells.size()},
                             {"e_runs", runs(c.e_cells)}});
    j["generations"].push_back(std::move(jg));
  }
  return j;
}

nlohmann::json SparseInvariants::to_json() const {
  return {{"disjoint", disjoint},         {"nested", nested},   {"half_overlap", half_overlap},
          {"e_sets", e_sets},             {"worst_k", worst_k}, {"worst_j", worst_j},
          {"max_overlap_cells", max_overlap_cells}};
}

SparseInvariants check_invariants(const GridConfig& g, const SparseFamily& family) {
  SparseInvariants inv;
  const auto cells = static_cast<std::size_t>(g.cell_count());
  std::vector<int> e_hits(cells, 0);
  bool first_cube = true;
  auto flag = [&](bool& which, int k, int j) {
    if (which) {
      inv.worst_k = k;
      inv.worst_j = j;
    }
    which = false;
  };
  for (std::size_t gi = 0; gi < family.generations.size(); ++gi) {
    const Generation& gen = family.generations[gi];
    std::vector<char> in_omega(cells, 0), in_next(cells, 0);
    for (auto x : gen.omega_cells) in_omega[static_cast<std::size_t>(x)] = 1;
    if (gi + 1 < family.generations.size())
      for (auto x : family.generations[gi + 1].omega_cells) in_next[static_cast<std::size_t>(x)] = 1;

    std::vector<int> q_hits(cells, 0);
    for (const SparseCube& c : gen.cubes) {
      std::int64_t overlap = 0;
      for (auto x : cells_of(g, c.cube)) {
        if (++q_hits[static_cast<std::size_t>(x)] > 1) flag(inv.disjoint, gen.k, c.j);
        overlap += in_next[static_cast<std::size_t>(x)];
      }
      const std::int64_t excess = 2 * overlap - c.cube.cells();
      if (first_cube || excess > inv.max_overlap_cells) inv.max_overlap_cells = excess;
      first_cube = false;
      if (excess > 0) flag(inv.half_overlap, gen.k, c.j);
      for (auto x : c.e_cells) {
        if (++e_hits[static_cast<std::size_t>(x)] > 1 || in_next[static_cast<std::size_t>(x)] ||
            !c.cube.contains_cell(unlinear_index(x, g.d, g.resolution())))
          flag(inv.e_sets, gen.k, c.j);
      }
      if (c.cube.cells() > 2 * static_cast<std::int64_t>(c.e_cells.size())) flag(inv.e_sets, gen.k, c.j);
    }
    for (std::size_t x = 0; x < cells; ++x) {
      if ((q_hits[x] > 0) != (in_omega[x] != 0)) flag(inv.nested, gen.k, -1);
      if (in_next[x] && !in_omega[x]) flag(inv.nested, gen.k, -1);
    }
  }
  return inv;
}

SparseFamily build_sparse(const WeightSystem& ws, const std::vector<std::vector<double>>& f,
                          std::optional<double> base) {
  const GridConfig& g = ws.grid;
  const auto inputs = weighted_inputs(ws, f);
  const TreeLayout tree(g);
  std::vector<std::vector<double>> masses;
  for (const auto& w : inputs) masses.push_back(tree_masses(tree, w.density()));
  const std::vector<double> prod = tree_products(tree, masses);
  const LeafMax leaf = tree_running_max(tree, prod);

  SparseFamily fam;
  fam.base = base ? *base : default_base(g.d, g.nu, ws.m());
  if (!(fam.base > 1.0) || !std::isfinite(fam.base)) throw ValidationError("base", "must be a finite number > 1");
  const auto cells = static_cast<std::size_t>(g.cell_count());
  fam.field.resize(cells);
  for (std::size_t x = 0; x < cells; ++x)
    fam.field[x] = leaf.value[static_cast<std::size_t>(tree.leaf_of_cell()[x])];

  double max_v = 0.0;
  for (double v : fam.field) max_v = std::max(max_v, v);
  // The root product is positive exactly when the field is positive somewhere.
  if (!(max_v > 0.0) || !(prod[0] > 0.0)) return fam;

  const double a = fam.base;
  fam.tau = prod[0] / std::pow(static_cast<double>(g.nu), g.d * static_cast<double>(ws.m()));
  int k = 0;
  for (; threshold(fam.tau, a, k) < max_v; ++k) {
    Generation gen;
    gen.k = k;
    gen.threshold = threshold(fam.tau, a, k);
    for (std::size_t x = 0; x < cells; ++x)
      if (fam.field[x] > gen.threshold) gen.omega_cells.push_back(static_cast<std::int64_t>(x));
    std::vector<std::int64_t> stack{0}, picked;
    while (!stack.empty()) {
      const std::int64_t v = stack.back();
      stack.pop_back();
      if (prod[static_cast<std::size_t>(v)] > gen.threshold) {
        picked.push_back(v);
      } else if (tree.level_of(v) < tree.levels()) {
        for (auto c : tree.children(v)) stack.push_back(c);
      }
    }
    std::sort(picked.begin(), picked.end());
    for (std::size_t j = 0; j < picked.size(); ++j) {
      SparseCube c;
      c.k = k;
      c.j = static_cast<int>(j);
      c.node = picked[j];
      c.cube = tree.cube(picked[j]);
      c.product = prod[static_cast<std::size_t>(picked[j])];
      gen.cubes.push_back(std::move(c));
    }
    fam.generations.push_back(std::move(gen));
  }
  for (auto& gen : fam.generations) {
    const double next = threshold(fam.tau, a, gen.k + 1);
    for (auto& c : gen.cubes)
      for (auto x : cells_of(g, c.cube))
        if (!(fam.field[static_cast<std::size_t>(x)] > next)) c.e_cells.push_back(x);
  }

  const SparseInvariants inv = check_invariants(g, fam);
  if (!inv.all()) {
    nlohmann::json detail{{"base", number_json(a)}, {"tau", number_json(fam.tau)}, {"invariants", inv.to_json()}};
    throw VerificationFailure("sparse family invariant violated at (k, j) = (" + std::to_string(inv.worst_k) + ", " +
                                  std::to_string(inv.worst_j) + ") with base " + std::to_string(a),
                              detail);
  }
  return fam;
}

std::vector<Coefficient> coefficients(const WeightSystem& ws, const SparseFamily& family) {
  const double p = ws.exponents.p();
  std::vector<Coefficient> out;
  for (const SparseCube* c : family.cubes()) {
    double we = 0.0;
    for (auto x : c->e_cells) we += ws.omega.at(x);
    double prod = 1.0;
    for (const auto& s : ws.sigmas) prod *= std::pow(s.average(c->cube), p);
    out.push_back({c->k, c->j, c->cube, we * prod});
  }
  return out;
}

nlohmann::json DominationReport::to_json() const {
  return {{"lhs", number_json(lhs)},
          {"sum", number_json(sum)},
          {"constant", number_json(constant)},
          {"rhs", number_json(constant * sum)},
          {"ratio", number_json(sum > 0.0 ? lhs / (constant * sum) : (lhs > 0.0 ? kInf : 0.0))},
          {"holds", holds}};
}

DominationReport domination_check(const WeightSystem& ws, const std::vector<std::vector<double>>& f,
                                  const SparseFamily& family) {
  const double p = ws.exponents.p();
  const auto g = weighted_inputs(ws, f);
  const auto coeffs = coefficients(ws, family);
  DominationReport r;
  r.lhs = field_energy(family.field, ws.omega, p);
  r.sum = ordered_sum(coeffs, average_ratios(ws, g, coeffs));
  r.constant = std::pow(family.base, p);
  r.holds = leq_rel(r.lhs, r.constant * r.sum, 1e-12);
  return r;
}

DominationReport domination_check(const WeightSystem& ws, const std::vector<std::vector<double>>& f) {
  return domination_check(ws, f, build_sparse(ws, f));
}

nlohmann::json CarlesonReport::to_json(const GridConfig& g) const {
  return {{"lhs", number_json(lhs)},
          {"a_star", number_json(a_star)},
          {"a_star_witness", cube_json(g, a_star_witness)},
          {"conjugate_factor", number_json(conjugate_factor)},
          {"norm_product", number_json(norm_product)},
          {"rhs", number_json(rhs)},
          {"ratio", number_json(rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? kInf : 0.0))},
          {"vacuous", vacuous},
          {"holds", holds},
          {"lambda", number_json(lambda)},
          {"lhs_scaled", number_json(lhs_scaled)},
          {"scaling_holds", scaling_holds}};
}

CarlesonReport carleson_check(const WeightSystem& ws, const std::vector<Coefficient>& coeffs,
                              const std::vector<std::vector<double>>& f, double lambda) {
  const GridConfig& g = ws.grid;
  const ExponentVector& e = ws.exponents;
  const double p = e.p();
  const auto cells = static_cast<std::size_t>(g.cell_count());
  CarlesonReport r;
  r.lambda = lambda;

  const auto inputs = weighted_inputs(ws, f);
  r.lhs = ordered_sum(coeffs, average_ratios(ws, inputs, coeffs));

  // Subtree sums of a_Q over the standard grid, then the Carleson ratio per R.
  const TreeLayout tree(g);
  std::vector<double> total(static_cast<std::size_t>(tree.node_count()), 0.0);
  for (const auto& c : coeffs) {
    if (c.cube.grid.kind != GridKind::standard) throw DomainError("carleson_check: coefficients must sit on the standard grid");
    total[static_cast<std::size_t>(tree.node_of(c.cube))] += c.value;
  }
  for (std::int64_t v = tree.node_count() - 1; v > 0; --v)
    total[static_cast<std::size_t>(tree.parent(v))] += total[static_cast<std::size_t>(v)];
  const std::vector<double> den = tree_masses(tree, ws.product.density());
  for (std::int64_t v = 0; v < tree.node_count(); ++v) {
    const double num = total[static_cast<std::size_t>(v)], d = den[static_cast<std::size_t>(v)];
    const double ratio = d > 0.0 ? num / d : (num > 0.0 ? kInf : 0.0);
    if (!r.a_star_witness || ratio > r.a_star) {
      r.a_star = ratio;
      r.a_star_witness = tree.cube(v);
    }
  }

  r.conjugate_factor = 1.0;
  r.norm_product = 1.0;
  for (std::size_t i = 0; i < ws.m(); ++i) {
    r.conjugate_factor *= std::pow(e.conjugate(i), p);
    double s = 0.0;
    const auto sigma = ws.sigmas[i].density();
    for (std::size_t x = 0; x < cells; ++x) {
      const double fx = f.empty() ? 1.0 : f[i][x];
      if (sigma[x] > 0.0 && fx > 0.0) s += std::pow(fx, e.p_i(i)) * sigma[x];
    }
    r.norm_product *= std::pow(s, e.share(i));
  }
  r.vacuous = std::isinf(r.a_star);
  r.rhs = r.a_star * r.conjugate_factor * r.norm_product;
  if (r.a_star == 0.0 || r.norm_product == 0.0) r.rhs = r.vacuous ? kInf : 0.0;
  r.holds = r.vacuous || leq_rel(r.lhs, r.rhs, 1e-12);

  std::vector<std::vector<double>> scaled(ws.m(), std::vector<double>(cells, lambda));
  for (std::size_t i = 0; i < ws.m() && !f.empty(); ++i)
    for (std::size_t x = 0; x < cells; ++x) scaled[i][x] = lambda * f[i][x];
  r.lhs_scaled = ordered_sum(coeffs, average_ratios(ws, weighted_inputs(ws, scaled), coeffs));
  const double expected = std::pow(lambda, static_cast<double>(ws.m()) * p) * r.lhs;
  r.scaling_holds = leq_rel(r.lhs_scaled, expected, 1e-12) && leq_rel(expected, r.lhs_scaled, 1e-12);
  return r;
}

}  // namespace mwt
