#include "mwt/maximal.hpp"

#include <algorithm>
#include <cmath>

#include "mwt/error.hpp"
#include "mwt/index.hpp"
#include "mwt/kernels.hpp"

namespace mwt {

MaximalField dyadic_maximal(const GridConfig& g, std::span<const DiscreteWeight> inputs, bool keep_witnesses) {
  const TreeLayout tree(g);
  std::vector<std::vector<double>> masses;
  masses.reserve(inputs.size());
  for (const auto& w : inputs) masses.push_back(tree_masses(tree, w.density()));
  const std::vector<double> prod = tree_products(tree, masses);
  const LeafMax leaf = tree_running_max(tree, prod);

  MaximalField out;
  out.scope = GridId::standard().name(g.d);
  const auto cells = static_cast<std::size_t>(g.cell_count());
  out.values.resize(cells);
  const auto& leaf_of = tree.leaf_of_cell();
  for (std::size_t x = 0; x < cells; ++x) out.values[x] = leaf.value[static_cast<std::size_t>(leaf_of[x])];
  if (keep_witnesses) {
    out.witnesses.reserve(cells);
    const int n = g.resolution();
    for (std::size_t x = 0; x < cells; ++x) {
      const std::vector<int> cell = unlinear_index(static_cast<std::int64_t>(x), g.d, n);
      out.witnesses.push_back(locate(g, GridId::standard(), leaf.level[static_cast<std::size_t>(leaf_of[x])], cell));
    }
  }
  return out;
}

MaximalField dyadic_maximal(const WeightSystem& ws, const std::vector<std::vector<double>>& f) {
  const auto inputs = weighted_inputs(ws, f);
  return dyadic_maximal(ws.grid, inputs);
}

MaximalField general_maximal(const GridConfig& g, std::span<const DiscreteWeight> inputs) {
  MaximalField out;
  out.scope = GridId::lattice().name(g.d);
  out.values = lattice_max_field(lattice_products(inputs));
  return out;
}

namespace {

MaximalField stamp_family(const GridConfig& g, std::span<const DiscreteWeight> inputs, const std::vector<Cube>& family,
                          const std::string& scope) {
  const int n = g.resolution();
  const auto cells = static_cast<std::size_t>(g.cell_count());
  MaximalField out;
  out.scope = scope;
  out.values.assign(cells, 0.0);
  out.witnesses.assign(cells, Cube{});
  std::vector<bool> seen(cells, false);
  for (const Cube& q : family) {
    double prod = 1.0;
    const double vol = static_cast<double>(q.cells());
    for (const auto& w : inputs) prod *= w.direct_mass(q) / vol;
    for_each_point_in(q.corner, q.side, [&](std::span<const int> cell) {
      const auto x = static_cast<std::size_t>(linear_index(cell, n));
      if (!seen[x] || prod > out.values[x]) {
        out.values[x] = prod;
        out.witnesses[x] = q;
        seen[x] = true;
      }
    });
  }
  // Cells no in-domain cube covers keep value 0 and an empty witness.
  return out;
}

}  // namespace

MaximalField general_maximal_bruteforce(const GridConfig& g, std::span<const DiscreteWeight> inputs,
                                        std::int64_t budget, GridScope scope) {
  if (scope.kind == GridKind::lattice) {
    const double work = static_cast<double>(g.cell_count()) * static_cast<double>(count_lattice_cubes(g));
    if (work > static_cast<double>(budget)) {
      throw BudgetError("brute-force maximal: " + std::to_string(static_cast<long long>(work)) +
                        " cube-cell evaluations exceed the budget of " + std::to_string(budget));
    }
  }
  const auto family = enumerate_cubes(g, scope);
  const std::string name = scope.kind == GridKind::lattice    ? GridId::lattice().name(g.d)
                           : scope.kind == GridKind::standard ? GridId::standard().name(g.d)
                                                              : GridId::shifted(scope.alpha).name(g.d);
  return stamp_family(g, inputs, family, name);
}

MaximalField grid_maximal(const GridConfig& g, GridId grid, std::span<const DiscreteWeight> inputs) {
  const GridScope scope = grid.kind == GridKind::standard ? GridScope::standard() : GridScope::shifted(grid.alpha);
  return stamp_family(g, inputs, enumerate_cubes(g, scope), grid.name(g.d));
}

nlohmann::json ShiftedBoundReport::to_json() const {
  return {{"max_ratio", max_ratio}, {"bound", bound}, {"holds", holds}, {"worst_cell", worst_cell}};
}

ShiftedBoundReport shifted_bound_check(const GridConfig& g, std::span<const DiscreteWeight> inputs,
                                       std::int64_t budget) {
  if (!g.shifted) throw DomainError("shifted_bound_check: shifted grids are disabled");
  const double work = static_cast<double>(g.cell_count()) * static_cast<double>(count_lattice_cubes(g));
  if (work > static_cast<double>(budget)) throw BudgetError("shifted_bound_check: lattice too large for the budget");
  const MaximalField general = general_maximal(g, inputs);
  std::vector<double> best(general.values.size(), 0.0);
  for (unsigned alpha = 0; alpha < (1u << g.d); ++alpha) {
    const MaximalField f = grid_maximal(g, GridId::shifted(alpha), inputs);
    for (std::size_t x = 0; x < best.size(); ++x) best[x] = std::max(best[x], f.values[x]);
  }
  ShiftedBoundReport r;
  r.bound = std::pow(6.0, g.d * static_cast<double>(inputs.size()));
  for (std::size_t x = 0; x < best.size(); ++x) {
    const double num = general.values[x];
    if (num <= 0.0) continue;
    const double ratio = best[x] > 0.0 ? num / best[x] : INFINITY;
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.worst_cell = static_cast<std::int64_t>(x);
    }
  }
  r.holds = r.max_ratio <= r.bound * (1.0 + 1e-12);
  return r;
}

double field_energy(std::span<const double> field, const DiscreteWeight& w, double power) {
  double sum = 0.0;
  for (std::size_t x = 0; x < field.size(); ++x) {
    const double v = field[x];
    const double wx = w.at(static_cast<std::int64_t>(x));
    if (v > 0.0 && wx > 0.0) sum += std::pow(v, power) * wx;
  }
  return sum;
}

}  // namespace mwt
