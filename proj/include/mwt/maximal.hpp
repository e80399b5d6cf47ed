#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/grid.hpp"
#include "mwt/weights.hpp"

namespace mwt {

inline constexpr std::int64_t kDefaultBudget = 10'000'000;

/// Multilinear maximal function sampled on every lattice cell.
struct MaximalField {
  std::vector<double> values;
  std::string scope;            // grid id name of the cube family
  std::vector<Cube> witnesses;  // per cell, empty when not retained
};

/// sup over standard-grid cubes Q containing x of prod_i <g_i>_Q, by a
/// root-to-leaf sweep over per-node aggregates. Ties keep the larger cube.
MaximalField dyadic_maximal(const GridConfig& g, std::span<const DiscreteWeight> inputs, bool keep_witnesses = true);

/// Same sweep with inputs f_i sigma_i (f empty means f = 1).
MaximalField dyadic_maximal(const WeightSystem& ws, const std::vector<std::vector<double>>& f = {});

/// sup over every lattice cube, via the parallel sliding-max kernel (no witnesses).
MaximalField general_maximal(const GridConfig& g, std::span<const DiscreteWeight> inputs);

/// Oracle: enumerate the cube family of `scope`, average by direct cell sums and
/// stamp. BudgetError when resolution^d * cube count exceeds `budget`.
MaximalField general_maximal_bruteforce(const GridConfig& g, std::span<const DiscreteWeight> inputs,
                                        std::int64_t budget = kDefaultBudget,
                                        GridScope scope = GridScope::lattice());

/// Maximal function of one (possibly shifted) grid over its in-domain cubes.
MaximalField grid_maximal(const GridConfig& g, GridId grid, std::span<const DiscreteWeight> inputs);

struct ShiftedBoundReport {
  double max_ratio = 0.0;  // max over cells of general / max-over-grids
  double bound = 0.0;      // 6^(dm)
  bool holds = false;
  std::int64_t worst_cell = -1;
  nlohmann::json to_json() const;
};

/// general <= 6^(dm) * max over the 2^d shifted grids of their dyadic maximal,
/// checked pointwise.
ShiftedBoundReport shifted_bound_check(const GridConfig& g, std::span<const DiscreteWeight> inputs,
                                       std::int64_t budget = kDefaultBudget);

/// sum over cells of field^power * w (cell units).
double field_energy(std::span<const double> field, const DiscreteWeight& w, double power);

}  // namespace mwt
