#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/grid.hpp"

namespace mwt {

/// Nonnegative piecewise-constant density on the finest lattice.
///
/// Masses are reported in cell units (sum of cell densities); divide by the
/// cell count of the unit cube for Lebesgue measure. Cube queries go through a
/// long-double summed-area table plus an integer count of positive cells, so a
/// cube without support has mass exactly 0.
class DiscreteWeight {
 public:
  DiscreteWeight() = default;
  /// Throws ValidationError naming `name[index]` on negative or non-finite cells.
  DiscreteWeight(int d, int resolution, std::vector<double> density, const std::string& name = "weight");

  int dim() const { return d_; }
  int resolution() const { return n_; }
  std::int64_t cell_count() const { return static_cast<std::int64_t>(density_.size()); }
  std::span<const double> density() const { return density_; }
  double at(std::int64_t cell) const { return density_[static_cast<std::size_t>(cell)]; }

  double mass(const Cube& q) const { return box_mass(q.corner, q.side); }
  /// Mass of corner + [0, side)^d in cells.
  double box_mass(std::span<const int> corner, int side) const;
  double measure(const Cube& q) const { return mass(q) / static_cast<double>(cell_count()); }
  double average(const Cube& q) const { return mass(q) / static_cast<double>(q.cells()); }
  double total_mass() const { return total_; }
  bool vanishes_on(const Cube& q) const { return box_vanishes(q.corner, q.side); }
  bool box_vanishes(std::span<const int> corner, int side) const;
  /// Row-major cell sum without the prefix table.
  double direct_mass(const Cube& q) const;

 private:
  std::int64_t table_index(std::span<const int> p) const;
  void check_aligned(std::span<const int> corner, int side) const;

  int d_ = 0;
  int n_ = 0;
  std::vector<double> density_;
  std::vector<long double> prefix_;
  std::vector<std::int32_t> support_;
  double total_ = 0.0;
};

/// (p_1, ..., p_m) with 1/p = sum 1/p_i and conjugates p_i' = p_i / (p_i - 1).
class ExponentVector {
 public:
  ExponentVector() = default;
  explicit ExponentVector(std::vector<double> exponents);

  std::size_t m() const { return p_i_.size(); }
  double p_i(std::size_t i) const { return p_i_[i]; }
  const std::vector<double>& components() const { return p_i_; }
  double p() const { return p_; }
  double conjugate(std::size_t i) const { return p_i_[i] / (p_i_[i] - 1.0); }
  /// p / p_i (these sum to 1).
  double share(std::size_t i) const { return p_ / p_i_[i]; }
  /// p / p_i' (these sum to mp - 1).
  double conjugate_share(std::size_t i) const { return p_ / conjugate(i); }

 private:
  std::vector<double> p_i_;
  double p_ = 1.0;
};

struct WeightSystem {
  GridConfig grid;
  ExponentVector exponents;
  DiscreteWeight omega;
  std::vector<DiscreteWeight> sigmas;
  DiscreteWeight product;  // cellwise prod sigma_i^(p/p_i)

  std::size_t m() const { return sigmas.size(); }
};

/// Throws ValidationError when the weights disagree with the grid.
WeightSystem make_system(const GridConfig& grid, ExponentVector exponents, DiscreteWeight omega,
                         std::vector<DiscreteWeight> sigmas);

/// Cellwise prod sigma_i^(p/p_i) with 0^x = 0.
DiscreteWeight product_density(std::span<const DiscreteWeight> sigmas, const ExponentVector& e);

/// Integral over q of prod sigma_i^(p/p_i), in cell units.
double product_mass(const WeightSystem& ws, const Cube& q);

/// f_i sigma_i as weights; f empty means f = 1.
std::vector<DiscreteWeight> weighted_inputs(const WeightSystem& ws, const std::vector<std::vector<double>>& f);

/// Raw input as read from a weight file, before validation.
struct WeightInput {
  int d = 1;
  std::optional<int> nu;
  int max_level = 0;
  int resolution = 1;
  std::vector<double> p;
  std::optional<double> p_total;  // declared joint exponent, checked against 1/p = sum 1/p_i
  std::vector<double> omega;
  std::vector<std::vector<double>> sigma;
  std::vector<std::vector<double>> f;  // optional test functions
};

struct ValidationIssue {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::vector<std::int64_t> degenerate_cells;  // cells where some sigma_i vanishes

  bool valid() const { return issues.empty(); }
  nlohmann::json to_json() const;
};

ValidationReport validate(const WeightInput& in, int default_nu = 2);
ValidationReport validate(const WeightSystem& ws);

/// Validates and builds; throws ValidationError for the first issue.
WeightSystem build_system(const WeightInput& in, int default_nu = 2);

}  // namespace mwt
