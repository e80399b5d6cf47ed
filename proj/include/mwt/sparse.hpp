#pragma once

// Stopping-time sparse families built from level sets of the dyadic maximal
// function, their Carleson coefficients, and the two inequalities they feed:
// sparse domination of the dyadic maximal function and the multilinear
// Carleson embedding.

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mwt/grid.hpp"
#include "mwt/weights.hpp"

namespace mwt {

/// 2^m nu^(dm); equals 2^(m(d+1)) on dyadic grids.
double default_base(int d, int nu, std::size_t m);

struct SparseCube {
  int k = 0;
  int j = 0;
  Cube cube;
  std::int64_t node = 0;              // standard-grid tree node
  double product = 0.0;               // prod <f_i sigma_i>_Q
  std::vector<std::int64_t> e_cells;  // E_j^k = Q \ Omega_{k+1}, row-major
};

struct Generation {
  int k = 0;
  double threshold = 0.0;                 // t_k
  std::vector<std::int64_t> omega_cells;  // Omega_k = {M > t_k}, sorted
  std::vector<SparseCube> cubes;          // maximal grid cubes with product > t_k, by node
};

/// Thresholds are t_k = tau a^k with tau = v / nu^(dm), v the root product,
/// so the first generation (k = 0) is {root}. Every later selected cube has a
/// parent with product <= t_k, hence product <= nu^(dm) t_k, which gives the
/// one-half overlap bound whenever a >= 2^m nu^(dm).
struct SparseFamily {
  double base = 0.0;
  double tau = 1.0;
  std::vector<Generation> generations;
  std::vector<double> field;  // M_D(f sigma) per cell

  std::size_t cube_count() const;
  /// Flattened (k, j) order used by coefficient vectors.
  std::vector<const SparseCube*> cubes() const;
  nlohmann::json to_json(const GridConfig& g) const;
};

struct SparseInvariants {
  bool disjoint = true;     // Q_j^k disjoint in j
  bool nested = true;       // Omega_{k+1} subset Omega_k, Omega_k = union_j Q_j^k
  bool half_overlap = true;  // 2 |Omega_{k+1} cap Q_j^k| <= |Q_j^k|
  bool e_sets = true;       // E pairwise disjoint and |Q| <= 2 |E|
  int worst_k = 0;
  int worst_j = -1;
  std::int64_t max_overlap_cells = 0;  // max over cubes of 2|Omega_{k+1} cap Q| - |Q| (<= 0 when sparse)

  bool all() const { return disjoint && nested && half_overlap && e_sets; }
  nlohmann::json to_json() const;
};

/// Integer cell-count checks of all four invariants.
SparseInvariants check_invariants(const GridConfig& g, const SparseFamily& family);

/// Builds the family for inputs f_i sigma_i (f empty means f = 1) and asserts
/// the invariants; VerificationFailure naming (k, j) on a violation. A base
/// below the default can fail.
SparseFamily build_sparse(const WeightSystem& ws, const std::vector<std::vector<double>>& f = {},
                          std::optional<double> base = std::nullopt);

struct Coefficient {
  int k = 0;
  int j = 0;
  Cube cube;
  double value = 0.0;
};

/// a_Q = w(E_Q) prod_i <sigma_i>_Q^p for every (k, j), in family order.
std::vector<Coefficient> coefficients(const WeightSystem& ws, const SparseFamily& family);

struct DominationReport {
  double lhs = 0.0;       // int M_D(f sigma)^p w
  double sum = 0.0;       // sum a_Q prod (sigma_i(Q)^-1 int_Q f_i sigma_i)^p
  double constant = 0.0;  // base^p
  bool holds = false;
  nlohmann::json to_json() const;
};

DominationReport domination_check(const WeightSystem& ws, const std::vector<std::vector<double>>& f,
                                  const SparseFamily& family);
/// Builds the family for f first.
DominationReport domination_check(const WeightSystem& ws, const std::vector<std::vector<double>>& f = {});

struct CarlesonReport {
  double lhs = 0.0;      // sum a_Q prod (<f_i sigma_i>_Q / <sigma_i>_Q)^p
  double a_star = 0.0;   // max over grid R of sum_{Q subset R} a_Q / int_R prod sigma^(p/p_i)
  std::optional<Cube> a_star_witness;
  double conjugate_factor = 0.0;  // prod_i (p_i')^p
  double norm_product = 0.0;      // prod_i ||f_i||^p_{L^{p_i}(sigma_i)}
  double rhs = 0.0;
  bool vacuous = false;  // a_star infinite
  bool holds = false;
  // f -> lambda f scales the left side by lambda^(mp).
  double lambda = 2.0;
  double lhs_scaled = 0.0;
  bool scaling_holds = false;
  nlohmann::json to_json(const GridConfig& g) const;
};

CarlesonReport carleson_check(const WeightSystem& ws, const std::vector<Coefficient>& coeffs,
                              const std::vector<std::vector<double>>& f = {}, double lambda = 2.0);

}  // namespace mwt
