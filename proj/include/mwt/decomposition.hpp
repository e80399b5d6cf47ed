#pragma once

// Replay of the four-collection argument under a root cube R: the sparse
// cubes below R are split into Testing, Top, Small and Remaining cubes, each
// collection's sum of Carleson coefficients is compared with its explicit
// bound, and the Remaining collection is checked to be empty.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/constants.hpp"
#include "mwt/grid.hpp"
#include "mwt/kernels.hpp"
#include "mwt/sparse.hpp"
#include "mwt/weights.hpp"

namespace mwt {

struct ProofParameters {
  int d = 1;
  int nu = 2;
  std::size_t m = 1;
  double p = 1.0;
  double q = 2.0;    // phi(nu^n) = n^q
  double rho = 2.0;  // must not exceed nu: the parent Q^(1) is then a rho-parent
  double D = 0.0;
  double t = 0.0;  // D = nu^(d t)
  double e = 0.0;  // growth exponent d((t - 1)(mp - 1) - 1); dmp for the default D
  int k = 1;
  bool diagnostic = false;  // t-condition not enforced

  double phi(int n) const;
  nlohmann::json to_json() const;
};

/// Smallest k >= 1 with nu^(e n) n^(-q) > 1 for every n >= k; 1 when e <= 0.
int minimal_k(double e, int nu, double q);

/// ValidationError when rho is outside (1, nu], q <= 1, or (unless diagnostic)
/// an explicit D or t fails (t - 1)(mp - 1) - 1 > 0.
ProofParameters choose_parameters(int d, int nu, const ExponentVector& e, double q = 2.0, double rho = 2.0,
                                  std::optional<double> D = std::nullopt, std::optional<double> t = std::nullopt,
                                  bool diagnostic = false);

enum class Collection { testing, top, small, remaining };
std::string to_string(Collection c);

/// How the maximal testing cubes are chosen: by the parent-doubling geometry
/// (some sigma_i(Q^(1)) <= D sigma_i(Q)) or by the numeric testing inequality
/// against a candidate constant.
enum class TopMode { eligibility, numeric };
std::string to_string(TopMode m);
TopMode parse_top_mode(const std::string& text);

struct ClassifiedCube {
  const SparseCube* cube = nullptr;
  int n = 0;  // level(Q) - level(R)
  Collection collection = Collection::remaining;
};

struct Partition {
  Cube root;
  std::int64_t root_node = 0;
  TopMode mode = TopMode::eligibility;
  std::vector<std::int64_t> top_star;  // maximal testing nodes below R
  std::vector<ClassifiedCube> cubes;   // every sparse (k, j) inside R, family order
  std::size_t count(Collection c) const;
  /// Distinct cubes of the Top collection (repeated generations counted once).
  std::size_t distinct_top() const;
  nlohmann::json to_json(const GridConfig& g) const;
};

/// Shared per-node data for partitions of one weight system.
struct DecompositionContext {
  const WeightSystem* ws = nullptr;
  std::shared_ptr<const TreeLayout> tree;
  ProofParameters params;
  CubeTable table;                // dyadic scope, index = tree node
  std::vector<bool> parent_doubling;  // some sigma_i(parent) <= D sigma_i(node)
  double a_p = 0.0;
  double rh = 0.0;
  double testing = 0.0;  // dyadic testing constant for (rho, D)
  std::optional<double> candidate;  // numeric mode bound; defaults to `testing`
};

DecompositionContext make_context(const WeightSystem& ws, const ProofParameters& params,
                                  std::optional<double> candidate = std::nullopt);

Partition partition(const DecompositionContext& ctx, const SparseFamily& family, const Cube& root,
                    TopMode mode = TopMode::eligibility);

struct EmptinessReport {
  bool empty = true;
  std::size_t remaining = 0;
  nlohmann::json certificate;  // null when empty
  nlohmann::json to_json() const;
};

/// L = {} check; a nonempty L yields the first offending cube with its
/// ancestor chain up to R, the per-step doubling ratios and the A_p chain.
EmptinessReport verify_empty(const DecompositionContext& ctx, const Partition& part);

struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double constant = 0.0;  // rhs = constant * integral
  double rhs = 0.0;
  bool holds = false;
  nlohmann::json to_json() const;
};

struct CollectionBounds {
  bool applicable = false;  // false when RH is infinite
  double integral = 0.0;    // int_R prod sigma_i^(p/p_i)
  BoundCheck testing;
  BoundCheck top;
  BoundCheck small;
  std::size_t top_distinct = 0;
  double top_cap = 0.0;  // 2 nu^(d(k+1))
  bool top_count_holds = false;
  bool passed() const;
  nlohmann::json to_json() const;
};

CollectionBounds verify_collection_bounds(const DecompositionContext& ctx, const Partition& part);

struct TheoremOptions {
  double q = 2.0;
  double rho = 2.0;
  std::optional<double> D;
  std::optional<double> t;
  bool diagnostic = false;
  TopMode mode = TopMode::eligibility;
  std::optional<double> candidate;
  std::optional<Cube> root;  // default: the domain root
  bool all_roots = false;    // every standard-grid cube as R
  std::vector<std::vector<double>> f;
};

struct RootResult {
  Partition partition;
  EmptinessReport emptiness;
  CollectionBounds bounds;
};

struct TheoremReport {
  ProofParameters params;
  double a_p = 0.0;
  double rh = 0.0;
  double testing = 0.0;
  std::size_t sparse_cubes = 0;
  std::shared_ptr<const SparseFamily> family;  // owns the cubes the partitions point to
  std::vector<RootResult> roots;

  bool passed() const;
  nlohmann::json to_json(const GridConfig& g) const;
};

TheoremReport verify_theorem(const WeightSystem& ws, const TheoremOptions& opts);

}  // namespace mwt
