#pragma once

// The four weight constants, the operator-norm lower bound and the inequality
// chain linking them.
//
// Everything is computed in cell units (lattice masses); every constant here
// is invariant under the conversion to Lebesgue units.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/grid.hpp"
#include "mwt/maximal.hpp"
#include "mwt/report.hpp"
#include "mwt/weights.hpp"

namespace mwt {

/// Cube family of every supremum: standard-grid cubes or all lattice cubes.
enum class Scope { dyadic, general };
std::string to_string(Scope s);
Scope parse_scope(const std::string& text);

struct Witnessed {
  double value = 0.0;
  std::optional<Cube> witness;
};

/// Relative comparison lhs <= rhs (1 + tol), with +inf handled.
bool leq_rel(double lhs, double rhs, double tol = 1e-10);

/// nu^(2 m p d / (m p - 1)).
double default_doubling(int d, int nu, const ExponentVector& e);
/// nu^(d t); requires (t - 1)(mp - 1) - 1 > 0 unless checking is disabled.
double doubling_from_t(int d, int nu, double t);
/// t with D = nu^(d t).
double t_from_doubling(int d, int nu, double D);
bool t_condition(double t, const ExponentVector& e);

/// Per-cube statistics for one scope; index i of every vector refers to cubes[i].
struct CubeTable {
  Scope scope = Scope::dyadic;
  std::vector<Cube> cubes;
  std::vector<double> ap_local;  // <w>_Q prod <s_i>_Q^(p/p_i')
  std::vector<double> energy;    // int_Q M(sigma 1_Q)^p w
  std::vector<double> sp_ratio;  // energy / prod s_i(Q)^(p/p_i); 0 when some s_i(Q) = 0
  std::vector<double> rh_ratio;  // prod s_i(Q)^(p/p_i) / int_Q prod s_i^(p/p_i); may be +inf
  std::vector<std::vector<double>> sigma_mass;  // [i][cube]
};

/// BudgetError for general scope when resolution^d * lattice cube count > budget.
CubeTable compute_cube_table(const WeightSystem& ws, Scope scope, std::int64_t budget = kDefaultBudget);

Witnessed ap_constant(const CubeTable& t);
Witnessed sp_constant(const CubeTable& t);
Witnessed rh_constant(const CubeTable& t);
Witnessed ap_constant(const WeightSystem& ws, Scope scope);
Witnessed sp_constant(const WeightSystem& ws, Scope scope);
Witnessed rh_constant(const WeightSystem& ws, Scope scope);

/// Per cube of the table: is there a lattice cube P containing Q, inside the
/// domain, with side >= rho side(Q) and sigma_i(P) <= D sigma_i(Q) for some i?
/// Only the minimal admissible side ceil(rho side) is scanned (sigma_i(P) is
/// monotone in P).
std::vector<bool> eligibility(const WeightSystem& ws, const CubeTable& t, double rho, double D);
std::vector<Cube> eligible_cubes(const WeightSystem& ws, Scope scope, double rho, double D);

struct TestingConstant {
  Witnessed sup;
  std::int64_t eligible_count = 0;
  double rho = 0.0;
  double D = 0.0;
};
TestingConstant testing_constant(const WeightSystem& ws, const CubeTable& t, double rho, double D);
TestingConstant testing_constant(const WeightSystem& ws, Scope scope, double rho, double D);

enum class Strategy { indicators, random, ascent };
std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& text);

struct NormSearchOptions {
  Strategy strategy = Strategy::indicators;
  std::uint64_t seed = 0;
  int starts = 64;
  int steps = 200;
  double step = 0.25;  // multiplicative step e^{+-step}
};

struct NormLower {
  double value = 0.0;
  Strategy strategy = Strategy::indicators;
  std::optional<double> indicators_value;  // localized indicator functional, when computed
  std::optional<Cube> witness_cube;        // indicator witness
  std::vector<std::vector<double>> witness_f;
  std::int64_t trials = 0;
};

/// ||M(f sigma)||^p_{L^p(w)} / prod ||f_i||^p_{L^{p_i}(sigma_i)} over the full domain.
/// Returns nullopt when some ||f_i|| vanishes.
std::optional<double> norm_ratio(const WeightSystem& ws, Scope scope, const std::vector<std::vector<double>>& f);

/// Lower bound for the operator constant C.
///  - indicators: max over cubes Q of ||1_Q M(sigma 1_Q)||^p / prod sigma_i(Q)^(p/p_i),
///    evaluated with f_i = 1_Q substituted into the generic maximal function.
///  - random: seeded random nonnegative f (full-domain norms).
///  - ascent: indicators, full-domain indicator trials and seeded multiplicative
///    hill-climbs from random starts.
/// DomainError when every trial has a vanishing denominator.
NormLower norm_lower(const WeightSystem& ws, Scope scope, const NormSearchOptions& opts,
                     std::int64_t budget = kDefaultBudget);

struct Check {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  nlohmann::json to_json() const;
};
Check make_check(std::string name, double lhs, double rhs, double tol = 1e-10);
Check make_equality(std::string name, double lhs, double rhs, double tol = 1e-10);

struct ConstantsOptions {
  Scope scope = Scope::dyadic;
  double rho = 2.0;
  std::optional<double> D;  // default: default_doubling
  NormSearchOptions search;
  std::int64_t budget = kDefaultBudget;
};

struct ConstantsReport {
  Scope scope = Scope::dyadic;
  Witnessed ap;
  Witnessed sp;
  Witnessed rh;
  TestingConstant testing;
  NormLower norm;
  double certificate = 0.0;  // (ap + testing) * rh
  std::vector<Check> checks;

  bool passed() const;
  /// Ratio norm_lower / certificate (nullopt when the certificate is 0 or inf).
  std::optional<double> certificate_ratio() const;
  nlohmann::json to_json(const GridConfig& g) const;
};

ConstantsReport compute_constants(const WeightSystem& ws, const ConstantsOptions& opts);

}  // namespace mwt
