#pragma once

// Seeded random weight systems and an elitist multiplicative hill-climb that
// looks for large gaps between the operator lower bound and the constants.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/constants.hpp"
#include "mwt/grid.hpp"
#include "mwt/weights.hpp"

namespace mwt {

enum class Profile { uniform, lognormal, spiky, power };
std::string to_string(Profile p);
Profile parse_profile(const std::string& text);

/// One density of the given profile. spiky puts a few cells at >= 1e3 times
/// the median; power is |x - c|^a around a random centre with a in (-d/2, 2).
std::vector<double> random_density(const GridConfig& g, Profile profile, std::mt19937_64& rng);

/// omega and every sigma_i drawn from `profile`; same seed, same system.
WeightSystem random_system(std::uint64_t seed, const GridConfig& g, const ExponentVector& e, Profile profile);

enum class Objective { certificate, gap, rh_stress };
std::string to_string(Objective o);
Objective parse_objective(const std::string& text);

struct SearchConfig {
  std::uint64_t seed = 0;
  int population = 8;
  int iterations = 100;
  double mutation = 0.3;     // log-scale of a cell perturbation
  double cell_rate = 0.25;   // chance a cell is perturbed
  Objective objective = Objective::gap;
  double rh_cap = 1e6;
  ConstantsOptions constants;

  void validate() const;
};

/// certificate: norm_lower / ((ap + testing) rh), 0 when the certificate is 0 or inf.
/// gap: sp / (ap + testing), 0 for 0/0 and inf for positive/0.
/// rh_stress: min(rh, cap).
double objective_value(const ConstantsReport& r, const SearchConfig& cfg);

struct SearchResult {
  WeightSystem best;
  std::vector<double> trace;  // best objective after iteration 0..iterations
  ConstantsReport report;
  std::int64_t accepted = 0;
  std::int64_t evaluations = 0;

  nlohmann::json to_json(const SearchConfig& cfg) const;
  /// iteration,objective rows.
  std::string trace_csv() const;
};

/// Population members are independent seeded mutations of the incumbent and
/// evaluate in parallel; the best strict improvement (lowest index on ties)
/// replaces the incumbent. Each accepted point must satisfy ap <= sp and
/// testing <= sp, else VerificationFailure. ValidationError when the start
/// objective is not finite.
SearchResult ascend(const WeightSystem& start, const SearchConfig& cfg);

}  // namespace mwt
