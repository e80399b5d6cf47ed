#pragma once

// A separately coded one-weight (linear) path and the reduction checks that
// compare it with the multilinear constants when p_i = q and sigma_i = sigma.
//
// The linear path shares only cube enumeration with the rest of the library:
// masses are direct cell loops, the maximal function is stamped cube by cube.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/constants.hpp"
#include "mwt/grid.hpp"
#include "mwt/weights.hpp"

namespace mwt {

struct LinearSystem {
  GridConfig grid;
  double q = 2.0;
  std::vector<double> omega;
  std::vector<double> sigma;
};

namespace linear {

/// [w, s]_q^q = sup <w>_Q <s>_Q^(q-1).
double a_constant(const LinearSystem& s, Scope scope);
/// sup over Q with s(Q) > 0 of int_Q M(s 1_Q)^q w / s(Q).
double s_constant(const LinearSystem& s, Scope scope);
/// s_constant restricted to cubes with a lattice P of side ceil(rho l(Q)) and s(P) <= D s(Q).
double testing_constant(const LinearSystem& s, Scope scope, double rho, double D);
/// int M(f s)^q w / int f^q s; NaN when the denominator vanishes.
double norm_ratio(const LinearSystem& s, Scope scope, const std::vector<double>& f);
/// M(g) for one density over the scope's cubes.
std::vector<double> maximal(const LinearSystem& s, Scope scope, const std::vector<double>& g);

}  // namespace linear

/// The multilinear system with m copies of sigma and p_i = q.
WeightSystem replicate(const LinearSystem& s, int m);

/// The linear system behind a multilinear one; ValidationError unless all p_i
/// and all sigma_i coincide.
LinearSystem collapse(const WeightSystem& ws);

struct ReductionCheck {
  std::string name;
  double multilinear = 0.0;
  double linear = 0.0;
  double rel_error = 0.0;
  bool holds = false;
  nlohmann::json to_json() const;
};

struct ReductionReport {
  Scope scope = Scope::dyadic;
  double q = 0.0;
  std::size_t m = 0;
  double tolerance = 1e-9;
  std::vector<ReductionCheck> checks;

  bool passed() const;
  nlohmann::json to_json() const;
};

struct ReductionOptions {
  Scope scope = Scope::dyadic;
  double rho = 2.0;
  std::optional<double> D;  // default: default_doubling of the multilinear system
  std::uint64_t seed = 0;   // random test function
  double tolerance = 1e-9;
};

/// RH = 1, the A, testing and S identities, and the norm identity evaluated on
/// the test functions f = 1, an indicator and a seeded random f.
ReductionReport reduce_linear(const WeightSystem& ws, const ReductionOptions& opts = {});

}  // namespace mwt
