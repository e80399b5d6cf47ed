#pragma once

// Seeded fixture families shared by the unit and acceptance suites.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mwt/grid.hpp"
#include "mwt/index.hpp"
#include "mwt/weights.hpp"
#include "oracles.hpp"

namespace fixture {

inline mwt::WeightSystem system(int d, int nu, int L, bool shifted, std::vector<double> p, std::vector<double> omega,
                                std::vector<std::vector<double>> sigma) {
  mwt::GridConfig g{d, nu, L, shifted};
  const int n = g.resolution();
  std::vector<mwt::DiscreteWeight> s;
  for (auto& v : sigma) s.emplace_back(d, n, std::move(v), "sigma");
  return mwt::make_system(g, mwt::ExponentVector(std::move(p)), mwt::DiscreteWeight(d, n, std::move(omega), "omega"),
                          std::move(s));
}

inline std::vector<double> constant(const mwt::GridConfig& g, double v = 1.0) {
  return std::vector<double>(static_cast<std::size_t>(g.cell_count()), v);
}

inline mwt::WeightSystem lebesgue(int d, int L, std::vector<double> p, int nu = 2, bool shifted = false) {
  mwt::GridConfig g{d, nu, L, shifted};
  std::vector<std::vector<double>> sig(p.size(), constant(g));
  return system(d, nu, L, shifted, std::move(p), constant(g), std::move(sig));
}

inline oracle::System to_oracle(const mwt::WeightSystem& ws) {
  oracle::System s;
  s.d = ws.grid.d;
  s.n = ws.grid.resolution();
  s.p_i = ws.exponents.components();
  s.omega.assign(ws.omega.density().begin(), ws.omega.density().end());
  for (const auto& w : ws.sigmas) s.sigma.emplace_back(w.density().begin(), w.density().end());
  return s;
}

enum class Profile { uniform, lognormal, spiky, sparse, power };

inline const char* name(Profile p) {
  switch (p) {
    case Profile::uniform: return "uniform";
    case Profile::lognormal: return "lognormal";
    case Profile::spiky: return "spiky";
    case Profile::sparse: return "sparse";
    case Profile::power: return "power";
  }
  return "?";
}

/// One density of the given profile. `sparse` zeroes about a third of the cells,
/// `spiky` puts a few cells 1e3..1e4 above a unit background.
inline std::vector<double> density(const mwt::GridConfig& g, Profile prof, std::mt19937_64& rng) {
  const auto cells = static_cast<std::size_t>(g.cell_count());
  const int n = g.resolution();
  std::vector<double> v(cells);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  switch (prof) {
    case Profile::uniform:
      for (auto& x : v) x = 0.5 + u(rng);
      break;
    case Profile::lognormal:
      for (auto& x : v) x = std::exp(1.5 * z(rng));
      break;
    case Profile::spiky: {
      for (auto& x : v) x = 0.5 + u(rng);
      const int spikes = 1 + static_cast<int>(u(rng) * 3);
      for (int s = 0; s < spikes; ++s) v[static_cast<std::size_t>(u(rng) * static_cast<double>(cells)) % cells] = 1e3 + 9e3 * u(rng);
      break;
    }
    case Profile::sparse:
      for (auto& x : v) x = u(rng) < 0.35 ? 0.0 : 0.2 + u(rng);
      break;
    case Profile::power: {
      const double a = -0.9 + 1.8 * u(rng);
      for (std::size_t x = 0; x < cells; ++x) {
        const auto p = mwt::unlinear_index(static_cast<std::int64_t>(x), g.d, n);
        double r2 = 0.0;
        for (int c : p) {
          const double t = (c + 0.5) / n;
          r2 += t * t;
        }
        v[x] = std::pow(std::sqrt(r2), a);
      }
      break;
    }
  }
  return v;
}

struct Spec {
  int d = 1;
  int nu = 2;
  int L = 3;
  bool shifted = false;
  std::vector<double> p;
  Profile omega = Profile::uniform;
  std::vector<Profile> sigma;
  std::uint64_t seed = 0;

  std::string label() const {
    std::string s = "seed=" + std::to_string(seed) + " d=" + std::to_string(d) + " L=" + std::to_string(L) +
                    " m=" + std::to_string(p.size()) + " omega=" + name(omega);
    for (auto pr : sigma) s += std::string(" sigma=") + name(pr);
    return s;
  }
};

inline mwt::WeightSystem build(const Spec& spec) {
  mwt::GridConfig g{spec.d, spec.nu, spec.L, spec.shifted};
  std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + 17);
  auto omega = density(g, spec.omega, rng);
  std::vector<std::vector<double>> sig;
  for (auto pr : spec.sigma) sig.push_back(density(g, pr, rng));
  return system(spec.d, spec.nu, spec.L, spec.shifted, spec.p, std::move(omega), std::move(sig));
}

/// Seeded random spec: d in {1,2}, m in {1,2,3}, exponents in (1.2, 4),
/// levels chosen so the lattice stays at most `max_side` cells per side.
inline Spec random_spec(std::uint64_t seed, int max_side_d1 = 16, int max_side_d2 = 8) {
  std::mt19937_64 rng(seed + 1000003);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Spec s;
  s.seed = seed;
  s.d = u(rng) < 0.5 ? 1 : 2;
  const int m = 1 + static_cast<int>(u(rng) * 3) % 3;
  const int max_side = s.d == 1 ? max_side_d1 : max_side_d2;
  int L = 0;
  while ((2 << L) <= max_side) ++L;
  s.L = std::max(1, L - static_cast<int>(u(rng) * 2));
  for (int i = 0; i < m; ++i) s.p.push_back(1.2 + 2.8 * u(rng));
  const Profile all[] = {Profile::uniform, Profile::lognormal, Profile::spiky, Profile::sparse, Profile::power};
  s.omega = all[static_cast<int>(u(rng) * 5) % 5];
  for (int i = 0; i < m; ++i) s.sigma.push_back(all[static_cast<int>(u(rng) * 5) % 5]);
  return s;
}

}  // namespace fixture
