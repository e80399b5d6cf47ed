#include "mwt/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "mwt/error.hpp"
#include "mwt/index.hpp"
#include "mwt/report.hpp"

namespace mwt {

namespace {

std::vector<double> copy_density(const DiscreteWeight& w) { return {w.density().begin(), w.density().end()}; }

WeightSystem rebuild(const WeightSystem& ws, std::vector<double> omega, std::vector<std::vector<double>> sigma) {
  const int n = ws.grid.resolution();
  std::vector<DiscreteWeight> s;
  for (std::size_t i = 0; i < sigma.size(); ++i)
    s.emplace_back(ws.grid.d, n, std::move(sigma[i]), "sigma[" + std::to_string(i) + "]");
  return make_system(ws.grid, ws.exponents, DiscreteWeight(ws.grid.d, n, std::move(omega), "omega"), std::move(s));
}

void mutate(std::vector<double>& w, const SearchConfig& cfg, std::mt19937_64& rng) {
  std::bernoulli_distribution pick(cfg.cell_rate);
  std::normal_distribution<double> z(0.0, 1.0);
  for (double& v : w)
    if (pick(rng)) v *= std::exp(cfg.mutation * z(rng));
}

void check_chain(const ConstantsReport& r) {
  for (const Check& c : r.checks) {
    if (c.name != "ap <= sp" && c.name != "testing <= sp") continue;
    if (!c.holds) throw VerificationFailure("search: chain check '" + c.name + "' failed", c.to_json());
  }
}

}  // namespace

std::string to_string(Profile p) {
  switch (p) {
    case Profile::uniform: return "uniform";
    case Profile::lognormal: return "lognormal";
    case Profile::spiky: return "spiky";
    case Profile::power: return "power";
  }
  return "uniform";
}

Profile parse_profile(const std::string& text) {
  if (text == "uniform") return Profile::uniform;
  if (text == "lognormal") return Profile::lognormal;
  if (text == "spiky") return Profile::spiky;
  if (text == "power" || text == "power-law-radial") return Profile::power;
  throw ValidationError("profile", "expected uniform, lognormal, spiky or power, got '" + text + "'");
}

std::vector<double> random_density(const GridConfig& g, Profile profile, std::mt19937_64& rng) {
  const auto cells = static_cast<std::size_t>(g.cell_count());
  const int n = g.resolution();
  std::vector<double> w(cells);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  switch (profile) {
    case Profile::uniform:
      for (double& v : w) v = u(rng);
      break;
    case Profile::lognormal: {
      std::normal_distribution<double> z(0.0, 1.0);
      for (double& v : w) v = std::exp(z(rng));
      break;
    }
    case Profile::spiky: {
      // Background <= 1.5, spikes >= 2e3, so max / median >= 1e3 for any spike count below half.
      for (double& v : w) v = u(rng);
      std::uniform_int_distribution<std::size_t> cell(0, cells - 1);
      std::uniform_real_distribution<double> height(3.3, 5.0);
      const std::size_t spikes = std::max<std::size_t>(1, cells / 16);
      for (std::size_t s = 0; s < spikes; ++s) w[cell(rng)] = std::pow(10.0, height(rng));
      break;
    }
    case Profile::power: {
      std::uniform_int_distribution<int> coord(0, n - 1);
      std::vector<double> c(static_cast<std::size_t>(g.d));
      for (double& x : c) x = coord(rng) + 0.5;
      std::uniform_real_distribution<double> ex(-0.5 * g.d, 2.0);
      const double a = ex(rng);
      std::size_t idx = 0;
      for_each_point(g.d, n, [&](std::span<const int> p) {
        double r2 = 0.0;
        for (int k = 0; k < g.d; ++k) {
          const double dx = (p[k] + 0.5 - c[k]) / n;
          r2 += dx * dx;
        }
        // Cell-centre distance, floored at half a cell so the centre cell stays finite.
        const double r = std::max(std::sqrt(r2), 0.5 / n);
        w[idx++] = std::pow(r, a);
      });
      break;
    }
  }
  return w;
}

WeightSystem random_system(std::uint64_t seed, const GridConfig& g, const ExponentVector& e, Profile profile) {
  g.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  std::mt19937_64 rng(seq);
  const int n = g.resolution();
  DiscreteWeight omega(g.d, n, random_density(g, profile, rng), "omega");
  std::vector<DiscreteWeight> sigma;
  for (std::size_t i = 0; i < e.m(); ++i)
    sigma.emplace_back(g.d, n, random_density(g, profile, rng), "sigma[" + std::to_string(i) + "]");
  return make_system(g, e, std::move(omega), std::move(sigma));
}

std::string to_string(Objective o) {
  switch (o) {
    case Objective::certificate: return "certificate";
    case Objective::gap: return "gap";
    case Objective::rh_stress: return "rh-stress";
  }
  return "gap";
}

Objective parse_objective(const std::string& text) {
  if (text == "certificate") return Objective::certificate;
  if (text == "gap") return Objective::gap;
  if (text == "rh-stress" || text == "rh_stress") return Objective::rh_stress;
  throw ValidationError("objective", "expected certificate, gap or rh-stress, got '" + text + "'");
}

void SearchConfig::validate() const {
  if (population < 1) throw ValidationError("population", "must be at least 1");
  if (iterations < 0) throw ValidationError("iterations", "must be nonnegative");
  if (!(mutation > 0.0) || !std::isfinite(mutation)) throw ValidationError("mutation", "must be positive");
  if (!(cell_rate > 0.0) || cell_rate > 1.0) throw ValidationError("cell_rate", "must lie in (0, 1]");
  if (!(rh_cap > 0.0)) throw ValidationError("rh_cap", "must be positive");
}

double objective_value(const ConstantsReport& r, const SearchConfig& cfg) {
  switch (cfg.objective) {
    case Objective::certificate: {
      const auto ratio = r.certificate_ratio();
      return ratio ? *ratio : 0.0;
    }
    case Objective::gap: {
      const double den = r.ap.value + r.testing.sup.value;
      if (den > 0.0) return r.sp.value / den;
      return r.sp.value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    case Objective::rh_stress: return std::min(r.rh.value, cfg.rh_cap);
  }
  return 0.0;
}

nlohmann::json SearchResult::to_json(const SearchConfig& cfg) const {
  nlohmann::json j;
  j["note"] = "objectives use norm_lower, a lower bound for the operator constant; reported gaps understate true gaps";
  j["config"] = {{"seed", cfg.seed},
                 {"population", cfg.population},
                 {"iterations", cfg.iterations},
                 {"mutation", number_json(cfg.mutation)},
                 {"cell_rate", number_json(cfg.cell_rate)},
                 {"objective", to_string(cfg.objective)},
                 {"rh_cap", number_json(cfg.rh_cap)},
                 {"scope", to_string(cfg.constants.scope)},
                 {"strategy", to_string(cfg.constants.search.strategy)}};
  j["initial_objective"] = number_json(trace.empty() ? 0.0 : trace.front());
  j["best_objective"] = number_json(trace.empty() ? 0.0 : trace.back());
  j["accepted"] = accepted;
  j["evaluations"] = evaluations;
  j["trace"] = nlohmann::json::array();
  for (double v : trace) j["trace"].push_back(number_json(v));
  j["report"] = report.to_json(best.grid);
  j["best"] = {{"omega", copy_density(best.omega)}};
  j["best"]["sigma"] = nlohmann::json::array();
  for (const auto& s : best.sigmas) j["best"]["sigma"].push_back(copy_density(s));
  return j;
}

std::string SearchResult::trace_csv() const {
  std::ostringstream out;
  out << "iteration,objective\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", trace[i]);
    out << i << ',' << buf << '\n';
  }
  return out.str();
}

SearchResult ascend(const WeightSystem& start, const SearchConfig& cfg) {
  cfg.validate();
  SearchResult res;
  res.best = start;
  res.report = compute_constants(start, cfg.constants);
  ++res.evaluations;
  check_chain(res.report);
  double best = objective_value(res.report, cfg);
  if (!std::isfinite(best)) throw ValidationError("objective", "not finite at the start point");
  res.trace.push_back(best);

  const auto pop = static_cast<std::size_t>(cfg.population);
  for (int it = 1; it <= cfg.iterations; ++it) {
    std::vector<std::optional<WeightSystem>> cand(pop);
    std::vector<std::optional<ConstantsReport>> reports(pop);
    std::vector<double> value(pop, -std::numeric_limits<double>::infinity());
    std::vector<std::exception_ptr> errors(pop);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(pop); ++c) {
      const auto ci = static_cast<std::size_t>(c);
      try {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(it), static_cast<std::uint32_t>(c)};
        std::mt19937_64 rng(seq);
        auto omega = copy_density(res.best.omega);
        std::vector<std::vector<double>> sigma;
        for (const auto& s : res.best.sigmas) sigma.push_back(copy_density(s));
        mutate(omega, cfg, rng);
        for (auto& s : sigma) mutate(s, cfg, rng);
        cand[ci] = rebuild(res.best, std::move(omega), std::move(sigma));
        reports[ci] = compute_constants(*cand[ci], cfg.constants);
        const double v = objective_value(*reports[ci], cfg);
        if (std::isfinite(v)) value[ci] = v;
      } catch (...) {
        errors[ci] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    res.evaluations += static_cast<std::int64_t>(pop);

    std::size_t pick = pop;
    for (std::size_t c = 0; c < pop; ++c)
      if (value[c] > best && (pick == pop || value[c] > value[pick])) pick = c;
    if (pick < pop) {
      check_chain(*reports[pick]);
      res.best = std::move(*cand[pick]);
      res.report = std::move(*reports[pick]);
      best = value[pick];
      ++res.accepted;
    }
    res.trace.push_back(best);
  }
  return res;
}

}  // namespace mwt
