#include "mwt/weights.hpp"

#include <cmath>
#include <sstream>

#include "mwt/error.hpp"
#include "mwt/index.hpp"

namespace mwt {

DiscreteWeight::DiscreteWeight(int d, int resolution, std::vector<double> density, const std::string& name)
    : d_(d), n_(resolution), density_(std::move(density)) {
  if (d < 1 || resolution < 1) throw ValidationError(name, "bad lattice shape");
  const std::int64_t cells = ipow(resolution, d);
  if (static_cast<std::int64_t>(density_.size()) != cells) {
    throw ValidationError(name, "expected " + std::to_string(cells) + " cells, got " +
                                    std::to_string(density_.size()));
  }
  for (std::size_t i = 0; i < density_.size(); ++i) {
    if (!std::isfinite(density_[i]) || density_[i] < 0.0) {
      throw ValidationError(name + "[" + std::to_string(i) + "]", "density must be finite and >= 0");
    }
  }

  // Summed-area table over (n+1)^d, built one axis at a time in lexicographic order.
  const std::int64_t ext = n_ + 1;
  const std::int64_t size = ipow(ext, d_);
  prefix_.assign(static_cast<std::size_t>(size), 0.0L);
  support_.assign(static_cast<std::size_t>(size), 0);
  std::vector<int> shifted(d_);
  for_each_point(d_, n_, [&](std::span<const int> p) {
    for (int c = 0; c < d_; ++c) shifted[c] = p[c] + 1;
    const auto t = static_cast<std::size_t>(linear_index(shifted, ext));
    const double v = density_[static_cast<std::size_t>(linear_index(p, n_))];
    prefix_[t] = v;
    support_[t] = v > 0.0 ? 1 : 0;
  });
  std::int64_t stride = 1;
  for (int axis = d_ - 1; axis >= 0; --axis) {
    for (std::int64_t t = 0; t < size; ++t) {
      if ((t / stride) % ext == 0) continue;
      prefix_[static_cast<std::size_t>(t)] += prefix_[static_cast<std::size_t>(t - stride)];
      support_[static_cast<std::size_t>(t)] += support_[static_cast<std::size_t>(t - stride)];
    }
    stride *= ext;
  }
  total_ = static_cast<double>(prefix_.back());
}

std::int64_t DiscreteWeight::table_index(std::span<const int> p) const { return linear_index(p, n_ + 1); }

void DiscreteWeight::check_aligned(std::span<const int> corner, int side) const {
  if (static_cast<int>(corner.size()) != d_) throw DomainError("alignment: cube dimension does not match the weight");
  for (int c = 0; c < d_; ++c) {
    if (corner[c] < 0 || side < 1 || corner[c] + side > n_) {
      throw DomainError("alignment: cube is not inside the lattice");
    }
  }
}

bool DiscreteWeight::box_vanishes(std::span<const int> corner, int side) const {
  check_aligned(corner, side);
  std::int64_t count = 0;
  std::vector<int> p(d_);
  for (unsigned mask = 0; mask < (1u << d_); ++mask) {
    int upper = 0;
    for (int c = 0; c < d_; ++c) {
      const bool hi = (mask >> c) & 1u;
      upper += hi;
      p[c] = corner[c] + (hi ? side : 0);
    }
    const auto v = support_[static_cast<std::size_t>(table_index(p))];
    count += ((d_ - upper) % 2 == 0) ? v : -v;
  }
  return count == 0;
}

double DiscreteWeight::box_mass(std::span<const int> corner, int side) const {
  if (box_vanishes(corner, side)) return 0.0;
  long double sum = 0.0L;
  std::vector<int> p(d_);
  for (unsigned mask = 0; mask < (1u << d_); ++mask) {
    int upper = 0;
    for (int c = 0; c < d_; ++c) {
      const bool hi = (mask >> c) & 1u;
      upper += hi;
      p[c] = corner[c] + (hi ? side : 0);
    }
    const long double v = prefix_[static_cast<std::size_t>(table_index(p))];
    sum += ((d_ - upper) % 2 == 0) ? v : -v;
  }
  return sum > 0.0L ? static_cast<double>(sum) : 0.0;
}

double DiscreteWeight::direct_mass(const Cube& q) const {
  check_aligned(q.corner, q.side);
  double sum = 0.0;
  for_each_point_in(q.corner, q.side, [&](std::span<const int> p) {
    sum += density_[static_cast<std::size_t>(linear_index(p, n_))];
  });
  return sum;
}

ExponentVector::ExponentVector(std::vector<double> exponents) : p_i_(std::move(exponents)) {
  if (p_i_.empty()) throw ValidationError("p", "at least one exponent is required");
  double inv = 0.0;
  for (std::size_t i = 0; i < p_i_.size(); ++i) {
    if (!std::isfinite(p_i_[i]) || !(p_i_[i] > 1.0)) {
      throw ValidationError("p[" + std::to_string(i) + "]", "exponents must lie in (1, inf)");
    }
    inv += 1.0 / p_i_[i];
  }
  p_ = 1.0 / inv;
  if (!(static_cast<double>(m()) * p_ > 1.0)) throw ValidationError("p", "mp must exceed 1");
}

DiscreteWeight product_density(std::span<const DiscreteWeight> sigmas, const ExponentVector& e) {
  if (sigmas.empty()) throw ValidationError("sigma", "no weights");
  const std::int64_t cells = sigmas[0].cell_count();
  std::vector<double> out(static_cast<std::size_t>(cells), 1.0);
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const double share = e.share(i);
    for (std::int64_t x = 0; x < cells; ++x) {
      const double v = sigmas[i].at(x);
      out[static_cast<std::size_t>(x)] *= v > 0.0 ? std::pow(v, share) : 0.0;
    }
  }
  return DiscreteWeight(sigmas[0].dim(), sigmas[0].resolution(), std::move(out), "product");
}

double product_mass(const WeightSystem& ws, const Cube& q) { return ws.product.mass(q); }

WeightSystem make_system(const GridConfig& grid, ExponentVector exponents, DiscreteWeight omega,
                         std::vector<DiscreteWeight> sigmas) {
  grid.validate();
  if (sigmas.size() != exponents.m()) {
    throw ValidationError("sigma", "need one sigma per exponent (" + std::to_string(exponents.m()) + ")");
  }
  auto check = [&](const DiscreteWeight& w, const std::string& name) {
    if (w.dim() != grid.d || w.resolution() != grid.resolution()) {
      throw ValidationError(name, "weight lattice does not match the grid");
    }
  };
  check(omega, "omega");
  for (std::size_t i = 0; i < sigmas.size(); ++i) check(sigmas[i], "sigma[" + std::to_string(i) + "]");
  WeightSystem ws;
  ws.grid = grid;
  ws.product = product_density(sigmas, exponents);
  ws.exponents = std::move(exponents);
  ws.omega = std::move(omega);
  ws.sigmas = std::move(sigmas);
  return ws;
}

std::vector<DiscreteWeight> weighted_inputs(const WeightSystem& ws, const std::vector<std::vector<double>>& f) {
  std::vector<DiscreteWeight> out;
  out.reserve(ws.m());
  if (!f.empty() && f.size() != ws.m()) throw ValidationError("f", "need one test function per sigma");
  for (std::size_t i = 0; i < ws.m(); ++i) {
    const auto sig = ws.sigmas[i].density();
    std::vector<double> g(sig.begin(), sig.end());
    if (!f.empty()) {
      if (f[i].size() != g.size()) throw ValidationError("f[" + std::to_string(i) + "]", "wrong cell count");
      for (std::size_t x = 0; x < g.size(); ++x) g[x] *= f[i][x];
    }
    out.emplace_back(ws.grid.d, ws.grid.resolution(), std::move(g), "f[" + std::to_string(i) + "]");
  }
  return out;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json j;
  j["valid"] = valid();
  j["issues"] = nlohmann::json::array();
  for (const auto& is : issues) j["issues"].push_back({{"field", is.field}, {"message", is.message}});
  j["degenerate_cell_count"] = degenerate_cells.size();
  j["degenerate_cells"] = degenerate_cells;
  return j;
}

namespace {

void check_array(ValidationReport& r, const std::vector<double>& a, std::int64_t cells, const std::string& name) {
  if (static_cast<std::int64_t>(a.size()) != cells) {
    r.issues.push_back({name, "expected " + std::to_string(cells) + " cells, got " + std::to_string(a.size())});
    return;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || a[i] < 0.0) {
      r.issues.push_back({name + "[" + std::to_string(i) + "]", "density must be finite and >= 0"});
      return;
    }
  }
}

}  // namespace

ValidationReport validate(const WeightInput& in, int default_nu) {
  ValidationReport r;
  const int nu = in.nu.value_or(default_nu);
  GridConfig g;
  try {
    g = GridConfig::from_resolution(in.d, nu, in.max_level, in.resolution);
  } catch (const ValidationError& e) {
    r.issues.push_back({e.field(), e.what()});
    return r;
  }
  if (in.p.empty()) r.issues.push_back({"p", "at least one exponent is required"});
  double inv = 0.0;
  for (std::size_t i = 0; i < in.p.size(); ++i) {
    if (!std::isfinite(in.p[i]) || !(in.p[i] > 1.0)) {
      r.issues.push_back({"p[" + std::to_string(i) + "]", "exponents must lie in (1, inf)"});
    }
    inv += 1.0 / in.p[i];
  }
  if (in.p_total && !in.p.empty()) {
    const double declared = 1.0 / *in.p_total;
    if (!(std::abs(declared - inv) <= 1e-12 * std::max(1.0, std::abs(inv)))) {
      std::ostringstream msg;
      msg << "exponent identity 1/p = sum 1/p_i fails (1/p = " << declared << ", sum = " << inv << ")";
      r.issues.push_back({"p_total", msg.str()});
    }
  }
  if (!in.p.empty() && inv > 0.0 && !(static_cast<double>(in.p.size()) / inv > 1.0)) {
    r.issues.push_back({"p", "mp must exceed 1 (the default D formula has a pole at mp = 1)"});
  }
  const std::int64_t cells = g.cell_count();
  check_array(r, in.omega, cells, "omega");
  if (in.sigma.size() != in.p.size()) {
    r.issues.push_back({"sigma", "need one sigma per exponent (" + std::to_string(in.p.size()) + ")"});
  }
  for (std::size_t i = 0; i < in.sigma.size(); ++i) check_array(r, in.sigma[i], cells, "sigma[" + std::to_string(i) + "]");
  if (!in.f.empty()) {
    if (in.f.size() != in.sigma.size()) r.issues.push_back({"f", "need one test function per sigma"});
    for (std::size_t i = 0; i < in.f.size(); ++i) check_array(r, in.f[i], cells, "f[" + std::to_string(i) + "]");
  }
  if (r.valid()) {
    for (std::int64_t x = 0; x < cells; ++x) {
      for (const auto& s : in.sigma) {
        if (s[static_cast<std::size_t>(x)] == 0.0) {
          r.degenerate_cells.push_back(x);
          break;
        }
      }
    }
  }
  return r;
}

ValidationReport validate(const WeightSystem& ws) {
  WeightInput in;
  in.d = ws.grid.d;
  in.nu = ws.grid.nu;
  in.max_level = ws.grid.max_level;
  in.resolution = ws.grid.resolution();
  in.p = ws.exponents.components();
  in.omega.assign(ws.omega.density().begin(), ws.omega.density().end());
  for (const auto& s : ws.sigmas) in.sigma.emplace_back(s.density().begin(), s.density().end());
  return validate(in, ws.grid.nu);
}

WeightSystem build_system(const WeightInput& in, int default_nu) {
  const ValidationReport r = validate(in, default_nu);
  if (!r.valid()) throw ValidationError(r.issues.front().field, r.issues.front().message);
  const GridConfig g = GridConfig::from_resolution(in.d, in.nu.value_or(default_nu), in.max_level, in.resolution);
  std::vector<DiscreteWeight> sig;
  for (std::size_t i = 0; i < in.sigma.size(); ++i) {
    sig.emplace_back(g.d, g.resolution(), in.sigma[i], "sigma[" + std::to_string(i) + "]");
  }
  return make_system(g, ExponentVector(in.p), DiscreteWeight(g.d, g.resolution(), in.omega, "omega"),
                     std::move(sig));
}

}  // namespace mwt
