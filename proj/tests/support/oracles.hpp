#pragma once

// Independent brute-force reference computations. Nothing here uses the
// library's prefix tables, tree layout or kernels: every mass is a direct
// loop over cells and every supremum a loop over an explicit cube list.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

struct Box {
  std::vector<int> corner;
  int side = 0;
};

using Density = std::vector<double>;

inline std::int64_t cell_index(const std::vector<int>& p, int n) {
  std::int64_t idx = 0;
  for (int x : p) idx = idx * n + x;
  return idx;
}

template <class F>
void each_cell(const Box& b, F&& fn) {
  const int d = static_cast<int>(b.corner.size());
  std::vector<int> p = b.corner;
  while (true) {
    fn(p);
    int c = d - 1;
    while (c >= 0 && ++p[c] == b.corner[c] + b.side) {
      p[c] = b.corner[c];
      --c;
    }
    if (c < 0) return;
  }
}

inline double mass(const Density& w, int n, const Box& b) {
  double s = 0.0;
  each_cell(b, [&](const std::vector<int>& p) { s += w[static_cast<std::size_t>(cell_index(p, n))]; });
  return s;
}

inline double vol(const Box& b) { return std::pow(static_cast<double>(b.side), static_cast<double>(b.corner.size())); }

inline bool inside(const Box& big, const Box& small) {
  for (std::size_t c = 0; c < big.corner.size(); ++c)
    if (small.corner[c] < big.corner[c] || small.corner[c] + small.side > big.corner[c] + big.side) return false;
  return true;
}

inline bool contains_cell(const Box& b, const std::vector<int>& p) {
  for (std::size_t c = 0; c < p.size(); ++c)
    if (p[c] < b.corner[c] || p[c] >= b.corner[c] + b.side) return false;
  return true;
}

/// Standard nu-ary grid cubes of levels 0..L on a lattice of n = leaf * nu^L cells.
inline std::vector<Box> grid_boxes(int d, int nu, int L, int leaf = 1) {
  std::vector<Box> out;
  int n = leaf;
  for (int k = 0; k < L; ++k) n *= nu;
  int count = 1;
  for (int k = 0; k <= L; ++k) {
    const int side = n / count;
    std::vector<int> j(d, 0);
    while (true) {
      Box b;
      b.side = side;
      for (int c = 0; c < d; ++c) b.corner.push_back(j[c] * side);
      out.push_back(b);
      int c = d - 1;
      while (c >= 0 && ++j[c] == count) j[c--] = 0;
      if (c < 0) break;
    }
    count *= nu;
  }
  return out;
}

inline std::vector<Box> lattice_boxes(int d, int n) {
  std::vector<Box> out;
  for (int s = n; s >= 1; --s) {
    std::vector<int> j(d, 0);
    while (true) {
      out.push_back({j, s});
      int c = d - 1;
      while (c >= 0 && ++j[c] == n - s + 1) j[c--] = 0;
      if (c < 0) break;
    }
  }
  return out;
}

inline double product_average(const std::vector<Density>& g, int n, const Box& b) {
  double prod = 1.0;
  for (const auto& w : g) prod *= mass(w, n, b) / vol(b);
  return prod;
}

/// Per cell: max over `family` boxes containing it of the product of averages.
inline std::vector<double> maximal(const std::vector<Density>& g, int d, int n, const std::vector<Box>& family) {
  std::int64_t cells = 1;
  for (int c = 0; c < d; ++c) cells *= n;
  std::vector<double> out(static_cast<std::size_t>(cells), 0.0);
  for (const Box& b : family) {
    const double v = product_average(g, n, b);
    each_cell(b, [&](const std::vector<int>& p) {
      auto& o = out[static_cast<std::size_t>(cell_index(p, n))];
      o = std::max(o, v);
    });
  }
  return out;
}

struct System {
  int d = 1;
  int n = 1;
  std::vector<double> p_i;
  Density omega;
  std::vector<Density> sigma;

  double p() const {
    double s = 0.0;
    for (double q : p_i) s += 1.0 / q;
    return 1.0 / s;
  }
};

struct Constants {
  double ap = 0.0;
  double sp = 0.0;
  double rh = 0.0;
  double testing = 0.0;
  std::int64_t eligible = 0;
};

/// Localized energy of Q: for x in Q the max over family boxes P subset Q with x in P.
inline double local_energy(const System& s, const std::vector<Box>& family, const Box& q) {
  const double p = s.p();
  std::vector<Box> sub;
  for (const Box& b : family)
    if (inside(q, b)) sub.push_back(b);
  double e = 0.0;
  each_cell(q, [&](const std::vector<int>& x) {
    double best = 0.0;
    for (const Box& b : sub)
      if (contains_cell(b, x)) best = std::max(best, product_average(s.sigma, s.n, b));
    const double w = s.omega[static_cast<std::size_t>(cell_index(x, s.n))];
    if (best > 0.0 && w > 0.0) e += std::pow(best, p) * w;
  });
  return e;
}

/// Eligibility by scanning every lattice P containing Q with side >= rho * side(Q).
inline bool eligible(const System& s, const Box& q, double rho, double D) {
  for (const Box& P : lattice_boxes(s.d, s.n)) {
    if (P.side < rho * q.side * (1 - 1e-12) || P.side <= q.side || !inside(P, q)) continue;
    for (const auto& sig : s.sigma)
      if (mass(sig, s.n, P) <= D * mass(sig, s.n, q)) return true;
  }
  return false;
}

inline Constants constants(const System& s, const std::vector<Box>& family, double rho, double D) {
  const double p = s.p();
  const double inf = std::numeric_limits<double>::infinity();
  Constants c;
  for (const Box& q : family) {
    const double v = vol(q);
    double ap = mass(s.omega, s.n, q) / v;
    double norm = 1.0;
    bool positive = true;
    for (std::size_t i = 0; i < s.sigma.size(); ++i) {
      const double m = mass(s.sigma[i], s.n, q);
      const double conj = s.p_i[i] / (s.p_i[i] - 1.0);
      ap *= std::pow(m / v, p / conj);
      norm *= std::pow(m, p / s.p_i[i]);
      positive = positive && m > 0.0;
    }
    c.ap = std::max(c.ap, ap);
    double prod = 0.0;
    each_cell(q, [&](const std::vector<int>& x) {
      double cell = 1.0;
      for (std::size_t i = 0; i < s.sigma.size(); ++i)
        cell *= std::pow(s.sigma[i][static_cast<std::size_t>(cell_index(x, s.n))], p / s.p_i[i]);
      prod += cell;
    });
    const double rh = prod > 0.0 ? norm / prod : (norm > 0.0 ? inf : 0.0);
    c.rh = std::max(c.rh, rh);
    const double ratio = positive ? local_energy(s, family, q) / norm : 0.0;
    c.sp = std::max(c.sp, ratio);
    if (eligible(s, q, rho, D)) {
      ++c.eligible;
      c.testing = std::max(c.testing, ratio);
    }
  }
  return c;
}

inline bool close(double a, double b, double tol) {
  if (a == b) return true;
  if (std::isinf(a) || std::isinf(b)) return false;
  return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace oracle
