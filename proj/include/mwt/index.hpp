#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mwt {

inline std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Row-major linear index of `point` in a box of equal `extent` per axis
/// (axis 0 varies slowest).
inline std::int64_t linear_index(std::span<const int> point, std::int64_t extent) {
  std::int64_t idx = 0;
  for (int x : point) idx = idx * extent + x;
  return idx;
}

inline std::vector<int> unlinear_index(std::int64_t idx, int d, std::int64_t extent) {
  std::vector<int> p(d);
  for (int c = d - 1; c >= 0; --c) {
    p[c] = static_cast<int>(idx % extent);
    idx /= extent;
  }
  return p;
}

/// Visit every point of [0, extent)^d in row-major order.
template <class F>
void for_each_point(int d, int extent, F&& fn) {
  if (extent <= 0) return;
  std::vector<int> p(d, 0);
  while (true) {
    fn(std::span<const int>(p));
    int c = d - 1;
    while (c >= 0 && ++p[c] == extent) p[c--] = 0;
    if (c < 0) return;
  }
}

/// Visit every point of the box lo + [0, extent)^d in row-major order.
template <class F>
void for_each_point_in(std::span<const int> lo, int extent, F&& fn) {
  const int d = static_cast<int>(lo.size());
  if (extent <= 0) return;
  std::vector<int> p(lo.begin(), lo.end());
  while (true) {
    fn(std::span<const int>(p));
    int c = d - 1;
    while (c >= 0 && ++p[c] == lo[c] + extent) {
      p[c] = lo[c];
      --c;
    }
    if (c < 0) return;
  }
}

}  // namespace mwt
