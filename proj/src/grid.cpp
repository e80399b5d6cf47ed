#include "mwt/grid.hpp"

#include <cmath>
#include <limits>

#include "mwt/error.hpp"
#include "mwt/index.hpp"

namespace mwt {

std::string GridId::name(int d) const {
  switch (kind) {
    case GridKind::standard:
      return "standard";
    case GridKind::lattice:
      return "lattice";
    case GridKind::shifted: {
      std::string s = "shifted:";
      for (int c = 0; c < d; ++c) s += ((alpha >> c) & 1u) ? '1' : '0';
      return s;
    }
  }
  return "standard";
}

GridId GridId::parse(const std::string& text, int d) {
  if (text == "standard") return standard();
  if (text == "lattice") return lattice();
  const std::string prefix = "shifted:";
  if (text.rfind(prefix, 0) == 0 && text.size() == prefix.size() + static_cast<std::size_t>(d)) {
    unsigned alpha = 0;
    for (int c = 0; c < d; ++c) {
      char ch = text[prefix.size() + c];
      if (ch != '0' && ch != '1') throw ValidationError("grid_id", "bad shift digit in " + text);
      if (ch == '1') alpha |= 1u << c;
    }
    return shifted(alpha);
  }
  throw ValidationError("grid_id", "unknown grid id '" + text + "'");
}

std::int64_t Cube::cells() const { return ipow(side, dim()); }

bool Cube::contains(const Cube& other) const {
  for (int c = 0; c < dim(); ++c) {
    if (other.corner[c] < corner[c] || other.corner[c] + other.side > corner[c] + side) return false;
  }
  return true;
}

bool Cube::intersects(const Cube& other) const {
  for (int c = 0; c < dim(); ++c) {
    if (other.corner[c] >= corner[c] + side || corner[c] >= other.corner[c] + other.side) return false;
  }
  return true;
}

bool Cube::contains_cell(std::span<const int> cell) const {
  for (int c = 0; c < dim(); ++c) {
    if (cell[c] < corner[c] || cell[c] >= corner[c] + side) return false;
  }
  return true;
}

int GridConfig::resolution() const {
  return static_cast<int>(ipow(nu, max_level) * (shifted ? 3 : 1));
}

int GridConfig::side_at(int level) const {
  return static_cast<int>(ipow(nu, max_level - level) * (shifted ? 3 : 1));
}

std::int64_t GridConfig::cell_count() const { return ipow(resolution(), d); }

void GridConfig::validate() const {
  if (d < 1) throw ValidationError("d", "dimension must be >= 1");
  if (nu < 2) throw ValidationError("nu", "grid base must be >= 2");
  if (max_level < 0) throw ValidationError("L_max", "finest level must be >= 0");
  if (shifted && nu % 3 != 2) {
    throw ValidationError("resolution", "1/3-shifted grids require nu = 2 (mod 3)");
  }
  if (static_cast<double>(resolution()) > 1e6 || std::pow(resolution(), d) > 1e8) {
    throw ValidationError("resolution", "lattice too large");
  }
}

GridConfig GridConfig::from_resolution(int d, int nu, int max_level, int resolution) {
  GridConfig g{d, nu, max_level, false};
  if (nu < 2) throw ValidationError("nu", "grid base must be >= 2");
  if (max_level < 0 || max_level > 30) throw ValidationError("L_max", "finest level out of range");
  const std::int64_t plain = ipow(nu, max_level);
  if (resolution == plain) {
    g.shifted = false;
  } else if (resolution == 3 * plain) {
    g.shifted = true;
  } else {
    throw ValidationError("resolution", "must equal nu^L_max or 3*nu^L_max");
  }
  g.validate();
  return g;
}

int nu_for_rho(double rho) {
  if (!(rho > 1.0) || !std::isfinite(rho)) throw ValidationError("rho", "rho must lie in (1, inf)");
  return std::max(2, static_cast<int>(std::ceil(rho - 1e-12)));
}

namespace {

// Shift of `grid` at `level` on axis c, in cells.
int axis_shift(const GridConfig& g, GridId grid, int level, int c) {
  if (grid.kind != GridKind::shifted || ((grid.alpha >> c) & 1u) == 0) return 0;
  const int third = g.side_at(level) / 3;
  return (level % 2 == 0) ? third : -third;
}

}  // namespace

Cube root_cube(const GridConfig& g) {
  return grid_cube(g, GridId::standard(), 0, std::vector<int>(g.d, 0));
}

Cube grid_cube(const GridConfig& g, GridId grid, int level, std::vector<int> offset) {
  if (grid.kind == GridKind::lattice) throw DomainError("grid_cube: lattice cubes have no level");
  if (grid.kind == GridKind::shifted && !g.shifted) throw DomainError("shifted grids are disabled");
  if (level < 0 || level > g.max_level) throw DomainError("grid level out of range");
  if (static_cast<int>(offset.size()) != g.d) throw DomainError("offset dimension mismatch");
  Cube q;
  q.grid = grid;
  q.level = level;
  q.side = g.side_at(level);
  q.corner.resize(g.d);
  for (int c = 0; c < g.d; ++c) q.corner[c] = offset[c] * q.side + axis_shift(g, grid, level, c);
  q.offset = std::move(offset);
  return q;
}

Cube lattice_cube(const GridConfig& g, std::vector<int> corner, int side) {
  if (static_cast<int>(corner.size()) != g.d) throw DomainError("corner dimension mismatch");
  Cube q;
  q.grid = GridId::lattice();
  q.level = -1;
  q.side = side;
  q.offset = corner;
  q.corner = std::move(corner);
  if (side < 1 || !in_domain(g, q)) throw DomainError("alignment: cube outside the unit cube");
  return q;
}

Cube lattice_cube_from_unit(const GridConfig& g, std::span<const double> lower, double side) {
  const double n = g.resolution();
  auto to_cells = [&](double x, const char* what) {
    const double scaled = x * n;
    const double r = std::round(scaled);
    if (std::abs(scaled - r) > 1e-9) {
      throw DomainError(std::string("alignment: ") + what + " is not a multiple of the cell width");
    }
    return static_cast<int>(r);
  };
  if (static_cast<int>(lower.size()) != g.d) throw DomainError("corner dimension mismatch");
  std::vector<int> corner(g.d);
  for (int c = 0; c < g.d; ++c) corner[c] = to_cells(lower[c], "corner");
  return lattice_cube(g, std::move(corner), to_cells(side, "side"));
}

bool in_domain(const GridConfig& g, const Cube& q) {
  const int n = g.resolution();
  for (int c = 0; c < q.dim(); ++c) {
    if (q.corner[c] < 0 || q.corner[c] + q.side > n) return false;
  }
  return true;
}

Cube locate(const GridConfig& g, GridId grid, int level, std::span<const int> point) {
  const int side = g.side_at(level);
  std::vector<int> offset(g.d);
  for (int c = 0; c < g.d; ++c) {
    offset[c] = static_cast<int>(floor_div(point[c] - axis_shift(g, grid, level, c), side));
  }
  return grid_cube(g, grid, level, std::move(offset));
}

Cube ancestor(const GridConfig& g, const Cube& q, int j) {
  if (q.grid.kind == GridKind::lattice) throw DomainError("ancestor: lattice cubes have no parent chain");
  if (j < 0 || j > q.level) throw DomainError("ancestor: out of root");
  if (j == 0) return q;
  return locate(g, q.grid, q.level - j, q.corner);
}

std::vector<Cube> children(const GridConfig& g, const Cube& q) {
  std::vector<Cube> out;
  if (q.grid.kind == GridKind::lattice || q.level >= g.max_level) return out;
  const int child_side = q.side / g.nu;
  std::vector<int> probe(g.d);
  for_each_point(g.d, g.nu, [&](std::span<const int> delta) {
    for (int c = 0; c < g.d; ++c) probe[c] = q.corner[c] + delta[c] * child_side;
    out.push_back(locate(g, q.grid, q.level + 1, probe));
  });
  return out;
}

std::vector<Cube> enumerate_cubes(const GridConfig& g, GridScope scope) {
  std::vector<Cube> out;
  const int n = g.resolution();
  if (scope.kind == GridKind::lattice) {
    for (int s = n; s >= 1; --s) {
      for_each_point(g.d, n - s + 1, [&](std::span<const int> corner) {
        Cube q;
        q.grid = GridId::lattice();
        q.level = -1;
        q.side = s;
        q.corner.assign(corner.begin(), corner.end());
        q.offset = q.corner;
        out.push_back(std::move(q));
      });
    }
    return out;
  }
  const GridId grid = scope.kind == GridKind::standard ? GridId::standard() : GridId::shifted(scope.alpha);
  if (grid.kind == GridKind::shifted && !g.shifted) throw DomainError("shifted grids are disabled");
  for (int level = 0; level <= g.max_level; ++level) {
    const int per_side = static_cast<int>(ipow(g.nu, level));
    // Shifted grids: offsets -1..per_side cover every candidate; keep in-domain ones.
    const int lo = grid.kind == GridKind::shifted ? -1 : 0;
    const int extent = grid.kind == GridKind::shifted ? per_side + 2 : per_side;
    for_each_point(g.d, extent, [&](std::span<const int> p) {
      std::vector<int> off(p.begin(), p.end());
      for (int& x : off) x += lo;
      Cube q = grid_cube(g, grid, level, std::move(off));
      if (in_domain(g, q)) out.push_back(std::move(q));
    });
  }
  return out;
}

std::int64_t count_lattice_cubes(const GridConfig& g) {
  const int n = g.resolution();
  std::int64_t total = 0;
  for (int s = 1; s <= n; ++s) total += ipow(n - s + 1, g.d);
  return total;
}

Cube shifted_cover(const GridConfig& g, const Cube& q) {
  if (!g.shifted) throw DomainError("shifted_cover: shifted grids are disabled");
  if (!in_domain(g, q)) throw DomainError("shifted_cover: cube outside the unit cube");
  const unsigned grids = 1u << g.d;
  for (int level = g.max_level; level >= 0; --level) {
    if (g.side_at(level) < q.side) continue;
    for (unsigned alpha = 0; alpha < grids; ++alpha) {
      Cube cover = locate(g, GridId::shifted(alpha), level, q.corner);
      if (!cover.contains(q) || !in_domain(g, cover)) continue;
      if (cover.side > 6 * q.side) {
        throw DomainError("cover-unavailable: smallest in-domain cover exceeds 6x sidelength");
      }
      return cover;
    }
  }
  throw DomainError("cover-unavailable: no in-domain shifted-grid cube contains the cube");
}

}  // namespace mwt
