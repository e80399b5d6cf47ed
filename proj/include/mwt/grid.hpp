#pragma once

// Cube arithmetic for nu-ary grids truncated to the unit cube [0,1)^d.
//
// All geometry is integral: a cube is stored by its lower corner and side in
// cells of the finest lattice. With shifted grids enabled the lattice has
// 3 * nu^L cells per side so that one-third shifts land on lattice points.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mwt {

enum class GridKind { standard, shifted, lattice };

struct GridId {
  GridKind kind = GridKind::standard;
  unsigned alpha = 0;  // bit c set: axis c carries the 1/3 shift

  static GridId standard() { return {GridKind::standard, 0}; }
  static GridId shifted(unsigned alpha) {
    return alpha == 0 ? standard() : GridId{GridKind::shifted, alpha};
  }
  static GridId lattice() { return {GridKind::lattice, 0}; }

  /// "standard", "shifted:01" (one digit per axis, axis 0 first) or "lattice".
  std::string name(int d) const;
  static GridId parse(const std::string& text, int d);

  friend bool operator==(const GridId&, const GridId&) = default;
};

struct Cube {
  GridId grid;
  int level = 0;            // -1 for lattice cubes
  std::vector<int> offset;  // grid index at `level`; lower corner for lattice cubes
  std::vector<int> corner;  // lower corner in finest-lattice cells
  int side = 0;             // sidelength in cells

  int dim() const { return static_cast<int>(corner.size()); }
  std::int64_t cells() const;
  bool contains(const Cube& other) const;
  bool intersects(const Cube& other) const;
  bool contains_cell(std::span<const int> cell) const;

  friend bool operator==(const Cube&, const Cube&) = default;
};

struct GridConfig {
  int d = 1;
  int nu = 2;
  int max_level = 0;
  bool shifted = false;

  int resolution() const;
  /// Side in cells of a level-`level` grid cube.
  int side_at(int level) const;
  std::int64_t cell_count() const;
  /// Cells per side of a finest grid cube (3 when shifted, else 1).
  int leaf_side() const { return shifted ? 3 : 1; }

  /// Throws ValidationError on d < 1, nu < 2, negative level, or shifted grids
  /// with nu != 2 (mod 3) (the 1/3-shifted grids are not nested otherwise).
  void validate() const;

  /// Infers `shifted` from resolution: nu^L (plain) or 3 nu^L (shifted).
  static GridConfig from_resolution(int d, int nu, int max_level, int resolution);
};

/// nu = ceil(rho), at least 2.
int nu_for_rho(double rho);

Cube root_cube(const GridConfig& g);
Cube grid_cube(const GridConfig& g, GridId grid, int level, std::vector<int> offset);
Cube lattice_cube(const GridConfig& g, std::vector<int> corner, int side);
/// Cube from unit-cube coordinates; DomainError unless corner and side are
/// multiples of the cell width and the cube lies in the domain.
Cube lattice_cube_from_unit(const GridConfig& g, std::span<const double> lower, double side);

bool in_domain(const GridConfig& g, const Cube& q);

/// The cube of `grid` at `level` containing lattice point `point`.
Cube locate(const GridConfig& g, GridId grid, int level, std::span<const int> point);

/// Q^(j). DomainError when j > q.level or q is a lattice cube.
Cube ancestor(const GridConfig& g, const Cube& q, int j);
std::vector<Cube> children(const GridConfig& g, const Cube& q);

struct GridScope {
  GridKind kind = GridKind::standard;
  unsigned alpha = 0;
  static GridScope standard() { return {GridKind::standard, 0}; }
  static GridScope shifted(unsigned alpha) { return {GridKind::shifted, alpha}; }
  static GridScope lattice() { return {GridKind::lattice, 0}; }
};

/// Grid scopes: in-domain cubes of levels 0..L, by level then row-major offset.
/// Lattice scope: every cube with lattice corners, by side descending then
/// row-major corner.
std::vector<Cube> enumerate_cubes(const GridConfig& g, GridScope scope);
std::int64_t count_lattice_cubes(const GridConfig& g);

/// Smallest in-domain cube of the 2^d shifted grids containing q
/// (ties: lowest alpha). DomainError when shifted grids are disabled or no
/// cover with sidelength <= 6 * side(q) exists inside the domain.
Cube shifted_cover(const GridConfig& g, const Cube& q);

}  // namespace mwt
