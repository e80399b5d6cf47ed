#pragma once

// Data-parallel kernels behind the maximal-function and constants modules.
//
// Every kernel has a `_serial` reference and an OpenMP variant. The two are
// bit-identical: parallel loops only partition independent outputs, every
// floating sum runs in the same order as the reference, and reductions are
// max-reductions.

#include <cstdint>
#include <span>
#include <vector>

#include "mwt/grid.hpp"
#include "mwt/weights.hpp"

namespace mwt {

/// Flat indexing of the standard grid tree (levels 0..L, row-major per level).
class TreeLayout {
 public:
  explicit TreeLayout(const GridConfig& g);

  const GridConfig& grid() const { return grid_; }
  int levels() const { return grid_.max_level; }
  std::int64_t node_count() const { return level_begin_.back(); }
  std::int64_t level_begin(int level) const { return level_begin_[level]; }
  std::int64_t level_size(int level) const { return level_begin_[level + 1] - level_begin_[level]; }
  int level_of(std::int64_t node) const;
  std::int64_t parent(std::int64_t node) const { return parent_[node]; }
  /// nu^d children of an internal node, in row-major offset order.
  std::span<const std::int64_t> children(std::int64_t node) const;
  std::int64_t node_of(const Cube& q) const;
  Cube cube(std::int64_t node) const;
  /// Leaf (finest grid cube) containing each lattice cell.
  const std::vector<std::int64_t>& leaf_of_cell() const { return leaf_of_cell_; }
  /// Cells of each leaf, row-major inside the leaf.
  std::span<const std::int64_t> leaf_cells(std::int64_t leaf_rank) const;
  std::int64_t leaf_count() const { return level_size(levels()); }
  std::int64_t cells_per_leaf() const { return cells_per_leaf_; }

 private:
  GridConfig grid_;
  std::vector<std::int64_t> level_begin_;
  std::vector<std::int64_t> parent_;
  std::vector<std::int64_t> children_;
  std::vector<std::int64_t> leaf_of_cell_;
  std::vector<std::int64_t> leaf_cells_;
  std::int64_t fanout_ = 0;
  std::int64_t cells_per_leaf_ = 1;
};

/// Per-node masses in cell units. Leaves sum their cells, parents sum their
/// children, so parent == sum(children) holds exactly.
std::vector<double> tree_masses_serial(const TreeLayout& t, std::span<const double> density);
std::vector<double> tree_masses(const TreeLayout& t, std::span<const double> density);

/// prod_i mass_i(node) / cells(node)
std::vector<double> tree_products(const TreeLayout& t, std::span<const std::vector<double>> masses);

struct LeafMax {
  std::vector<double> value;  // per leaf
  std::vector<int> level;     // level of the witness cube (smallest level on ties)
};

/// For each leaf, the maximum of node_values over its root path.
LeafMax tree_running_max_serial(const TreeLayout& t, std::span<const double> node_values);
LeafMax tree_running_max(const TreeLayout& t, std::span<const double> node_values);

/// For each node Q in `roots`: sum over leaves x of Q of
/// (max over nodes P with x in P subset Q of node_values[P])^power * leaf_weight[x].
std::vector<double> tree_local_energy_serial(const TreeLayout& t, std::span<const double> node_values,
                                             std::span<const double> leaf_weight, double power,
                                             std::span<const std::int64_t> roots);
std::vector<double> tree_local_energy(const TreeLayout& t, std::span<const double> node_values,
                                      std::span<const double> leaf_weight, double power,
                                      std::span<const std::int64_t> roots);

/// A value for every lattice cube, grouped by side.
class LatticeTable {
 public:
  LatticeTable(int d, int n);
  int dim() const { return d_; }
  int resolution() const { return n_; }
  std::vector<double>& side(int s) { return by_side_[s]; }
  const std::vector<double>& side(int s) const { return by_side_[s]; }
  double at(int s, std::span<const int> corner) const;

 private:
  int d_;
  int n_;
  std::vector<std::vector<double>> by_side_;
};

/// prod_i average of g_i over every lattice cube.
LatticeTable lattice_products_serial(std::span<const DiscreteWeight> g);
LatticeTable lattice_products(std::span<const DiscreteWeight> g);

/// Per cell: max of the table over lattice cubes containing the cell.
/// The reference stamps every cube; the parallel kernel is a separable
/// sliding-window max per side.
std::vector<double> lattice_max_field_serial(const LatticeTable& table);
std::vector<double> lattice_max_field(const LatticeTable& table);

/// For each lattice cube Q: sum over cells x of Q of
/// (max over lattice P with x in P subset Q of table[P])^power * weight[x].
std::vector<double> lattice_local_energy_serial(const LatticeTable& table, std::span<const double> weight,
                                                double power, std::span<const Cube> cubes);
std::vector<double> lattice_local_energy(const LatticeTable& table, std::span<const double> weight,
                                         double power, std::span<const Cube> cubes);

}  // namespace mwt
