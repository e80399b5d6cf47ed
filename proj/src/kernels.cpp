#include "mwt/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "mwt/error.hpp"
#include "mwt/index.hpp"

namespace mwt {

TreeLayout::TreeLayout(const GridConfig& g) : grid_(g) {
  const int d = g.d;
  level_begin_.assign(1, 0);
  for (int level = 0; level <= g.max_level; ++level) {
    level_begin_.push_back(level_begin_.back() + ipow(g.nu, level * d));
  }
  fanout_ = ipow(g.nu, d);
  parent_.assign(static_cast<std::size_t>(node_count()), -1);
  children_.assign(static_cast<std::size_t>(level_begin_[g.max_level] * fanout_), -1);
  for (int level = 1; level <= g.max_level; ++level) {
    const std::int64_t side = ipow(g.nu, level);
    const std::int64_t parent_side = side / g.nu;
    for_each_point(d, static_cast<int>(side), [&](std::span<const int> off) {
      std::vector<int> poff(off.begin(), off.end());
      for (int& x : poff) x /= g.nu;
      const std::int64_t node = level_begin_[level] + linear_index(off, side);
      parent_[static_cast<std::size_t>(node)] = level_begin_[level - 1] + linear_index(poff, parent_side);
    });
    // Children in row-major delta order.
    for (std::int64_t rank = 0; rank < level_size(level - 1); ++rank) {
      const std::vector<int> poff = unlinear_index(rank, d, parent_side);
      std::int64_t k = 0;
      for_each_point(d, g.nu, [&](std::span<const int> delta) {
        std::vector<int> off(d);
        for (int c = 0; c < d; ++c) off[c] = poff[c] * g.nu + delta[c];
        children_[static_cast<std::size_t>((level_begin_[level - 1] + rank) * fanout_ + k++)] =
            level_begin_[level] + linear_index(off, side);
      });
    }
  }
  const int n = g.resolution();
  const int leaf = g.leaf_side();
  const std::int64_t leaves_per_side = ipow(g.nu, g.max_level);
  cells_per_leaf_ = ipow(leaf, d);
  leaf_of_cell_.assign(static_cast<std::size_t>(g.cell_count()), 0);
  leaf_cells_.assign(static_cast<std::size_t>(g.cell_count()), 0);
  std::vector<std::int64_t> cursor(static_cast<std::size_t>(leaf_count()), 0);
  std::vector<int> loff(d);
  for_each_point(d, n, [&](std::span<const int> cell) {
    for (int c = 0; c < d; ++c) loff[c] = cell[c] / leaf;
    const std::int64_t rank = linear_index(loff, leaves_per_side);
    const std::int64_t x = linear_index(cell, n);
    leaf_of_cell_[static_cast<std::size_t>(x)] = rank;
  });
  // Row-major order inside each leaf.
  for (std::int64_t rank = 0; rank < leaf_count(); ++rank) {
    const std::vector<int> off = unlinear_index(rank, d, leaves_per_side);
    std::vector<int> lo(d);
    for (int c = 0; c < d; ++c) lo[c] = off[c] * leaf;
    for_each_point_in(lo, leaf, [&](std::span<const int> cell) {
      leaf_cells_[static_cast<std::size_t>(rank * cells_per_leaf_ + cursor[rank]++)] = linear_index(cell, n);
    });
  }
}

int TreeLayout::level_of(std::int64_t node) const {
  const auto it = std::upper_bound(level_begin_.begin(), level_begin_.end(), node);
  return static_cast<int>(it - level_begin_.begin()) - 1;
}

std::span<const std::int64_t> TreeLayout::children(std::int64_t node) const {
  if (level_of(node) >= grid_.max_level) return {};
  return {children_.data() + node * fanout_, static_cast<std::size_t>(fanout_)};
}

std::int64_t TreeLayout::node_of(const Cube& q) const {
  if (q.grid.kind != GridKind::standard) throw DomainError("tree: only standard-grid cubes are tree nodes");
  return level_begin_[q.level] + linear_index(q.offset, ipow(grid_.nu, q.level));
}

Cube TreeLayout::cube(std::int64_t node) const {
  const int level = level_of(node);
  return grid_cube(grid_, GridId::standard(), level,
                   unlinear_index(node - level_begin_[level], grid_.d, ipow(grid_.nu, level)));
}

std::span<const std::int64_t> TreeLayout::leaf_cells(std::int64_t leaf_rank) const {
  return {leaf_cells_.data() + leaf_rank * cells_per_leaf_, static_cast<std::size_t>(cells_per_leaf_)};
}

namespace {

template <bool Parallel>
std::vector<double> tree_masses_impl(const TreeLayout& t, std::span<const double> density) {
  std::vector<double> mass(static_cast<std::size_t>(t.node_count()), 0.0);
  const int last = t.levels();
  const std::int64_t base = t.level_begin(last);
  const std::int64_t leaves = t.leaf_count();
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::int64_t r = 0; r < leaves; ++r) {
    double s = 0.0;
    for (std::int64_t x : t.leaf_cells(r)) s += density[static_cast<std::size_t>(x)];
    mass[static_cast<std::size_t>(base + r)] = s;
  }
  for (int level = last - 1; level >= 0; --level) {
    const std::int64_t lb = t.level_begin(level);
    const std::int64_t count = t.level_size(level);
#pragma omp parallel for schedule(static) if (Parallel)
    for (std::int64_t r = 0; r < count; ++r) {
      double s = 0.0;
      for (std::int64_t c : t.children(lb + r)) s += mass[static_cast<std::size_t>(c)];
      mass[static_cast<std::size_t>(lb + r)] = s;
    }
  }
  return mass;
}

template <bool Parallel>
LeafMax tree_running_max_impl(const TreeLayout& t, std::span<const double> v) {
  std::vector<double> best(static_cast<std::size_t>(t.node_count()));
  std::vector<int> lvl(static_cast<std::size_t>(t.node_count()), 0);
  best[0] = v[0];
  for (int level = 1; level <= t.levels(); ++level) {
    const std::int64_t lb = t.level_begin(level);
    const std::int64_t count = t.level_size(level);
#pragma omp parallel for schedule(static) if (Parallel)
    for (std::int64_t r = 0; r < count; ++r) {
      const auto node = static_cast<std::size_t>(lb + r);
      const auto par = static_cast<std::size_t>(t.parent(lb + r));
      if (v[node] > best[par]) {
        best[node] = v[node];
        lvl[node] = level;
      } else {
        best[node] = best[par];
        lvl[node] = lvl[par];
      }
    }
  }
  LeafMax out;
  const std::int64_t base = t.level_begin(t.levels());
  out.value.assign(best.begin() + base, best.end());
  out.level.assign(lvl.begin() + base, lvl.end());
  return out;
}

double local_energy_of(const TreeLayout& t, std::span<const double> v, std::span<const double> leaf_weight,
                       double power, std::int64_t root) {
  const std::int64_t leaf_base = t.level_begin(t.levels());
  double sum = 0.0;
  // Depth-first with the running max carried down.
  auto visit = [&](auto&& self, std::int64_t node, double running) -> void {
    const double here = std::max(running, v[static_cast<std::size_t>(node)]);
    const auto kids = t.children(node);
    if (kids.empty()) {
      const double w = leaf_weight[static_cast<std::size_t>(node - leaf_base)];
      if (w > 0.0 && here > 0.0) sum += std::pow(here, power) * w;
      return;
    }
    for (std::int64_t c : kids) self(self, c, here);
  };
  visit(visit, root, 0.0);
  return sum;
}

template <bool Parallel>
std::vector<double> tree_local_energy_impl(const TreeLayout& t, std::span<const double> v,
                                           std::span<const double> leaf_weight, double power,
                                           std::span<const std::int64_t> roots) {
  std::vector<double> out(roots.size(), 0.0);
  const auto count = static_cast<std::int64_t>(roots.size());
#pragma omp parallel for schedule(dynamic, 8) if (Parallel)
  for (std::int64_t i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = local_energy_of(t, v, leaf_weight, power, roots[static_cast<std::size_t>(i)]);
  }
  return out;
}

template <bool Parallel>
LatticeTable lattice_products_impl(std::span<const DiscreteWeight> g) {
  if (g.empty()) throw DomainError("lattice_products: no inputs");
  const int d = g[0].dim();
  const int n = g[0].resolution();
  LatticeTable table(d, n);
  for (int s = 1; s <= n; ++s) {
    auto& vals = table.side(s);
    const auto count = static_cast<std::int64_t>(vals.size());
    const int extent = n - s + 1;
    const double cells = static_cast<double>(ipow(s, d));
#pragma omp parallel for schedule(static) if (Parallel)
    for (std::int64_t idx = 0; idx < count; ++idx) {
      const std::vector<int> corner = unlinear_index(idx, d, extent);
      double prod = 1.0;
      for (const auto& w : g) {
        prod *= w.box_mass(corner, s) / cells;
        if (prod == 0.0) break;
      }
      vals[static_cast<std::size_t>(idx)] = prod;
    }
  }
  return table;
}

// One axis of the separable window max: `in` has per-axis extents `dims`;
// output has dims[axis] replaced by n, out[x] = max of in[u] for u in
// [x - s + 1, x] along `axis`.
std::vector<double> window_max_axis(const std::vector<double>& in, std::vector<int>& dims, int axis, int s, int n) {
  const int d = static_cast<int>(dims.size());
  std::vector<int> out_dims = dims;
  out_dims[axis] = n;
  std::int64_t out_size = 1;
  for (int x : out_dims) out_size *= x;
  std::vector<double> out(static_cast<std::size_t>(out_size), 0.0);
  std::int64_t inner = 1;
  for (int c = axis + 1; c < d; ++c) inner *= dims[c];
  std::int64_t outer = 1;
  for (int c = 0; c < axis; ++c) outer *= dims[c];
  const int e = dims[axis];
  for (std::int64_t o = 0; o < outer; ++o) {
    for (std::int64_t i = 0; i < inner; ++i) {
      for (int x = 0; x < n; ++x) {
        const int lo = std::max(0, x - s + 1);
        const int hi = std::min(e - 1, x);
        double m = 0.0;
        for (int u = lo; u <= hi; ++u) m = std::max(m, in[static_cast<std::size_t>((o * e + u) * inner + i)]);
        out[static_cast<std::size_t>((o * n + x) * inner + i)] = m;
      }
    }
  }
  dims = out_dims;
  return out;
}

template <bool Parallel>
std::vector<double> lattice_local_energy_impl(const LatticeTable& table, std::span<const double> weight,
                                              double power, std::span<const Cube> cubes) {
  const int d = table.dim();
  const int n = table.resolution();
  std::vector<double> out(cubes.size(), 0.0);
  const auto count = static_cast<std::int64_t>(cubes.size());
#pragma omp parallel for schedule(dynamic, 4) if (Parallel)
  for (std::int64_t qi = 0; qi < count; ++qi) {
    const Cube& q = cubes[static_cast<std::size_t>(qi)];
    const int s = q.side;
    std::vector<double> local(static_cast<std::size_t>(ipow(s, d)), 0.0);
    std::vector<int> corner(d);
    std::vector<int> rel(d);
    for (int t = 1; t <= s; ++t) {
      for_each_point(d, s - t + 1, [&](std::span<const int> u) {
        for (int c = 0; c < d; ++c) corner[c] = q.corner[c] + u[c];
        const double val = table.at(t, corner);
        if (val <= 0.0) return;
        for_each_point_in(u, t, [&](std::span<const int> r) {
          auto& slot = local[static_cast<std::size_t>(linear_index(r, s))];
          slot = std::max(slot, val);
        });
      });
    }
    double sum = 0.0;
    std::int64_t k = 0;
    for_each_point_in(q.corner, s, [&](std::span<const int> cell) {
      const double m = local[static_cast<std::size_t>(k++)];
      const double w = weight[static_cast<std::size_t>(linear_index(cell, n))];
      if (m > 0.0 && w > 0.0) sum += std::pow(m, power) * w;
    });
    out[static_cast<std::size_t>(qi)] = sum;
  }
  return out;
}

}  // namespace

std::vector<double> tree_masses_serial(const TreeLayout& t, std::span<const double> density) {
  return tree_masses_impl<false>(t, density);
}
std::vector<double> tree_masses(const TreeLayout& t, std::span<const double> density) {
  return tree_masses_impl<true>(t, density);
}

std::vector<double> tree_products(const TreeLayout& t, std::span<const std::vector<double>> masses) {
  std::vector<double> out(static_cast<std::size_t>(t.node_count()), 1.0);
  const GridConfig& g = t.grid();
  for (std::int64_t node = 0; node < t.node_count(); ++node) {
    const double cells = static_cast<double>(ipow(g.side_at(t.level_of(node)), g.d));
    double prod = 1.0;
    for (const auto& m : masses) prod *= m[static_cast<std::size_t>(node)] / cells;
    out[static_cast<std::size_t>(node)] = prod;
  }
  return out;
}

LeafMax tree_running_max_serial(const TreeLayout& t, std::span<const double> v) {
  return tree_running_max_impl<false>(t, v);
}
LeafMax tree_running_max(const TreeLayout& t, std::span<const double> v) { return tree_running_max_impl<true>(t, v); }

std::vector<double> tree_local_energy_serial(const TreeLayout& t, std::span<const double> v,
                                             std::span<const double> leaf_weight, double power,
                                             std::span<const std::int64_t> roots) {
  return tree_local_energy_impl<false>(t, v, leaf_weight, power, roots);
}
std::vector<double> tree_local_energy(const TreeLayout& t, std::span<const double> v,
                                      std::span<const double> leaf_weight, double power,
                                      std::span<const std::int64_t> roots) {
  return tree_local_energy_impl<true>(t, v, leaf_weight, power, roots);
}

LatticeTable::LatticeTable(int d, int n) : d_(d), n_(n), by_side_(static_cast<std::size_t>(n + 1)) {
  for (int s = 1; s <= n; ++s) by_side_[s].assign(static_cast<std::size_t>(ipow(n - s + 1, d)), 0.0);
}

double LatticeTable::at(int s, std::span<const int> corner) const {
  return by_side_[s][static_cast<std::size_t>(linear_index(corner, n_ - s + 1))];
}

LatticeTable lattice_products_serial(std::span<const DiscreteWeight> g) { return lattice_products_impl<false>(g); }
LatticeTable lattice_products(std::span<const DiscreteWeight> g) { return lattice_products_impl<true>(g); }

std::vector<double> lattice_max_field_serial(const LatticeTable& table) {
  const int d = table.dim();
  const int n = table.resolution();
  std::vector<double> field(static_cast<std::size_t>(ipow(n, d)), 0.0);
  for (int s = n; s >= 1; --s) {
    for_each_point(d, n - s + 1, [&](std::span<const int> corner) {
      const double v = table.at(s, corner);
      for_each_point_in(corner, s, [&](std::span<const int> cell) {
        auto& slot = field[static_cast<std::size_t>(linear_index(cell, n))];
        slot = std::max(slot, v);
      });
    });
  }
  return field;
}

std::vector<double> lattice_max_field(const LatticeTable& table) {
  const int d = table.dim();
  const int n = table.resolution();
  const auto cells = static_cast<std::size_t>(ipow(n, d));
  std::vector<double> field(cells, 0.0);
#pragma omp parallel
  {
    std::vector<double> mine(cells, 0.0);
#pragma omp for schedule(dynamic, 1)
    for (int s = 1; s <= n; ++s) {
      std::vector<int> dims(d, n - s + 1);
      std::vector<double> cur = table.side(s);
      for (int axis = 0; axis < d; ++axis) cur = window_max_axis(cur, dims, axis, s, n);
      for (std::size_t x = 0; x < cells; ++x) mine[x] = std::max(mine[x], cur[x]);
    }
#pragma omp critical
    for (std::size_t x = 0; x < cells; ++x) field[x] = std::max(field[x], mine[x]);
  }
  return field;
}

std::vector<double> lattice_local_energy_serial(const LatticeTable& table, std::span<const double> weight,
                                                double power, std::span<const Cube> cubes) {
  return lattice_local_energy_impl<false>(table, weight, power, cubes);
}
std::vector<double> lattice_local_energy(const LatticeTable& table, std::span<const double> weight, double power,
                                         std::span<const Cube> cubes) {
  return lattice_local_energy_impl<true>(table, weight, power, cubes);
}

}  // namespace mwt
