// Serial reference kernels against their OpenMP counterparts.
//
//   ./bench_kernels --benchmark_filter=Tree
//   OMP_NUM_THREADS=4 ./bench_kernels

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "mwt/grid.hpp"
#include "mwt/kernels.hpp"
#include "mwt/weights.hpp"

namespace {

using namespace mwt;

std::vector<double> lognormal(std::int64_t cells, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(cells));
  for (double& x : v) x = std::exp(z(rng));
  return v;
}

struct TreeFixture {
  GridConfig g;
  TreeLayout tree;
  std::vector<double> density;
  std::vector<double> products;
  std::vector<std::int64_t> roots;

  explicit TreeFixture(int level) : g{2, 2, level, false}, tree(g), density(lognormal(g.cell_count(), 1)) {
    std::vector<std::vector<double>> masses{tree_masses_serial(tree, density), tree_masses_serial(tree, lognormal(g.cell_count(), 2))};
    products = tree_products(tree, masses);
    roots.resize(static_cast<std::size_t>(tree.node_count()));
    std::iota(roots.begin(), roots.end(), 0);
  }
};

template <bool Parallel>
void TreeMasses(benchmark::State& state) {
  TreeFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto m = Parallel ? tree_masses(f.tree, f.density) : tree_masses_serial(f.tree, f.density);
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * f.g.cell_count());
}

template <bool Parallel>
void TreeRunningMax(benchmark::State& state) {
  TreeFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto m = Parallel ? tree_running_max(f.tree, f.products) : tree_running_max_serial(f.tree, f.products);
    benchmark::DoNotOptimize(m.value.data());
  }
  state.SetItemsProcessed(state.iterations() * f.tree.node_count());
}

template <bool Parallel>
void TreeLocalEnergy(benchmark::State& state) {
  TreeFixture f(static_cast<int>(state.range(0)));
  const auto leaf_w = lognormal(f.tree.leaf_count(), 3);
  for (auto _ : state) {
    auto e = Parallel ? tree_local_energy(f.tree, f.products, leaf_w, 2.0, f.roots)
                      : tree_local_energy_serial(f.tree, f.products, leaf_w, 2.0, f.roots);
    benchmark::DoNotOptimize(e.data());
  }
}

std::vector<DiscreteWeight> lattice_inputs(int d, int n) {
  std::int64_t cells = 1;
  for (int a = 0; a < d; ++a) cells *= n;
  return {DiscreteWeight(d, n, lognormal(cells, 4)), DiscreteWeight(d, n, lognormal(cells, 5))};
}

template <bool Parallel>
void LatticeProducts(benchmark::State& state) {
  const auto in = lattice_inputs(2, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto t = Parallel ? lattice_products(in) : lattice_products_serial(in);
    benchmark::DoNotOptimize(t.side(1).data());
  }
}

template <bool Parallel>
void LatticeMaxField(benchmark::State& state) {
  const auto in = lattice_inputs(2, static_cast<int>(state.range(0)));
  const auto table = lattice_products(in);
  for (auto _ : state) {
    auto m = Parallel ? lattice_max_field(table) : lattice_max_field_serial(table);
    benchmark::DoNotOptimize(m.data());
  }
}

template <bool Parallel>
void LatticeLocalEnergy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto in = lattice_inputs(1, n);
  const auto table = lattice_products(in);
  const auto w = lognormal(n, 6);
  std::vector<Cube> cubes;
  for (int s = 1; s <= n; ++s)
    for (int c = 0; c + s <= n; ++c) cubes.push_back(Cube{GridId::lattice(), -1, {c}, {c}, s});
  for (auto _ : state) {
    auto e = Parallel ? lattice_local_energy(table, w, 2.0, cubes) : lattice_local_energy_serial(table, w, 2.0, cubes);
    benchmark::DoNotOptimize(e.data());
  }
}

}  // namespace

BENCHMARK(TreeMasses<false>)->Arg(6)->Arg(8);
BENCHMARK(TreeMasses<true>)->Arg(6)->Arg(8);
BENCHMARK(TreeRunningMax<false>)->Arg(6)->Arg(8);
BENCHMARK(TreeRunningMax<true>)->Arg(6)->Arg(8);
BENCHMARK(TreeLocalEnergy<false>)->Arg(5)->Arg(6);
BENCHMARK(TreeLocalEnergy<true>)->Arg(5)->Arg(6);
BENCHMARK(LatticeProducts<false>)->Arg(16)->Arg(32);
BENCHMARK(LatticeProducts<true>)->Arg(16)->Arg(32);
BENCHMARK(LatticeMaxField<false>)->Arg(16)->Arg(32);
BENCHMARK(LatticeMaxField<true>)->Arg(16)->Arg(32);
BENCHMARK(LatticeLocalEnergy<false>)->Arg(32)->Arg(64);
BENCHMARK(LatticeLocalEnergy<true>)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
