#include <benchmark/benchmark.h>

#include "hkglue/donaldson.hpp"
#include "hkglue/gibbons_hawking.hpp"
#include "hkglue/gluing.hpp"
#include "hkglue/greens.hpp"
#include "hkglue/random.hpp"
#include "hkglue/scales.hpp"
#include "hkglue/topology.hpp"

namespace {

using namespace hkglue;

std::vector<Vec3> probe_points(int n, double scale, std::uint64_t seed) {
  Rng g(seed);
  std::vector<Vec3> xs;
  for (int i = 0; i < n; ++i) xs.emplace_back(uniform(g, -scale, scale), uniform(g, -scale, scale), uniform(g, 0.1, 3.0));
  return xs;
}

void BM_GreenNeck(benchmark::State& state) {
  const double lambda = 1.0 / static_cast<double>(state.range(0));
  const auto p = choose_monopole_points(1, 1, 0.0, 0, {}, lambda);
  const auto xs = probe_points(256, 2.0 / lambda, 1);
  for (auto _ : state)
    for (const auto& x : xs) benchmark::DoNotOptimize(green_neck(p, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_GreenNeck)->Arg(100)->Arg(10000);

void BM_QMatrixModel(benchmark::State& state) {
  const HKTripleField t = build_gh_triple(model_potential(2, 1.0), model_connection(2));
  Rng g(2);
  std::vector<ChartPoint> pts;
  for (int i = 0; i < 256; ++i)
    pts.push_back(make_point(ChartId::Cartesian4, {uniform(g, 1, 3), uniform(g, -2, 2), uniform(g, 0, 1), uniform(g, 0, 6)}));
  for (auto _ : state)
    for (const auto& p : pts) benchmark::DoNotOptimize(q_matrix(t, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pts.size()));
}
BENCHMARK(BM_QMatrixModel);

void BM_F0Inverse(benchmark::State& state) {
  Rng g(3);
  std::vector<SymTF3> S;
  for (int i = 0; i < 256; ++i) {
    Vec5 v;
    for (int k = 0; k < 5; ++k) v[k] = standard_normal(g);
    S.emplace_back(v / v.norm() * 0.1);
  }
  const Eigen::Matrix3d Q = Eigen::Matrix3d::Identity();
  for (auto _ : state)
    for (const auto& s : S) benchmark::DoNotOptimize(f0_inverse(s, Q));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(S.size()));
}
BENCHMARK(BM_F0Inverse);

void BM_EnumerateRoots(benchmark::State& state) {
  const IntersectionLattice L = dynkin_lattice(FiberTag::I0s);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_roots(L, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_EnumerateRoots)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ScaleS(benchmark::State& state) {
  const double lambda = 1e-3;
  const ScaleParams p = make_scale_params(make_geometry(default_gluing_params(lambda, 0.1)));
  const auto xs = probe_points(256, 5.0 / lambda, 4);
  for (auto _ : state)
    for (const auto& x : xs) benchmark::DoNotOptimize(scale_s(x, p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_ScaleS);

}  // namespace
BENCHMARK_MAIN();
