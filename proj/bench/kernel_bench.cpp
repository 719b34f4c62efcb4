// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include <map>

#include "poincare/assembly.hpp"
#include "poincare/blas_runtime.hpp"
#include "poincare/bloch.hpp"
#include "poincare/geometry.hpp"

using namespace poincare;

namespace {

const CellGeometry kDisk = CellGeometry::disk({0.5, 0.5}, 0.25);

const TriMesh& macro_mesh(int N) {
  static std::map<int, TriMesh> cache;
  auto it = cache.find(N);
  if (it == cache.end()) it = cache.emplace(N, build_macro_mesh(kDisk, N, 1.0 / 32, BoundaryCondition::Dirichlet)).first;
  return it->second;
}

void BM_StiffnessSerial(benchmark::State& state) {
  const TriMesh& mesh = macro_mesh(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness_serial(mesh, true, true));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(mesh.triangles.size()));
}

void BM_StiffnessParallel(benchmark::State& state) {
  const TriMesh& mesh = macro_mesh(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(mesh, true, true, Exec::Parallel));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(mesh.triangles.size()));
}

void BM_BandsSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(band_structure_serial(kDisk, static_cast<int>(state.range(0)), 1.0 / 16, 2));
}

void BM_BandsParallel(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(band_structure(kDisk, static_cast<int>(state.range(0)), 1.0 / 16, 2, Exec::Parallel));
}

}  // namespace

BENCHMARK(BM_StiffnessSerial)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StiffnessParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BandsSerial)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BandsParallel)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  pin_blas_kernel(argc, argv);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
