// Cycle-engine throughput: per-column OpenMP parallelism against the serial
// path, across pipeline organizations, plus the timing-free functional
// reference for scale.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>

#include "sysfp/engine.hpp"
#include "sysfp/reference.hpp"
#include "sysfp/rng.hpp"

using namespace sysfp;

namespace {

const FpFormat kBf16 = FpFormat::bf16();
const FpFormat kFp32 = FpFormat::fp32();

PackedMatrix random_matrix(std::mt19937_64& rng, size_t rows, size_t cols) {
  PackedMatrix m(rows, cols);
  for (auto& c : m.data) c = random_supported_code(rng, kBf16);
  return m;
}

constexpr size_t kRows = 64;
constexpr size_t kCols = 64;
constexpr size_t kStream = 64;

void bm_tile(benchmark::State& state) {
  const auto mode = static_cast<PipelineMode>(state.range(0));
  ArrayConfig cfg;
  cfg.rows = kRows;
  cfg.cols = kCols;
  cfg.mode = mode;
  cfg.parallel = state.range(1) != 0;
  std::mt19937_64 rng(0xbe7c4);
  const PackedMatrix w = random_matrix(rng, kRows, kCols);
  const PackedMatrix a = random_matrix(rng, kStream, kRows);
  SystolicEngine eng(cfg);
  eng.preload_weights(w);
  for (auto _ : state) {
    SimResult res = eng.run_tile(a);
    benchmark::DoNotOptimize(res.output.data.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * kStream * kRows * kCols);
  state.SetLabel(mode_name(mode));
}

void bm_reference(benchmark::State& state) {
  const auto mode = static_cast<PipelineMode>(state.range(0));
  std::mt19937_64 rng(0xbe7c5);
  const PackedMatrix w = random_matrix(rng, kRows, kCols);
  const PackedMatrix a = random_matrix(rng, kStream, kRows);
  for (auto _ : state) {
    auto out = reference_matmul(mode, a.data, kStream, kRows, w.data, kCols,
                                kBf16, kFp32);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * kStream * kRows * kCols);
  state.SetLabel(mode_name(mode));
}

} // namespace

BENCHMARK(bm_tile)
    ->ArgNames({"mode", "parallel"})
    ->ArgsProduct({{0, 1, 2}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

BENCHMARK(bm_reference)
    ->ArgNames({"mode"})
    ->Args({0})
    ->Args({1})
    ->Args({2})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
