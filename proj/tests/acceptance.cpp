// ============================================================================
// Acceptance gate: one line per criterion, nonzero exit if any fail.
//
// Every tolerance is pinned here as a named constant next to the check that
// uses it.  The random sweeps use fixed seeds; a run is reproducible
// bit for bit.
// ============================================================================

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sysfp/cost_model.hpp"
#include "sysfp/engine.hpp"
#include "sysfp/oracle.hpp"
#include "sysfp/reference.hpp"
#include "sysfp/rng.hpp"
#include "sysfp/rounding.hpp"
#include "sysfp/workloads.hpp"

using namespace sysfp;

namespace {

#ifndef SYSFP_DATA_DIR
#define SYSFP_DATA_DIR "data"
#endif

std::string data_path(const std::string& file) {
  if (const char* env = std::getenv("SYSFP_DATA_DIR"))
    return std::string(env) + "/" + file;
  return std::string(SYSFP_DATA_DIR) + "/" + file;
}

const FpFormat kBf16 = FpFormat::bf16();
const FpFormat kFp32 = FpFormat::fp32();

std::string fmt_str(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return std::string(buf);
}

// --- criterion 1: the skewed pipeline is bit-exact against both two-stage
// organizations, across chain depths and the full operand range -------------

bool check_bit_equivalence(std::string& why) {
  constexpr int kChainsPerDepth = 12500; // 8 depths -> 100000 chains total
  constexpr int kDepths[] = {1, 2, 3, 4, 8, 16, 64, 128};
  std::mt19937_64 rng(0xace00001u);
  uint64_t chains = 0;
  for (int depth : kDepths) {
    for (int trial = 0; trial < kChainsPerDepth; ++trial) {
      std::vector<ChainTerm> terms((size_t)depth);
      for (auto& t : terms) {
        t.a_bits = random_normal_code(rng, kBf16);
        t.w_bits = random_normal_code(rng, kBf16);
      }
      const uint32_t align_first =
          reference_chain(PipelineMode::AlignFirst, terms, kBf16, kFp32).bits;
      const uint32_t baseline =
          reference_chain(PipelineMode::Baseline, terms, kBf16, kFp32).bits;
      const uint32_t skewed =
          reference_chain(PipelineMode::Skewed, terms, kBf16, kFp32).bits;
      if (baseline != align_first || skewed != baseline) {
        why = fmt_str(
            "depth %d trial %d: align_first=%08x baseline=%08x skewed=%08x",
            depth, trial, align_first, baseline, skewed);
        return false;
      }
      ++chains;
    }
  }
  why = fmt_str("%llu chains, zero mismatches",
                (unsigned long long)chains);
  return true;
}

// --- criterion 2: on chains whose alignment never pushes bits off the wide
// register, every pipeline equals the arbitrary-precision sum exactly -------

bool check_exact_against_oracle(std::string& why) {
  constexpr int kChains = 10000;
  constexpr int kMaxDepth = 32;
  constexpr int kExpLo = -1, kExpHi = 2; // keeps all alignment lossless
  std::mt19937_64 rng(0xace00002u);
  for (int trial = 0; trial < kChains; ++trial) {
    const size_t depth = 1 + rng() % kMaxDepth;
    std::vector<ChainTerm> terms(depth);
    std::vector<std::pair<uint32_t, uint32_t>> codes(depth);
    for (size_t i = 0; i < depth; ++i) {
      const uint32_t a = random_normal_code(rng, kBf16, kExpLo, kExpHi);
      const uint32_t w = random_normal_code(rng, kBf16, kExpLo, kExpHi);
      terms[i] = ChainTerm{a, w};
      codes[i] = {a, w};
    }
    const uint32_t want = oracle_chain(codes, kBf16, kFp32).bits;
    for (PipelineMode mode : {PipelineMode::Baseline, PipelineMode::Skewed}) {
      Diagnostics diag;
      const uint32_t got =
          reference_chain(mode, terms, kBf16, kFp32, &diag).bits;
      if (diag.sticky_collapses != 0) {
        why = fmt_str("trial %d (%s): alignment dropped bits on a chain "
                      "advertised as lossless",
                      trial, mode_name(mode));
        return false;
      }
      if (got != want) {
        why = fmt_str("trial %d (%s): got %08x, exact sum is %08x", trial,
                      mode_name(mode), got, want);
        return false;
      }
    }
  }
  why = fmt_str("%d chains vs exact sums, all equal, no bits dropped",
                kChains);
  return true;
}

// --- criterion 3: operand codecs, exhaustively over the code spaces --------

bool check_codec_round_trip(std::string& why) {
  uint64_t normals = 0, zeros = 0, rejected = 0;
  for (const FpFormat fmt : {kBf16, FpFormat::fp8_e4m3(), FpFormat::fp8_e5m2()}) {
    for (uint32_t code = 0; code <= fmt.code_mask(); ++code) {
      if (is_inf_code(code, fmt) || is_nan_code(code, fmt)) {
        try {
          (void)decode(code, fmt);
          why = fmt_str("%s %0*x: Inf/NaN was accepted", fmt.name(),
                        fmt.hex_digits(), code);
          return false;
        } catch (const UnsupportedEncoding&) {
          ++rejected;
        }
        continue;
      }
      const UnpackedFloat u = decode(code, fmt);
      if (is_normal_code(code, fmt)) {
        const uint32_t back = round_to_format(lift(u, fmt), fmt).bits;
        if (back != code) {
          why = fmt_str("%s %0*x: round-tripped to %0*x", fmt.name(),
                        fmt.hex_digits(), code, fmt.hex_digits(), back);
          return false;
        }
        if (fmt.kind == FormatKind::BF16) {
          // Widening a bf16 operand into fp32 is exact by construction.
          const uint32_t wide = round_to_format(lift(u, fmt), kFp32).bits;
          if (wide != (code << 16)) {
            why = fmt_str("bf16 %04x widened to %08x, want %08x", code, wide,
                          code << 16);
            return false;
          }
        }
        ++normals;
      } else if (!u.is_zero) {
        why = fmt_str("%s %0*x: zero/subnormal code did not flush to zero",
                      fmt.name(), fmt.hex_digits(), code);
        return false;
      } else {
        ++zeros;
      }
    }
  }
  why = fmt_str("%llu normals round-tripped, %llu flushed, %llu rejected",
                (unsigned long long)normals, (unsigned long long)zeros,
                (unsigned long long)rejected);
  return true;
}

// --- criterion 4: per-column drain latency and the issue schedule ----------

struct ColumnTiming {
  uint64_t drain = 0;
  // s1/s2 issue cycles per row, for the dependency checks.
  std::vector<std::vector<uint64_t>> s1, s2;
};

ColumnTiming run_column(PipelineMode mode, size_t rows, size_t m) {
  ArrayConfig cfg;
  cfg.rows = rows;
  cfg.cols = 1;
  cfg.mode = mode;
  cfg.preload_cycles = 0;
  cfg.trace = true;
  std::mt19937_64 rng(0xace00004u + rows);
  PackedMatrix w(rows, 1), a(m, rows);
  for (auto& c : w.data) c = random_normal_code(rng, kBf16, -2, 2);
  for (auto& c : a.data) c = random_normal_code(rng, kBf16, -2, 2);
  SystolicEngine eng(cfg);
  eng.preload_weights(w);
  const SimResult res = eng.run_tile(a);
  ColumnTiming t;
  t.drain = res.drain_latency;
  t.s1.resize(rows);
  t.s2.resize(rows);
  for (const PipelineEvent& e : res.event_log()) {
    if (e.stage == StageKind::Stage1) t.s1[e.row].push_back(e.cycle);
    if (e.stage == StageKind::Stage2) t.s2[e.row].push_back(e.cycle);
  }
  for (auto& v : t.s1) std::sort(v.begin(), v.end());
  for (auto& v : t.s2) std::sort(v.begin(), v.end());
  return t;
}

bool check_drain_latency(std::string& why) {
  constexpr size_t kMaxRows = 128;
  constexpr size_t kStreamCols = 2;
  for (size_t rows = 1; rows <= kMaxRows; ++rows) {
    const ColumnTiming base = run_column(PipelineMode::Baseline, rows, kStreamCols);
    const ColumnTiming skew = run_column(PipelineMode::Skewed, rows, kStreamCols);
    if (base.drain != 2 * rows + 1) {
      why = fmt_str("rows=%zu: two-stage drain is %llu cycles, want %zu", rows,
                    (unsigned long long)base.drain, 2 * rows + 1);
      return false;
    }
    if (skew.drain != rows + 2) {
      why = fmt_str("rows=%zu: skewed drain is %llu cycles, want %zu", rows,
                    (unsigned long long)skew.drain, rows + 2);
      return false;
    }
    if (base.drain - skew.drain != rows - 1) {
      why = fmt_str("rows=%zu: drain advantage %llu, want rows-1", rows,
                    (unsigned long long)(base.drain - skew.drain));
      return false;
    }
  }

  // Dependency schedule, spot-checked on an 8-deep column: the skewed
  // pipeline issues a successor's stage 1 in the same cycle as its
  // predecessor's stage 2; the two-stage pipeline waits one more cycle.
  const size_t rows = 8, m = 4;
  const ColumnTiming base = run_column(PipelineMode::Baseline, rows, m);
  const ColumnTiming skew = run_column(PipelineMode::Skewed, rows, m);
  for (size_t r = 0; r + 1 < rows; ++r) {
    if (skew.s1[r + 1] != skew.s2[r]) {
      why = fmt_str("skewed row %zu: stage-1 issue does not overlap the "
                    "predecessor's stage 2",
                    r + 1);
      return false;
    }
    std::vector<uint64_t> shifted = base.s2[r];
    for (auto& c : shifted) ++c;
    if (base.s1[r + 1] != shifted) {
      why = fmt_str("two-stage row %zu: stage-1 issue is not one cycle after "
                    "the predecessor's stage 2",
                    r + 1);
      return false;
    }
  }
  // Full throughput: row 0 accepts one activation column per cycle.
  for (const ColumnTiming* t : {&base, &skew}) {
    if (t->s1[0].size() != m) {
      why = "row 0 did not see every activation column";
      return false;
    }
    for (size_t i = 0; i < m; ++i) {
      if (t->s1[0][i] != t->s1[0][0] + i) {
        why = "row 0 stage-1 issues are not back to back";
        return false;
      }
    }
  }
  why = fmt_str("rows 1..%zu: advantage == rows-1; issue schedule and "
                "throughput verified",
                kMaxRows);
  return true;
}

// --- criterion 5: shipped layer tables reproduce the calibrated savings ----

struct NetTargets {
  const char* file;
  double latency_mid, latency_tol; // percent
  double energy_mid, energy_tol;   // percent
};

bool check_network_calibration(std::string& why) {
  constexpr NetTargets kTargets[] = {
      {"mobilenet_v1.csv", 16.0, 5.0, 8.0, 4.0},
      {"resnet50.csv", 21.0, 5.0, 11.0, 4.0},
  };
  ArrayConfig cfg; // 128x128, default preload
  const CostParams cost;
  std::string detail;
  for (const NetTargets& t : kTargets) {
    std::vector<LayerShape> layers;
    try {
      layers = load_layer_table(data_path(t.file));
    } catch (const std::exception& e) {
      why = std::string(t.file) + ": " + e.what();
      return false;
    }
    const NetworkReport rep = run_network(layers, cfg, cost);
    if (std::abs(rep.latency_reduction_pct - t.latency_mid) > t.latency_tol) {
      why = fmt_str("%s: latency reduction %.2f%% outside %.0f +/- %.0f%%",
                    t.file, rep.latency_reduction_pct, t.latency_mid,
                    t.latency_tol);
      return false;
    }
    if (std::abs(rep.energy_reduction_pct - t.energy_mid) > t.energy_tol) {
      why = fmt_str("%s: energy reduction %.2f%% outside %.0f +/- %.0f%%",
                    t.file, rep.energy_reduction_pct, t.energy_mid,
                    t.energy_tol);
      return false;
    }
    detail += fmt_str("%s%s latency -%.2f%% energy -%.2f%%",
                      detail.empty() ? "" : "; ", t.file,
                      rep.latency_reduction_pct, rep.energy_reduction_pct);
  }
  why = detail;
  return true;
}

// --- criterion 6: the energy crossover separates shallow from deep layers --

bool check_energy_crossover(std::string& why) {
  ArrayConfig cfg;
  const CostParams cost;
  std::string detail;
  for (const char* file : {"mobilenet_v1.csv", "resnet50.csv"}) {
    std::vector<LayerShape> layers;
    try {
      layers = load_layer_table(data_path(file));
    } catch (const std::exception& e) {
      why = std::string(file) + ": " + e.what();
      return false;
    }
    const NetworkReport rep = run_network(layers, cfg, cost);
    const size_t n = rep.layers.size();
    const size_t quarter = std::max<size_t>(1, n / 4);
    size_t early_increase = 0;
    for (size_t i = 0; i < quarter; ++i)
      if (rep.layers[i].trend == EnergyTrend::Increase) ++early_increase;
    size_t late_decrease = 0;
    const size_t half_start = n / 2;
    for (size_t i = half_start; i < n; ++i)
      if (rep.layers[i].trend == EnergyTrend::Decrease) ++late_decrease;
    const size_t late_total = n - half_start;
    if (early_increase == 0) {
      why = fmt_str("%s: no early layer pays more energy (expected the "
                    "large-M layers to sit below the crossover)",
                    file);
      return false;
    }
    if (2 * late_decrease <= late_total) {
      why = fmt_str("%s: only %zu of the last %zu layers save energy", file,
                    late_decrease, late_total);
      return false;
    }
    detail += fmt_str("%s%s: %zu/%zu early increase, %zu/%zu late decrease",
                      detail.empty() ? "" : "; ", file, early_increase,
                      quarter, late_decrease, late_total);
  }
  why = detail;
  return true;
}

// --- criterion 7: the area overhead is carried into reports unchanged ------

bool check_area_factor_reporting(std::string& why) {
  const std::vector<LayerShape> layers = {
      {"probe", LayerKind::Conv, 16, 16, 1, 1, 7, 7, 1, 0},
  };
  ArrayConfig cfg;
  const CostParams def;
  const std::string csv_def = report_to_csv(run_network(layers, cfg, def), def);
  if (csv_def.find("# skewed_area_factor,1.09") == std::string::npos) {
    why = "default report does not carry the 1.09 area factor";
    return false;
  }

  // A custom factor travels from a parameter file into the report verbatim.
  const auto path =
      std::filesystem::temp_directory_path() / "sysfp_acceptance_cost.txt";
  {
    std::ofstream out(path);
    out << "skewed_area_factor = 1.23\n";
  }
  CostParams custom;
  try {
    custom = load_cost_params(path.string());
  } catch (const std::exception& e) {
    std::filesystem::remove(path);
    why = e.what();
    return false;
  }
  std::filesystem::remove(path);
  const std::string csv_custom =
      report_to_csv(run_network(layers, cfg, custom), custom);
  if (csv_custom.find("# skewed_area_factor,1.23") == std::string::npos) {
    why = "configured 1.23 area factor did not reach the report";
    return false;
  }
  // The factor is report-only: energy numbers must not move with it.
  const NetworkReport a = run_network(layers, cfg, def);
  CostParams area_only = def;
  area_only.skewed_area_factor = 9.0;
  const NetworkReport b = run_network(layers, cfg, area_only);
  if (a.total_energy_skewed != b.total_energy_skewed) {
    why = "area factor leaked into the energy model";
    return false;
  }
  why = "1.09 default and 1.23 override both reported; energy unaffected";
  return true;
}

} // namespace

int main() {
  using Check = bool (*)(std::string&);
  const std::pair<const char*, Check> criteria[] = {
      {"bit-equivalence of all pipeline organizations", check_bit_equivalence},
      {"exactness against the arbitrary-precision oracle",
       check_exact_against_oracle},
      {"operand codec round-trip over full code spaces", check_codec_round_trip},
      {"drain-latency advantage and issue schedule", check_drain_latency},
      {"network layer tables reproduce calibrated savings",
       check_network_calibration},
      {"energy crossover splits shallow and deep layers",
       check_energy_crossover},
      {"area overhead reported out of band", check_area_factor_reporting},
  };

  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    std::string why;
    bool ok = false;
    try {
      ok = fn(why);
    } catch (const std::exception& e) {
      why = std::string("unexpected exception: ") + e.what();
    }
    if (ok) {
      std::printf("PASS  %s (%s)\n", name, why.c_str());
    } else {
      std::printf("FAIL  %s: %s\n", name, why.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  if (failures)
    std::printf("%d of %zu criteria failed\n", failures, std::size(criteria));
  else
    std::printf("all %zu criteria passed\n", std::size(criteria));
  return failures == 0 ? 0 : 1;
}
