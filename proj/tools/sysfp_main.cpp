// ============================================================================
// sysfp — command-line driver for the systolic-array pipeline models.
//
//   simulate   run one weight-stationary tile from matrix files
//   verify     cross-check the three PE pipelines and the exact oracle
//   network    sweep a CNN layer table and report cycles/energy per mode
//   trace      dump the per-PE event schedule of a small tile as CSV
//
// Every option can also be set through an SYSFP_* environment variable
// (flag --rows <-> SYSFP_ROWS, and so on; command-line wins).  Exit codes:
// 0 success, 1 verification found a mismatch, 2 bad input or usage.
// ============================================================================

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "sysfp/cost_model.hpp"
#include "sysfp/engine.hpp"
#include "sysfp/matrix_io.hpp"
#include "sysfp/oracle.hpp"
#include "sysfp/reference.hpp"
#include "sysfp/rng.hpp"
#include "sysfp/workloads.hpp"

using namespace sysfp;

namespace {

#ifndef SYSFP_DATA_DIR
#define SYSFP_DATA_DIR "data"
#endif

// --- shared option plumbing --------------------------------------------------

struct ArrayOpts {
  int64_t rows = 128;
  int64_t cols = 128;
  std::string mode = "skewed";
  std::string fmt = "bf16";
  std::string accum = "fp32";
  int64_t preload = -1;
  bool serial = false;
};

void add_geometry(CLI::App* cmd, ArrayOpts& o) {
  cmd->add_option("--rows", o.rows, "array rows (reduction depth)")
      ->envname("SYSFP_ROWS");
  cmd->add_option("--cols", o.cols, "array columns (output width)")
      ->envname("SYSFP_COLS");
  cmd->add_option("--preload", o.preload,
                  "weight preload cycles; -1 = one cycle per row")
      ->envname("SYSFP_PRELOAD");
}

void add_mode(CLI::App* cmd, ArrayOpts& o) {
  cmd->add_option("--mode", o.mode, "pipeline: align_first | baseline | skewed")
      ->envname("SYSFP_MODE");
}

void add_formats(CLI::App* cmd, ArrayOpts& o) {
  cmd->add_option("--fmt", o.fmt, "operand format: bf16 | fp8_e4m3 | fp8_e5m2")
      ->envname("SYSFP_FMT");
  cmd->add_option("--accum", o.accum, "accumulator format at the array edge")
      ->envname("SYSFP_ACCUM");
}

ArrayConfig to_config(const ArrayOpts& o, bool trace) {
  ArrayConfig cfg;
  if (o.rows < 1 || o.cols < 1)
    throw std::invalid_argument("array geometry must be at least 1x1");
  cfg.rows = (size_t)o.rows;
  cfg.cols = (size_t)o.cols;
  cfg.mode = mode_from_name(o.mode);
  cfg.input_fmt = FpFormat::from_name(o.fmt);
  cfg.accum_fmt = FpFormat::from_name(o.accum);
  cfg.preload_cycles = o.preload;
  cfg.trace = trace;
  cfg.parallel = !o.serial;
  cfg.validate();
  return cfg;
}

// Locate a built-in layer table: explicit env override, a ./data checkout,
// then the directory baked in at build time.
std::string find_table(const std::string& file) {
  std::vector<std::string> dirs;
  if (const char* env = std::getenv("SYSFP_DATA_DIR")) dirs.push_back(env);
  dirs.push_back("data");
  dirs.push_back(SYSFP_DATA_DIR);
  for (const std::string& d : dirs) {
    std::string p = d + "/" + file;
    if (std::filesystem::exists(p)) return p;
  }
  throw std::invalid_argument("cannot find built-in table '" + file +
                              "' (set SYSFP_DATA_DIR)");
}

// --- simulate ----------------------------------------------------------------

struct SimulateOpts {
  ArrayOpts array;
  std::string a_path, w_path, out_path;
};

int run_simulate(const SimulateOpts& o) {
  const FpFormat in_fmt = FpFormat::from_name(o.array.fmt);
  const PackedMatrix w = load_matrix(o.w_path, in_fmt);

  ArrayOpts shaped = o.array;
  shaped.rows = (int64_t)w.rows;
  shaped.cols = (int64_t)w.cols;
  const ArrayConfig cfg = to_config(shaped, /*trace=*/false);

  const PackedMatrix a = load_matrix(o.a_path, in_fmt);
  SystolicEngine eng(cfg);
  eng.preload_weights(w);
  const SimResult res = eng.run_tile(a);

  std::printf("mode,%s\n", mode_name(cfg.mode));
  std::printf("array,%zux%zu\n", cfg.rows, cfg.cols);
  std::printf("activations,%zu\n", a.rows);
  std::printf("preload,%llu\n", (unsigned long long)res.phases.preload);
  std::printf("fill,%llu\n", (unsigned long long)res.phases.fill);
  std::printf("stream,%llu\n", (unsigned long long)res.phases.stream);
  std::printf("drain,%llu\n", (unsigned long long)res.phases.drain);
  std::printf("round,%llu\n", (unsigned long long)res.phases.round);
  std::printf("total_cycles,%llu\n", (unsigned long long)res.total_cycles);
  std::printf("drain_latency,%llu\n", (unsigned long long)res.drain_latency);
  std::printf("saturations,%llu\n", (unsigned long long)res.diag.saturations);
  std::printf("flushes,%llu\n", (unsigned long long)res.diag.flushes);

  if (!o.out_path.empty())
    store_matrix(o.out_path, res.output, cfg.accum_fmt);
  return 0;
}

// --- verify ------------------------------------------------------------------

struct VerifyOpts {
  int64_t max_depth = 32;
  int64_t trials = 200;
  uint64_t seed = 1;
  std::string fmt = "bf16";
};

int run_verify(const VerifyOpts& o) {
  if (o.max_depth < 1) throw std::invalid_argument("--max-depth must be >= 1");
  if (o.trials < 0) throw std::invalid_argument("--trials must be >= 0");
  if (o.trials == 0) {
    std::fprintf(stderr,
                 "warning: --trials 0 checks nothing (vacuous pass)\n");
    return 0;
  }
  const FpFormat in_fmt = FpFormat::from_name(o.fmt);
  const FpFormat accum = FpFormat::fp32();
  std::mt19937_64 rng(o.seed);

  uint64_t mismatches = 0;
  for (int64_t depth = 1; depth <= o.max_depth; ++depth) {
    uint64_t mode_ok = 0, oracle_ok = 0, oracle_skipped = 0;
    for (int64_t trial = 0; trial < o.trials; ++trial) {
      // Full-range chain: the three pipelines must agree bit for bit.
      std::vector<ChainTerm> terms((size_t)depth);
      for (auto& t : terms) {
        t.a_bits = random_normal_code(rng, in_fmt);
        t.w_bits = random_normal_code(rng, in_fmt);
      }
      const uint32_t af =
          reference_chain(PipelineMode::AlignFirst, terms, in_fmt, accum).bits;
      const uint32_t bl =
          reference_chain(PipelineMode::Baseline, terms, in_fmt, accum).bits;
      const uint32_t sk =
          reference_chain(PipelineMode::Skewed, terms, in_fmt, accum).bits;
      if (af != bl || bl != sk) {
        ++mismatches;
        std::fprintf(stderr,
                     "mismatch: depth %lld trial %lld: align_first=%08x "
                     "baseline=%08x skewed=%08x\n",
                     (long long)depth, (long long)trial, af, bl, sk);
      } else {
        ++mode_ok;
      }

      // Narrow-range chain: alignment stays lossless, so the pipelines
      // must also equal the arbitrary-precision sum.  The safe exponent
      // window shrinks as chains get deeper; beyond 512 links the window
      // closes and the exactness check is skipped.
      int e_lo = -1, e_hi = 2;
      if (depth > 32) e_hi = 1;
      if (depth > 512) {
        ++oracle_skipped;
        continue;
      }
      std::vector<std::pair<uint32_t, uint32_t>> codes((size_t)depth);
      std::vector<ChainTerm> narrow((size_t)depth);
      for (size_t i = 0; i < (size_t)depth; ++i) {
        const uint32_t a = random_normal_code(rng, in_fmt, e_lo, e_hi);
        const uint32_t wcode = random_normal_code(rng, in_fmt, e_lo, e_hi);
        codes[i] = {a, wcode};
        narrow[i] = ChainTerm{a, wcode};
      }
      const uint32_t exact = oracle_chain(codes, in_fmt, accum).bits;
      const uint32_t got =
          reference_chain(PipelineMode::Skewed, narrow, in_fmt, accum).bits;
      if (got != exact) {
        ++mismatches;
        std::fprintf(stderr,
                     "mismatch: depth %lld trial %lld: skewed=%08x exact=%08x\n",
                     (long long)depth, (long long)trial, got, exact);
      } else {
        ++oracle_ok;
      }
    }
    std::printf("depth %lld: %llu/%lld cross-pipeline ok, %llu exact ok",
                (long long)depth, (unsigned long long)mode_ok,
                (long long)o.trials, (unsigned long long)oracle_ok);
    if (oracle_skipped)
      std::printf(" (%llu exactness checks skipped: no lossless window)",
                  (unsigned long long)oracle_skipped);
    std::printf("\n");
  }
  if (mismatches) {
    std::fprintf(stderr, "%llu mismatches\n", (unsigned long long)mismatches);
    return 1;
  }
  std::printf("all checks passed\n");
  return 0;
}

// --- network -----------------------------------------------------------------

struct NetworkOpts {
  std::string net = "mobilenet";
  ArrayOpts array;
  std::string cost_path, out_path;
  double clock_period = -1, baseline_power = -1, power_factor = -1,
         area_factor = -1;
};

int run_network_cmd(const NetworkOpts& o) {
  std::string table, label;
  if (o.net == "mobilenet" || o.net == "mobilenet_v1") {
    table = find_table("mobilenet_v1.csv");
    label = "mobilenet_v1";
  } else if (o.net == "resnet50") {
    table = find_table("resnet50.csv");
    label = "resnet50";
  } else {
    table = o.net;
    label = std::filesystem::path(o.net).stem().string();
  }
  const std::vector<LayerShape> layers = load_layer_table(table);

  CostParams cost;
  if (!o.cost_path.empty()) cost = load_cost_params(o.cost_path);
  if (o.clock_period > 0) cost.clock_period_ns = o.clock_period;
  if (o.baseline_power > 0) cost.baseline_power = o.baseline_power;
  if (o.power_factor > 0) cost.skewed_power_factor = o.power_factor;
  if (o.area_factor > 0) cost.skewed_area_factor = o.area_factor;
  cost.validate();

  const ArrayConfig cfg = to_config(o.array, /*trace=*/false);
  const NetworkReport rep = run_network(layers, cfg, cost);

  size_t inc = 0, dec = 0, neu = 0;
  for (const LayerReport& lr : rep.layers) {
    if (lr.trend == EnergyTrend::Increase) ++inc;
    else if (lr.trend == EnergyTrend::Decrease) ++dec;
    else ++neu;
  }

  std::printf("network,%s\n", label.c_str());
  std::printf("layers,%zu\n", rep.layers.size());
  std::printf("array,%zux%zu\n", cfg.rows, cfg.cols);
  std::printf("total_cycles_baseline,%llu\n",
              (unsigned long long)rep.total_cycles_baseline);
  std::printf("total_cycles_skewed,%llu\n",
              (unsigned long long)rep.total_cycles_skewed);
  std::printf("total_energy_baseline,%.10g\n", rep.total_energy_baseline);
  std::printf("total_energy_skewed,%.10g\n", rep.total_energy_skewed);
  std::printf("latency_reduction_pct,%.4f\n", rep.latency_reduction_pct);
  std::printf("energy_reduction_pct,%.4f\n", rep.energy_reduction_pct);
  std::printf("energy_crossover_pct,%.4f\n", 100.0 * crossover_threshold(cost));
  std::printf("layers_energy_increase,%zu\n", inc);
  std::printf("layers_energy_decrease,%zu\n", dec);
  std::printf("layers_energy_neutral,%zu\n", neu);
  std::printf("skewed_area_factor,%.10g\n", cost.skewed_area_factor);

  if (!o.out_path.empty()) {
    std::ofstream out(o.out_path);
    if (!out) throw std::invalid_argument(o.out_path + ": cannot open");
    out << report_to_csv(rep, cost);
  }
  return 0;
}

// --- trace -------------------------------------------------------------------

struct TraceOpts {
  ArrayOpts array;
  int64_t m = 1;
};

int run_trace(const TraceOpts& o) {
  if (o.m < 0) throw std::invalid_argument("--m must be >= 0");
  ArrayConfig cfg = to_config(o.array, /*trace=*/true);

  // Unit operands: tracing is about the schedule, not the values.
  const uint32_t one = (uint32_t)cfg.input_fmt.bias << cfg.input_fmt.frac_bits;
  PackedMatrix w(cfg.rows, cfg.cols);
  for (auto& c : w.data) c = one;
  PackedMatrix a((size_t)o.m, cfg.rows);
  for (auto& c : a.data) c = one;

  SystolicEngine eng(cfg);
  eng.preload_weights(w);
  const SimResult res = eng.run_tile(a);
  std::fputs(events_to_csv(res.event_log(), cfg.mode).c_str(), stdout);
  std::printf("# drain_latency,%llu\n", (unsigned long long)res.drain_latency);
  std::printf("# total_cycles,%llu\n", (unsigned long long)res.total_cycles);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"weight-stationary systolic array pipeline simulator"};
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* c_sim =
      app.add_subcommand("simulate", "run one weight-stationary tile");
  c_sim->add_option("activations", sim.a_path,
                    "activation matrix file (.csv or .bin), M x rows")
      ->required()
      ->envname("SYSFP_ACTIVATIONS");
  c_sim->add_option("weights", sim.w_path,
                    "weight matrix file (.csv or .bin), rows x cols")
      ->required()
      ->envname("SYSFP_WEIGHTS");
  add_mode(c_sim, sim.array);
  add_formats(c_sim, sim.array);
  c_sim->add_option("--preload", sim.array.preload,
                    "weight preload cycles; -1 = one cycle per row")
      ->envname("SYSFP_PRELOAD");
  c_sim->add_flag("--serial", sim.array.serial,
                  "run array columns serially (no worker threads)")
      ->envname("SYSFP_SERIAL");
  c_sim->add_option("--out", sim.out_path, "write the output matrix here")
      ->envname("SYSFP_OUT");

  VerifyOpts ver;
  CLI::App* c_ver = app.add_subcommand(
      "verify", "cross-check pipeline organizations against the exact oracle");
  c_ver->add_option("--max-depth", ver.max_depth, "largest chain depth")
      ->envname("SYSFP_MAX_DEPTH");
  c_ver->add_option("--trials", ver.trials, "random chains per depth")
      ->envname("SYSFP_TRIALS");
  c_ver->add_option("--seed", ver.seed, "random seed")->envname("SYSFP_SEED");
  c_ver->add_option("--fmt", ver.fmt, "operand format")->envname("SYSFP_FMT");

  NetworkOpts net;
  CLI::App* c_net = app.add_subcommand(
      "network", "sweep a CNN layer table and report both pipelines");
  c_net->add_option("--net", net.net,
                    "mobilenet | resnet50 | path to a layer table csv")
      ->envname("SYSFP_NET");
  add_geometry(c_net, net.array);
  c_net->add_option("--cost", net.cost_path, "cost parameter file")
      ->envname("SYSFP_COST");
  c_net->add_option("--clock-period", net.clock_period,
                    "clock period in ns (overrides --cost)")
      ->envname("SYSFP_CLOCK_PERIOD");
  c_net->add_option("--baseline-power", net.baseline_power,
                    "two-stage pipeline power (overrides --cost)")
      ->envname("SYSFP_BASELINE_POWER");
  c_net->add_option("--power-factor", net.power_factor,
                    "skewed pipeline power factor (overrides --cost)")
      ->envname("SYSFP_POWER_FACTOR");
  c_net->add_option("--area-factor", net.area_factor,
                    "skewed pipeline area factor (overrides --cost)")
      ->envname("SYSFP_AREA_FACTOR");
  c_net->add_option("--out", net.out_path, "write the per-layer report here")
      ->envname("SYSFP_OUT");

  TraceOpts tra;
  CLI::App* c_tra = app.add_subcommand(
      "trace", "dump the per-PE event schedule of a small tile");
  add_geometry(c_tra, tra.array);
  add_mode(c_tra, tra.array);
  add_formats(c_tra, tra.array);
  c_tra->add_option("--m", tra.m, "number of streamed activation rows")
      ->envname("SYSFP_M");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (const char* fi = std::getenv("SYSFP_FAULT_INJECT")) {
    if (fi[0] != '\0' && std::string(fi) != "0") {
      std::fprintf(stderr,
                   "warning: exponent-fix fault injection is ON "
                   "(SYSFP_FAULT_INJECT=%s)\n",
                   fi);
      set_fault_injection(true);
    }
  }

  try {
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_ver->parsed()) return run_verify(ver);
    if (c_net->parsed()) return run_network_cmd(net);
    if (c_tra->parsed()) return run_trace(tra);
  } catch (const MatrixIoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const InvalidShape& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DimensionMismatch& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const UnsupportedEncoding& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
