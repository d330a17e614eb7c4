#pragma once
// ============================================================================
// Cycle-accurate weight-stationary systolic array.
//
// Geometry and schedule (rows R, cols C, A is M x R, W is R x C, output
// A x W is M x C):
//
//   * W is preloaded and stays put; preload costs `preload_cycles`
//     (default: one cycle per array row).
//   * A-columns stream from the West, one new column per cycle, with the
//     classic one-cycle-per-row input skew; they propagate East one column
//     per cycle.
//   * Partial sums flow South through a column of chained FMA stages and are
//     rounded once at the South edge (one extra cycle).
//
// With T0 = preload end, A-column k, array row r, array column c:
//
//   baseline / align_first   stage1 @ T0+k+c+2r   stage2 @ T0+k+c+2r+1
//                            round  @ T0+k+c+2R
//     (stage1 of row r+1 needs the normalized exponent produced at the end
//      of row r's stage2, so the sum advances one row per two cycles)
//
//   skewed                   stage1 @ T0+k+c+r    stage2 @ T0+k+c+r+1
//                            round  @ T0+k+c+R+1
//     (stage1 of row r+1 fires in the same cycle as row r's stage2, reading
//      only the announced-exponent wire; the sum advances one row per cycle
//      at the cost of one extra fix-up add stage before rounding)
//
// The engine simulates each array column independently (they share nothing
// but the read-only inputs), walking cycles with explicit tagged pipeline
// registers: every register read checks that the value it sees belongs to
// the A-column the schedule says it should.  A tag mismatch is a scheduling
// hazard and fails the run loudly.
// ============================================================================

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sysfp/datapath.hpp"
#include "sysfp/matrix.hpp"
#include "sysfp/rounding.hpp"

namespace sysfp {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TracingDisabled : std::logic_error {
    using std::logic_error::logic_error;
};

struct ArrayConfig {
    size_t rows = 128;
    size_t cols = 128;
    PipelineMode mode = PipelineMode::Skewed;
    FpFormat input_fmt = FpFormat::bf16();
    FpFormat accum_fmt = FpFormat::fp32();
    int64_t preload_cycles = -1;  // < 0: one cycle per array row
    bool trace = false;           // record per-stage pipeline events
    bool parallel = true;         // simulate array columns with OpenMP

    uint64_t effective_preload() const {
        return preload_cycles < 0 ? (uint64_t)rows : (uint64_t)preload_cycles;
    }
    void validate() const;  // throws std::invalid_argument
};

struct PhaseCycles {
    uint64_t preload = 0;
    uint64_t fill = 0;    // first A-column propagating East across the array
    uint64_t stream = 0;  // one cycle per A-column
    uint64_t drain = 0;   // remaining in-array compute after the last stream slot
    uint64_t round = 0;   // final result's rounding cycle
    uint64_t total() const { return preload + fill + stream + drain + round; }
    bool operator==(const PhaseCycles&) const = default;
};

// Closed-form tile timing; the cycle engine reproduces these numbers event
// by event, and the workload planner uses them directly.
PhaseCycles tile_phase_cycles(PipelineMode mode, uint64_t rows, uint64_t cols,
                              uint64_t m, uint64_t preload);

enum class StageKind : uint8_t { Stage1, Stage2, Round };
const char* stage_name(StageKind s);

struct PipelineEvent {
    uint64_t cycle = 0;
    uint32_t row = 0;  // Round events report the bottom row
    uint32_t col = 0;
    StageKind stage = StageKind::Stage1;
    auto operator<=>(const PipelineEvent&) const = default;
};

// CSV lines `cycle,row,col,stage,mode`, header included.
std::string events_to_csv(std::span<const PipelineEvent> events,
                          PipelineMode mode);

struct SimResult {
    PackedMatrix output;  // M x cols packed accum_fmt codes
    PhaseCycles phases;
    uint64_t total_cycles = 0;
    // Cycles from the first A-column entering the array until its rounded
    // result leaves column 0, inclusive of both endpoint cycles.
    uint64_t drain_latency = 0;
    Diagnostics diag;
    bool traced = false;
    std::vector<PipelineEvent> events;  // populated only when traced

    const std::vector<PipelineEvent>& event_log() const {
        if (!traced) throw TracingDisabled("run_tile executed without trace");
        return events;
    }
};

class SystolicEngine {
  public:
    explicit SystolicEngine(ArrayConfig cfg);

    // Decode and load the stationary R x C weight tile.
    void preload_weights(const PackedMatrix& w);  // throws DimensionMismatch

    // Stream an M x R activation tile; returns output plus cycle accounting.
    SimResult run_tile(const PackedMatrix& a) const;

    const ArrayConfig& config() const { return cfg_; }
    bool weights_loaded() const { return loaded_; }
    UnpackedFloat weight_at(size_t r, size_t c) const;

  private:
    ArrayConfig cfg_;
    std::vector<UnpackedFloat> weights_;  // rows * cols, row-major
    bool loaded_ = false;
};

}  // namespace sysfp
