#include "sysfp/engine.hpp"

#include <algorithm>
#include <sstream>

namespace sysfp {

void ArrayConfig::validate() const {
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("array needs at least one row and column");
    // The exact double-width product must fit under the wide register's
    // carry headroom (its MSB may reach one bit above the hidden-bit slot).
    if (2 * (input_fmt.frac_bits + 1) > HID_BIT + 2)
        throw std::invalid_argument(
            "input format too wide: exact products would overflow the "
            "accumulator grid");
    if (accum_fmt.frac_bits + 1 < 2 * (input_fmt.frac_bits + 1))
        throw std::invalid_argument(
            "accumulator must carry at least double the input significand "
            "width");
    if (accum_fmt.frac_bits > HID_BIT - GUARD_BITS)
        throw std::invalid_argument(
            "accumulator fraction exceeds the wide register's capacity");
    if (input_fmt.exp_bits > accum_fmt.exp_bits)
        throw std::invalid_argument(
            "accumulator exponent range narrower than the input's");
}

PhaseCycles tile_phase_cycles(PipelineMode mode, uint64_t rows, uint64_t cols,
                              uint64_t m, uint64_t preload) {
    PhaseCycles p;
    p.preload = preload;
    if (m == 0) return p;
    p.fill = cols - 1;
    p.stream = m;
    p.drain = mode == PipelineMode::Skewed ? rows : 2 * rows - 1;
    p.round = 1;
    return p;
}

const char* stage_name(StageKind s) {
    switch (s) {
        case StageKind::Stage1: return "s1";
        case StageKind::Stage2: return "s2";
        case StageKind::Round: return "round";
    }
    return "?";
}

std::string events_to_csv(std::span<const PipelineEvent> events,
                          PipelineMode mode) {
    std::ostringstream out;
    out << "cycle,row,col,stage,mode\n";
    for (const PipelineEvent& e : events)
        out << e.cycle << ',' << e.row << ',' << e.col << ','
            << stage_name(e.stage) << ',' << mode_name(mode) << '\n';
    return out.str();
}

namespace {

// --- tagged pipeline registers ----------------------------------------------
// Every register carries the index of the A-column its payload belongs to.
// Reads assert the tag the schedule demands; a mismatch means two in-flight
// values collided in one register (a pipeline hazard) and aborts the column.

struct S1LatchBase {  // baseline / align-first stage boundary
    int64_t tag = -1;
    UnpackedFloat a;
    ChainValue in;
};

struct S1LatchSkew {
    int64_t tag = -1;
    Stage1Out s1;
};

struct ChainReg {
    int64_t tag = -1;
    ChainValue v;
};

struct WireReg {  // announced exponent, combinational within its cycle
    int64_t tag = -1;
    int32_t e_hat = 0;
    bool zero = true;
};

struct ColumnOutcome {
    std::vector<PipelineEvent> events;
    Diagnostics diag;
    uint64_t first_s1 = 0;
    uint64_t first_round = 0;
    bool saw_s1 = false;
    bool saw_round = false;
    std::string error;
};

void hazard(ColumnOutcome& res, const char* reg, uint64_t cyc, int64_t r,
            int64_t c, int64_t want, int64_t got) {
    std::ostringstream os;
    os << "pipeline hazard: " << reg << " at cycle " << cyc << " PE(" << r
       << "," << c << ") holds A-column " << got << ", schedule expects "
       << want;
    res.error = os.str();
}

// One array column under the two-cycles-per-row schedule.  In-cycle order
// emulates read-before-write latches: the rounder first (it reads the bottom
// chain register), then rows bottom-up, stage2 before stage1 within a row.
void run_column_baseline(const ArrayConfig& cfg,
                         const std::vector<UnpackedFloat>& w,
                         const std::vector<UnpackedFloat>& a, int64_t m,
                         int64_t c, uint64_t t0, PackedMatrix& out,
                         ColumnOutcome& res) {
    const int64_t rows = (int64_t)cfg.rows;
    const int64_t cols = (int64_t)cfg.cols;
    std::vector<S1LatchBase> s1l((size_t)rows);
    std::vector<ChainReg> chain((size_t)rows);
    if (cfg.trace) res.events.reserve((size_t)(m * (2 * rows + 1)));

    const int64_t u_max = (m - 1) + 2 * rows;
    for (int64_t u = 0; u <= u_max && res.error.empty(); ++u) {
        const uint64_t cyc = t0 + (uint64_t)(c + u);

        int64_t kr = u - 2 * rows;
        if (kr >= 0 && kr < m) {
            ChainReg& bot = chain[(size_t)(rows - 1)];
            if (bot.tag != kr) {
                hazard(res, "chain register", cyc, rows - 1, c, kr, bot.tag);
                break;
            }
            RoundResult rr = round_to_format(bot.v, cfg.accum_fmt);
            if (rr.saturated) res.diag.saturations++;
            if (rr.flushed) res.diag.flushes++;
            out.at((size_t)kr, (size_t)c) = rr.bits;
            if (!res.saw_round) {
                res.saw_round = true;
                res.first_round = cyc;
            }
            if (cfg.trace)
                res.events.push_back(
                    {cyc, (uint32_t)(rows - 1), (uint32_t)c, StageKind::Round});
        }

        for (int64_t r = rows - 1; r >= 0 && res.error.empty(); --r) {
            int64_t k2 = u - 2 * r - 1;
            if (k2 >= 0 && k2 < m) {
                S1LatchBase& l = s1l[(size_t)r];
                if (l.tag != k2) {
                    hazard(res, "stage1 latch", cyc, r, c, k2, l.tag);
                    break;
                }
                const UnpackedFloat& wt = w[(size_t)(r * cols + c)];
                ChainValue o =
                    cfg.mode == PipelineMode::AlignFirst
                        ? pe_step_align_first(l.a, wt, l.in, cfg.input_fmt,
                                              &res.diag)
                        : pe_step_baseline(l.a, wt, l.in, cfg.input_fmt,
                                           &res.diag);
                chain[(size_t)r] = {k2, o};
                if (cfg.trace)
                    res.events.push_back(
                        {cyc, (uint32_t)r, (uint32_t)c, StageKind::Stage2});
            }
            int64_t k1 = u - 2 * r;
            if (k1 >= 0 && k1 < m) {
                ChainValue in;
                if (r > 0) {
                    ChainReg& up = chain[(size_t)(r - 1)];
                    if (up.tag != k1) {
                        hazard(res, "chain register", cyc, r - 1, c, k1,
                               up.tag);
                        break;
                    }
                    in = up.v;
                }
                s1l[(size_t)r] = {k1, a[(size_t)(k1 * rows + r)], in};
                if (!res.saw_s1) {
                    res.saw_s1 = true;
                    res.first_s1 = cyc;
                }
                if (cfg.trace)
                    res.events.push_back(
                        {cyc, (uint32_t)r, (uint32_t)c, StageKind::Stage1});
            }
        }
    }
}

// One array column under the one-cycle-per-row schedule.  Stage2 of row r
// and stage1 of row r+1 share a cycle: stage1 reads only the announced-
// exponent wire that stage2 publishes combinationally.  In-cycle order:
// rounder, then all stage2 top-down reads-before-writes (descending rows),
// then all stage1 ascending so each sees its predecessor's fresh wire.
void run_column_skewed(const ArrayConfig& cfg,
                       const std::vector<UnpackedFloat>& w,
                       const std::vector<UnpackedFloat>& a, int64_t m,
                       int64_t c, uint64_t t0, PackedMatrix& out,
                       ColumnOutcome& res) {
    const int64_t rows = (int64_t)cfg.rows;
    const int64_t cols = (int64_t)cfg.cols;
    std::vector<S1LatchSkew> s1l((size_t)rows);
    std::vector<ChainReg> chain((size_t)rows);
    std::vector<WireReg> wire((size_t)rows);
    if (cfg.trace) res.events.reserve((size_t)(m * (2 * rows + 1)));

    const int64_t u_max = (m - 1) + rows + 1;
    for (int64_t u = 0; u <= u_max && res.error.empty(); ++u) {
        const uint64_t cyc = t0 + (uint64_t)(c + u);

        int64_t kr = u - rows - 1;
        if (kr >= 0 && kr < m) {
            ChainReg& bot = chain[(size_t)(rows - 1)];
            if (bot.tag != kr) {
                hazard(res, "chain register", cyc, rows - 1, c, kr, bot.tag);
                break;
            }
            RoundResult rr = round_to_format(bot.v, cfg.accum_fmt);
            if (rr.saturated) res.diag.saturations++;
            if (rr.flushed) res.diag.flushes++;
            out.at((size_t)kr, (size_t)c) = rr.bits;
            if (!res.saw_round) {
                res.saw_round = true;
                res.first_round = cyc;
            }
            if (cfg.trace)
                res.events.push_back(
                    {cyc, (uint32_t)(rows - 1), (uint32_t)c, StageKind::Round});
        }

        for (int64_t r = rows - 1; r >= 0 && res.error.empty(); --r) {
            int64_t k2 = u - r - 1;
            if (k2 < 0 || k2 >= m) continue;
            S1LatchSkew& l = s1l[(size_t)r];
            if (l.tag != k2) {
                hazard(res, "stage1 latch", cyc, r, c, k2, l.tag);
                break;
            }
            ChainValue in;
            if (r > 0) {
                ChainReg& up = chain[(size_t)(r - 1)];
                if (up.tag != k2) {
                    hazard(res, "chain register", cyc, r - 1, c, k2, up.tag);
                    break;
                }
                in = up.v;
            }
            ChainValue o = skewed_stage2(l.s1, in, cfg.input_fmt, &res.diag);
            chain[(size_t)r] = {k2, o};
            wire[(size_t)r] = {k2, o.exp, o.is_zero};
            if (cfg.trace)
                res.events.push_back(
                    {cyc, (uint32_t)r, (uint32_t)c, StageKind::Stage2});
        }

        for (int64_t r = 0; r < rows && res.error.empty(); ++r) {
            int64_t k1 = u - r;
            if (k1 < 0 || k1 >= m) continue;
            int32_t e_prev = 0;
            bool prev_zero = true;
            if (r > 0) {
                WireReg& wr = wire[(size_t)(r - 1)];
                if (wr.tag != k1) {
                    hazard(res, "exponent wire", cyc, r - 1, c, k1, wr.tag);
                    break;
                }
                e_prev = wr.e_hat;
                prev_zero = wr.zero;
            }
            const UnpackedFloat& wt = w[(size_t)(r * cols + c)];
            s1l[(size_t)r] = {k1, stage1_skewed(a[(size_t)(k1 * rows + r)], wt,
                                                e_prev, prev_zero)};
            if (!res.saw_s1) {
                res.saw_s1 = true;
                res.first_s1 = cyc;
            }
            if (cfg.trace)
                res.events.push_back(
                    {cyc, (uint32_t)r, (uint32_t)c, StageKind::Stage1});
        }
    }
}

}  // namespace

SystolicEngine::SystolicEngine(ArrayConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void SystolicEngine::preload_weights(const PackedMatrix& w) {
    if (w.rows != cfg_.rows || w.cols != cfg_.cols)
        throw DimensionMismatch(
            "weight tile is " + std::to_string(w.rows) + "x" +
            std::to_string(w.cols) + ", array is " + std::to_string(cfg_.rows) +
            "x" + std::to_string(cfg_.cols));
    weights_.resize(w.data.size());
    for (size_t i = 0; i < w.data.size(); ++i)
        weights_[i] = decode(w.data[i], cfg_.input_fmt);
    loaded_ = true;
}

UnpackedFloat SystolicEngine::weight_at(size_t r, size_t c) const {
    if (!loaded_) throw std::logic_error("weights not preloaded");
    if (r >= cfg_.rows || c >= cfg_.cols)
        throw std::out_of_range("weight index out of range");
    return weights_[r * cfg_.cols + c];
}

SimResult SystolicEngine::run_tile(const PackedMatrix& a) const {
    if (!loaded_) throw std::logic_error("weights not preloaded");
    if (a.cols != cfg_.rows)
        throw DimensionMismatch(
            "activation tile has " + std::to_string(a.cols) +
            " columns, the reduction needs " + std::to_string(cfg_.rows));

    SimResult res;
    res.traced = cfg_.trace;
    res.phases = tile_phase_cycles(cfg_.mode, cfg_.rows, cfg_.cols, a.rows,
                                   cfg_.effective_preload());
    res.total_cycles = res.phases.total();
    res.output = PackedMatrix(a.rows, cfg_.cols);
    const int64_t m = (int64_t)a.rows;
    if (m == 0) return res;

    std::vector<UnpackedFloat> adec(a.data.size());
    for (size_t i = 0; i < a.data.size(); ++i)
        adec[i] = decode(a.data[i], cfg_.input_fmt);

    const uint64_t t0 = cfg_.effective_preload();
    const int64_t cols = (int64_t)cfg_.cols;
    std::vector<ColumnOutcome> outcomes((size_t)cols);
    const bool par = cfg_.parallel;

#pragma omp parallel for schedule(static) if (par)
    for (int64_t c = 0; c < cols; ++c) {
        if (cfg_.mode == PipelineMode::Skewed)
            run_column_skewed(cfg_, weights_, adec, m, c, t0, res.output,
                              outcomes[(size_t)c]);
        else
            run_column_baseline(cfg_, weights_, adec, m, c, t0, res.output,
                                outcomes[(size_t)c]);
    }

    for (ColumnOutcome& oc : outcomes) {
        if (!oc.error.empty()) throw std::logic_error(oc.error);
        res.diag.merge(oc.diag);
        if (cfg_.trace)
            res.events.insert(res.events.end(), oc.events.begin(),
                              oc.events.end());
    }
    const ColumnOutcome& c0 = outcomes[0];
    if (c0.saw_s1 && c0.saw_round)
        res.drain_latency = c0.first_round - c0.first_s1 + 1;
    if (cfg_.trace) {
        std::sort(res.events.begin(), res.events.end());
        if (!res.events.empty() &&
            res.events.back().cycle + 1 != res.total_cycles)
            throw std::logic_error(
                "cycle accounting mismatch between events and phase model");
    }
    return res;
}

}  // namespace sysfp
