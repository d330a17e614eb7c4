#pragma once
// ============================================================================
// Latency / power / energy conversion for cycle counts.
//
// All costs are relative: the two-stage pipeline's power is the unit, the
// skewed pipeline pays a constant power factor for its extra add stage and
// wider speculative logic, and energy = cycles * clock_period * power.
// Power is mode-constant (no per-layer activity factors), so a layer saves
// energy exactly when its cycle saving exceeds 1 - 1/power_factor.
//
// The area factor is carried through to reports as a standalone overhead;
// it never enters the energy arithmetic.
// ============================================================================

#include <cstdint>
#include <string>

#include "sysfp/datapath.hpp"

namespace sysfp {

struct CostParams {
    double clock_period_ns = 1.0;
    double baseline_power = 1.0;
    double skewed_power_factor = 1.07;
    double skewed_area_factor = 1.09;
    void validate() const;  // throws std::invalid_argument
};

double power(PipelineMode mode, const CostParams& p);
double energy(uint64_t cycles, PipelineMode mode, const CostParams& p);

// Cycle-saving fraction above which the skewed pipeline wins on energy.
double crossover_threshold(const CostParams& p);

enum class EnergyTrend : uint8_t { Decrease, Increase, Neutral };
const char* trend_name(EnergyTrend t);

// Sign of the energy delta implied by a layer's cycle counts; savings within
// eps of the crossover threshold are Neutral.
EnergyTrend classify_energy_trend(uint64_t cycles_baseline,
                                  uint64_t cycles_skewed, const CostParams& p,
                                  double eps = 1e-6);

// `key = value` text file; '#' starts a comment.  Keys: clock_period_ns,
// baseline_power, skewed_power_factor, skewed_area_factor.
CostParams load_cost_params(const std::string& path);

}  // namespace sysfp
