#include "sysfp/cost_model.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sysfp {

void CostParams::validate() const {
    if (!(clock_period_ns > 0) || !(baseline_power > 0) ||
        !(skewed_power_factor > 0) || !(skewed_area_factor > 0))
        throw std::invalid_argument("cost parameters must be positive");
}

double power(PipelineMode mode, const CostParams& p) {
    return mode == PipelineMode::Skewed
               ? p.baseline_power * p.skewed_power_factor
               : p.baseline_power;
}

double energy(uint64_t cycles, PipelineMode mode, const CostParams& p) {
    return (double)cycles * p.clock_period_ns * power(mode, p);
}

double crossover_threshold(const CostParams& p) {
    return 1.0 - 1.0 / p.skewed_power_factor;
}

const char* trend_name(EnergyTrend t) {
    switch (t) {
        case EnergyTrend::Decrease: return "decrease";
        case EnergyTrend::Increase: return "increase";
        case EnergyTrend::Neutral: return "neutral";
    }
    return "?";
}

EnergyTrend classify_energy_trend(uint64_t cycles_baseline,
                                  uint64_t cycles_skewed, const CostParams& p,
                                  double eps) {
    if (cycles_baseline == 0) return EnergyTrend::Neutral;
    double saving =
        (double)((int64_t)cycles_baseline - (int64_t)cycles_skewed) /
        (double)cycles_baseline;
    double t = crossover_threshold(p);
    if (std::fabs(saving - t) <= eps) return EnergyTrend::Neutral;
    return saving < t ? EnergyTrend::Increase : EnergyTrend::Decrease;
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

CostParams load_cost_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(path + ": cannot open");
    CostParams p;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line.substr(0, line.find('#')));
        if (t.empty()) continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        double v = 0;
        try {
            size_t used = 0;
            v = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": bad number '" + val + "'");
        }
        if (key == "clock_period_ns")
            p.clock_period_ns = v;
        else if (key == "baseline_power")
            p.baseline_power = v;
        else if (key == "skewed_power_factor")
            p.skewed_power_factor = v;
        else if (key == "skewed_area_factor")
            p.skewed_area_factor = v;
        else
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    p.validate();
    return p;
}

}  // namespace sysfp
