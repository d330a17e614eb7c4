#pragma once
// ============================================================================
// CNN layer tables -> GEMM dimensions -> array tiles -> per-layer cycle and
// energy report.
//
// im2col mapping: a convolution becomes M x K x N with M = out_h * out_w,
// K = in_ch * kh * kw, N = out_ch.  Depthwise convolutions run as `in_ch`
// independent GEMMs with K = kh * kw and N = channel multiplier (one input
// channel per group), which surfaces their poor weight-array utilization
// instead of hiding it.  K-tiles re-stream activations and accumulate at the
// South edge in the accumulator format, so tiling adds no intermediate
// roundings.  Tile cycle costs come from the engine's closed-form phase
// model; the full array is always powered, whatever fraction a tile occupies.
// ============================================================================

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sysfp/cost_model.hpp"
#include "sysfp/engine.hpp"

namespace sysfp {

struct InvalidShape : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class LayerKind : uint8_t { Conv, DepthwiseConv, FC };
const char* layer_kind_name(LayerKind k);  // conv / dwconv / fc
LayerKind layer_kind_from_name(std::string_view s);

struct LayerShape {
    std::string name;
    LayerKind kind = LayerKind::Conv;
    int64_t in_ch = 1;
    int64_t out_ch = 1;
    int64_t kernel_h = 1;
    int64_t kernel_w = 1;
    int64_t in_h = 1;
    int64_t in_w = 1;
    int64_t stride = 1;
    int64_t pad = 0;

    void validate() const;  // throws InvalidShape
    int64_t out_h() const;
    int64_t out_w() const;
    bool operator==(const LayerShape&) const = default;
};

struct GemmDims {
    int64_t m = 1;
    int64_t k = 1;
    int64_t n = 1;
    int64_t groups = 1;  // independent GEMMs of these dims (depthwise)
    bool operator==(const GemmDims&) const = default;
};

GemmDims to_gemm(const LayerShape& layer);  // throws InvalidShape

// CSV `name,kind,in_ch,out_ch,kh,kw,in_h,in_w,stride,pad`, header required.
std::vector<LayerShape> load_layer_table(const std::string& path);
void store_layer_table(const std::string& path,
                       std::span<const LayerShape> layers);

struct TilePlan {
    GemmDims dims;
    int64_t rows = 0;  // array geometry
    int64_t cols = 0;
    uint64_t preload = 0;
    int64_t k_tiles = 0;
    int64_t n_tiles = 0;

    int64_t rows_used(int64_t kt) const;  // reduction rows a K-tile occupies
    int64_t cols_used(int64_t nt) const;
    uint64_t tiles() const {  // across all groups
        return (uint64_t)(dims.groups * k_tiles * n_tiles);
    }
    PhaseCycles per_tile(PipelineMode mode) const {
        return tile_phase_cycles(mode, (uint64_t)rows, (uint64_t)cols,
                                 (uint64_t)dims.m, preload);
    }
    uint64_t total_cycles(PipelineMode mode) const {
        return tiles() * per_tile(mode).total();
    }
    double utilization() const;  // occupied weight slots / provisioned slots
};

TilePlan plan_tiles(const GemmDims& g, int64_t rows, int64_t cols,
                    int64_t preload_cycles /* < 0: one cycle per row */);

struct LayerReport {
    std::string name;
    GemmDims gemm;
    uint64_t tiles = 0;
    double utilization = 0;
    uint64_t cycles_baseline = 0;
    uint64_t cycles_skewed = 0;
    double energy_baseline = 0;
    double energy_skewed = 0;
    double latency_delta_pct = 0;  // positive = the skewed pipeline saves
    double energy_delta_pct = 0;
    EnergyTrend trend = EnergyTrend::Neutral;
};

struct NetworkReport {
    std::vector<LayerReport> layers;
    uint64_t total_cycles_baseline = 0;
    uint64_t total_cycles_skewed = 0;
    double total_energy_baseline = 0;
    double total_energy_skewed = 0;
    double latency_reduction_pct = 0;
    double energy_reduction_pct = 0;
};

// Sweeps every layer over the array in cfg (rows/cols/preload; the mode
// field is ignored — both pipeline timings are always reported).
NetworkReport run_network(std::span<const LayerShape> layers,
                          const ArrayConfig& cfg, const CostParams& cost);

// CSV `layer,mode,cycles,energy,latency_delta_pct,energy_delta_pct`: two
// rows per layer, two TOTAL rows, then a comment line carrying the
// configured area factor.
std::string report_to_csv(const NetworkReport& r, const CostParams& cost);

}  // namespace sysfp
