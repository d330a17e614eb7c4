#include "sysfp/workloads.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sysfp {

const char* layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Conv: return "conv";
        case LayerKind::DepthwiseConv: return "dwconv";
        case LayerKind::FC: return "fc";
    }
    return "?";
}

LayerKind layer_kind_from_name(std::string_view s) {
    if (s == "conv") return LayerKind::Conv;
    if (s == "dwconv") return LayerKind::DepthwiseConv;
    if (s == "fc") return LayerKind::FC;
    throw InvalidShape("unknown layer kind: " + std::string(s));
}

void LayerShape::validate() const {
    if (name.empty()) throw InvalidShape("layer without a name");
    if (in_ch < 1 || out_ch < 1 || kernel_h < 1 || kernel_w < 1 || in_h < 1 ||
        in_w < 1 || stride < 1 || pad < 0)
        throw InvalidShape(name + ": dimensions must be positive");
    if (kind == LayerKind::DepthwiseConv && out_ch % in_ch != 0)
        throw InvalidShape(name +
                           ": depthwise out_ch must be a multiple of in_ch "
                           "(integer channel multiplier)");
    if (out_h() < 1 || out_w() < 1)
        throw InvalidShape(name + ": kernel does not fit the padded input");
}

int64_t LayerShape::out_h() const {
    return (in_h + 2 * pad - kernel_h) / stride + 1;
}

int64_t LayerShape::out_w() const {
    return (in_w + 2 * pad - kernel_w) / stride + 1;
}

GemmDims to_gemm(const LayerShape& layer) {
    layer.validate();
    GemmDims g;
    switch (layer.kind) {
        case LayerKind::Conv:
            g.m = layer.out_h() * layer.out_w();
            g.k = layer.in_ch * layer.kernel_h * layer.kernel_w;
            g.n = layer.out_ch;
            break;
        case LayerKind::DepthwiseConv:
            g.m = layer.out_h() * layer.out_w();
            g.k = layer.kernel_h * layer.kernel_w;
            g.n = layer.out_ch / layer.in_ch;
            g.groups = layer.in_ch;
            break;
        case LayerKind::FC:
            g.m = 1;
            g.k = layer.in_ch;
            g.n = layer.out_ch;
            break;
    }
    return g;
}

// --- layer table I/O ---------------------------------------------------------

namespace {

constexpr const char* kLayerHeader =
    "name,kind,in_ch,out_ch,kh,kw,in_h,in_w,stride,pad";

[[noreturn]] void fail(const std::string& path, size_t line,
                       const std::string& what) {
    throw InvalidShape(path + ":" + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
}

int64_t parse_int(const std::string& s, const std::string& path, size_t line) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        fail(path, line, "bad integer '" + s + "'");
    return v;
}

}  // namespace

std::vector<LayerShape> load_layer_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidShape(path + ": cannot open");
    std::string line;
    size_t lineno = 0;
    bool saw_header = false;
    std::vector<LayerShape> layers;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!saw_header) {
            if (t != kLayerHeader)
                fail(path, lineno,
                     std::string("expected header '") + kLayerHeader + "'");
            saw_header = true;
            continue;
        }
        std::vector<std::string> f = split_csv(t);
        if (f.size() != 10)
            fail(path, lineno,
                 "expected 10 fields, got " + std::to_string(f.size()));
        LayerShape l;
        l.name = f[0];
        try {
            l.kind = layer_kind_from_name(f[1]);
        } catch (const InvalidShape& e) {
            fail(path, lineno, e.what());
        }
        l.in_ch = parse_int(f[2], path, lineno);
        l.out_ch = parse_int(f[3], path, lineno);
        l.kernel_h = parse_int(f[4], path, lineno);
        l.kernel_w = parse_int(f[5], path, lineno);
        l.in_h = parse_int(f[6], path, lineno);
        l.in_w = parse_int(f[7], path, lineno);
        l.stride = parse_int(f[8], path, lineno);
        l.pad = parse_int(f[9], path, lineno);
        try {
            l.validate();
        } catch (const InvalidShape& e) {
            fail(path, lineno, e.what());
        }
        layers.push_back(std::move(l));
    }
    if (!saw_header) throw InvalidShape(path + ": missing header");
    return layers;
}

void store_layer_table(const std::string& path,
                       std::span<const LayerShape> layers) {
    std::ofstream out(path);
    if (!out) throw InvalidShape(path + ": cannot open for writing");
    out << kLayerHeader << '\n';
    for (const LayerShape& l : layers)
        out << l.name << ',' << layer_kind_name(l.kind) << ',' << l.in_ch
            << ',' << l.out_ch << ',' << l.kernel_h << ',' << l.kernel_w << ','
            << l.in_h << ',' << l.in_w << ',' << l.stride << ',' << l.pad
            << '\n';
    if (!out) throw InvalidShape(path + ": write failed");
}

// --- tiling -------------------------------------------------------------------

int64_t TilePlan::rows_used(int64_t kt) const {
    return kt == k_tiles - 1 ? dims.k - (k_tiles - 1) * rows : rows;
}

int64_t TilePlan::cols_used(int64_t nt) const {
    return nt == n_tiles - 1 ? dims.n - (n_tiles - 1) * cols : cols;
}

double TilePlan::utilization() const {
    return (double)(dims.k * dims.n) /
           (double)(k_tiles * rows * n_tiles * cols);
}

TilePlan plan_tiles(const GemmDims& g, int64_t rows, int64_t cols,
                    int64_t preload_cycles) {
    if (g.m < 1 || g.k < 1 || g.n < 1 || g.groups < 1)
        throw InvalidShape("GEMM dimensions must be positive");
    if (rows < 1 || cols < 1)
        throw InvalidShape("array needs at least one row and column");
    TilePlan p;
    p.dims = g;
    p.rows = rows;
    p.cols = cols;
    p.preload = preload_cycles < 0 ? (uint64_t)rows : (uint64_t)preload_cycles;
    p.k_tiles = (g.k + rows - 1) / rows;
    p.n_tiles = (g.n + cols - 1) / cols;
    return p;
}

// --- network sweep ------------------------------------------------------------

NetworkReport run_network(std::span<const LayerShape> layers,
                          const ArrayConfig& cfg, const CostParams& cost) {
    cfg.validate();
    cost.validate();
    NetworkReport r;
    for (const LayerShape& l : layers) {
        GemmDims g = to_gemm(l);
        TilePlan plan = plan_tiles(g, (int64_t)cfg.rows, (int64_t)cfg.cols,
                                   cfg.preload_cycles);
        LayerReport row;
        row.name = l.name;
        row.gemm = g;
        row.tiles = plan.tiles();
        row.utilization = plan.utilization();
        row.cycles_baseline = plan.total_cycles(PipelineMode::Baseline);
        row.cycles_skewed = plan.total_cycles(PipelineMode::Skewed);
        row.energy_baseline =
            energy(row.cycles_baseline, PipelineMode::Baseline, cost);
        row.energy_skewed = energy(row.cycles_skewed, PipelineMode::Skewed, cost);
        row.latency_delta_pct =
            100.0 *
            ((double)row.cycles_baseline - (double)row.cycles_skewed) /
            (double)row.cycles_baseline;
        row.energy_delta_pct = 100.0 *
                               (row.energy_baseline - row.energy_skewed) /
                               row.energy_baseline;
        row.trend =
            classify_energy_trend(row.cycles_baseline, row.cycles_skewed, cost);
        r.total_cycles_baseline += row.cycles_baseline;
        r.total_cycles_skewed += row.cycles_skewed;
        r.total_energy_baseline += row.energy_baseline;
        r.total_energy_skewed += row.energy_skewed;
        r.layers.push_back(std::move(row));
    }
    if (r.total_cycles_baseline > 0) {
        r.latency_reduction_pct = 100.0 *
                                  ((double)r.total_cycles_baseline -
                                   (double)r.total_cycles_skewed) /
                                  (double)r.total_cycles_baseline;
        r.energy_reduction_pct =
            100.0 * (r.total_energy_baseline - r.total_energy_skewed) /
            r.total_energy_baseline;
    }
    return r;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void report_rows(std::ostringstream& out, const std::string& name,
                 uint64_t cyc_b, uint64_t cyc_s, double en_b, double en_s,
                 double lat_pct, double en_pct) {
    out << name << ",baseline," << cyc_b << ',' << fmt_double(en_b) << ",0,0\n";
    out << name << ",skewed," << cyc_s << ',' << fmt_double(en_s) << ','
        << fmt_double(lat_pct) << ',' << fmt_double(en_pct) << '\n';
}

}  // namespace

std::string report_to_csv(const NetworkReport& r, const CostParams& cost) {
    std::ostringstream out;
    out << "layer,mode,cycles,energy,latency_delta_pct,energy_delta_pct\n";
    for (const LayerReport& l : r.layers)
        report_rows(out, l.name, l.cycles_baseline, l.cycles_skewed,
                    l.energy_baseline, l.energy_skewed, l.latency_delta_pct,
                    l.energy_delta_pct);
    report_rows(out, "TOTAL", r.total_cycles_baseline, r.total_cycles_skewed,
                r.total_energy_baseline, r.total_energy_skewed,
                r.latency_reduction_pct, r.energy_reduction_pct);
    out << "# skewed_area_factor," << fmt_double(cost.skewed_area_factor)
        << '\n';
    return out.str();
}

}  // namespace sysfp
