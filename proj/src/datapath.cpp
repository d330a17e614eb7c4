#include "sysfp/datapath.hpp"

#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace sysfp {

const char* mode_name(PipelineMode m) {
    switch (m) {
        case PipelineMode::AlignFirst: return "align_first";
        case PipelineMode::Baseline: return "baseline";
        case PipelineMode::Skewed: return "skewed";
    }
    return "?";
}

PipelineMode mode_from_name(std::string_view s) {
    if (s == "align_first") return PipelineMode::AlignFirst;
    if (s == "baseline") return PipelineMode::Baseline;
    if (s == "skewed") return PipelineMode::Skewed;
    throw std::invalid_argument("unknown pipeline mode: " + std::string(s));
}

namespace {

bool g_fault_inject = false;

void count_shift(const ShiftResult& s, int dist, uint32_t mag_before,
                 Diagnostics* diag) {
    if (!diag) return;
    if (s.sticky) diag->sticky_collapses++;
    if (dist >= ACC_SIG_BITS && mag_before != 0) diag->alignment_overflows++;
}

// Signed add of two wide operands sitting on a common grid.  Two's-complement
// internally, back to sign-magnitude on the way out.
AddResult add_signed(const WideSig& x, const WideSig& y) {
    int64_t sx = x.negative ? -(int64_t)x.mag : (int64_t)x.mag;
    int64_t sy = y.negative ? -(int64_t)y.mag : (int64_t)y.mag;
    int64_t s = sx + sy;
    AddResult r;
    if (s == 0) {
        r.is_zero = true;
        return r;
    }
    r.sum.negative = s < 0;
    r.sum.mag = (uint32_t)(s < 0 ? -s : s);
    return r;
}

// Register a fresh product as a chain value: fold any carry above HID_BIT
// into carry_adj (the announced exponent e_m was committed before the carry
// was known), leave the rest normalized.
ChainValue register_product(uint32_t placed, bool negative, int32_t e_m,
                            Diagnostics* diag) {
    ChainValue out;
    out.is_zero = false;
    out.sig.negative = negative;
    out.exp = e_m;
    int msb = msb_index(placed);
    if (msb > HID_BIT) {
        ShiftResult s = shift_right_sticky(placed, msb - HID_BIT);
        count_shift(s, msb - HID_BIT, placed, diag);
        out.sig.mag = s.mag;
        out.carry_adj = (uint8_t)(msb - HID_BIT);
    } else {
        out.sig.mag = placed;
    }
    out.pending_norm = (uint8_t)(HID_BIT - msb_index(out.sig.mag));
    return out;
}

}  // namespace

void set_fault_injection(bool enabled) { g_fault_inject = enabled; }
bool fault_injection_enabled() { return g_fault_inject; }

// --- stage primitives -------------------------------------------------------

ProductResult multiply_sig(const UnpackedFloat& a, const UnpackedFloat& b) {
    ProductResult p;
    p.negative = a.negative != b.negative;
    if (a.is_zero || b.is_zero) {
        p.is_zero = true;
        return p;
    }
    p.product_sig = a.sig * b.sig;  // <= 24 bits by format, exact in 32
    p.e_m = a.exp + b.exp;
    return p;
}

ExpCompute exponent_compute(int32_t e_m, int32_t e_in) {
    ExpCompute e;
    e.multiplier_ge = e_m >= e_in;
    e.e_max = e.multiplier_ge ? e_m : e_in;
    e.d = e.multiplier_ge ? (e_m - e_in) : (e_in - e_m);
    return e;
}

uint32_t place_product(uint32_t product_sig, const FpFormat& fmt) {
    return product_sig << (HID_BIT - 2 * fmt.frac_bits);
}

AddResult align_and_add(WideSig product, WideSig addend, int32_t d, Side larger,
                        Diagnostics* diag) {
    WideSig& smaller = (larger == Side::Product) ? addend : product;
    ShiftResult s = shift_right_sticky(smaller.mag, d);
    count_shift(s, d, smaller.mag, diag);
    smaller.mag = s.mag;
    return add_signed(product, addend);
}

LzaResult lza(const WideSig& raw) {
    LzaResult r;
    if (raw.mag == 0) {
        r.is_zero = true;
        return r;
    }
    r.shift = HID_BIT - msb_index(raw.mag);
    return r;
}

ChainValue normalize(const WideSig& raw, const LzaResult& lz, int32_t e_max,
                     Diagnostics* diag) {
    ChainValue out;
    if (lz.is_zero) return out;
    out.is_zero = false;
    out.sig.negative = raw.negative;
    if (lz.shift >= 0) {
        out.sig.mag = raw.mag << lz.shift;
    } else {
        ShiftResult s = shift_right_sticky(raw.mag, -lz.shift);
        count_shift(s, -lz.shift, raw.mag, diag);
        out.sig.mag = s.mag;
    }
    out.exp = e_max - lz.shift;
    return out;
}

// --- skewed-pipeline stages --------------------------------------------------

Stage1Out stage1_skewed(const UnpackedFloat& a, const UnpackedFloat& b,
                        int32_t e_hat_prev, bool prev_zero) {
    Stage1Out s1;
    ProductResult p = multiply_sig(a, b);
    s1.product_sig = p.product_sig;
    s1.e_m = p.e_m;
    s1.prod_negative = p.negative;
    s1.prod_zero = p.is_zero;
    s1.prev_zero = prev_zero;
    s1.e_hat_prev = e_hat_prev;
    if (!p.is_zero && !prev_zero) {
        s1.m_ge_prev = p.e_m >= e_hat_prev;
        s1.d_spec = s1.m_ge_prev ? (p.e_m - e_hat_prev) : (e_hat_prev - p.e_m);
    }
    return s1;
}

FixOut fix_sign_exponent(const Stage1Out& s1, int l_prev, int carry_adj,
                         Diagnostics* /*diag*/) {
    assert(l_prev >= 0);
    FixOut fx;
    int32_t d_eff = s1.d_spec;
    bool m_ge = s1.m_ge_prev;
    if (carry_adj != 0) {
        // The predecessor folded a carry after announcing its exponent;
        // redo the compare against the corrected wire value.
        int32_t e_hat_eff = s1.e_hat_prev + carry_adj;
        m_ge = s1.e_m >= e_hat_eff;
        d_eff = m_ge ? (s1.e_m - e_hat_eff) : (e_hat_eff - s1.e_m);
    }
    fx.d_true = m_ge ? (d_eff + l_prev) : (l_prev - d_eff);
    int32_t e_prev = (s1.e_hat_prev + carry_adj) - l_prev;
    fx.e_hat = s1.e_m >= e_prev ? s1.e_m : e_prev;
    if (g_fault_inject) fx.d_true += 1;
    return fx;
}

AlignedOperands retimed_align(const ChainValue& in, uint32_t product_placed,
                              bool product_negative, const FixOut& fix,
                              Diagnostics* diag) {
    AlignedOperands ops;
    ops.product.negative = product_negative;
    ops.addend.negative = in.sig.negative;
    if (fix.d_true >= 0) {
        // Product side holds the larger exponent: it stays put, the addend's
        // deferred normalization and the alignment fuse into one net shift.
        int net_left = (int)in.pending_norm - fix.d_true;
        ShiftResult s = shift_signed_sticky(in.sig.mag, net_left);
        count_shift(s, -net_left, in.sig.mag, diag);
        ops.addend.mag = s.mag;
        ops.product.mag = product_placed;
    } else {
        // Addend dominates: it only completes its deferred normalization
        // (at most pending_norm left shifts); the product shifts right.
        ops.addend.mag = in.sig.mag << in.pending_norm;
        ShiftResult s = shift_right_sticky(product_placed, -fix.d_true);
        count_shift(s, -fix.d_true, product_placed, diag);
        ops.product.mag = s.mag;
    }
    return ops;
}

// --- full PE steps -----------------------------------------------------------

ChainValue pe_step_baseline(const UnpackedFloat& a, const UnpackedFloat& b,
                            const ChainValue& in, const FpFormat& fmt,
                            Diagnostics* diag) {
    ProductResult p = multiply_sig(a, b);
    if (p.is_zero) return in;  // zero product forwards the addend untouched
    uint32_t placed = place_product(p.product_sig, fmt);
    if (in.is_zero) {
        // Nothing to add: the product normalizes straight through.
        WideSig raw{placed, p.negative};
        return normalize(raw, lza(raw), p.e_m, diag);
    }
    ExpCompute ec = exponent_compute(p.e_m, in.normalized_exp());
    WideSig prod{placed, p.negative};
    AddResult sum = align_and_add(prod, in.sig, ec.d,
                                  ec.multiplier_ge ? Side::Product : Side::Addend,
                                  diag);
    if (sum.is_zero) return ChainValue{};
    return normalize(sum.sum, lza(sum.sum), ec.e_max, diag);
}

ChainValue pe_step_align_first(const UnpackedFloat& a, const UnpackedFloat& b,
                               const ChainValue& in, const FpFormat& fmt,
                               Diagnostics* diag) {
    // Same arithmetic as the baseline; the two organizations differ only in
    // which pipeline stage performs the alignment, which the cycle engine
    // accounts for in its stage metadata.
    return pe_step_baseline(a, b, in, fmt, diag);
}

ChainValue skewed_stage2(const Stage1Out& s1, const ChainValue& in,
                         const FpFormat& fmt, Diagnostics* diag) {
    if (s1.prod_zero) return in;  // forward the register untouched
    assert(s1.prev_zero == in.is_zero);
    uint32_t placed = place_product(s1.product_sig, fmt);
    if (in.is_zero) return register_product(placed, s1.prod_negative, s1.e_m, diag);

    FixOut fx = fix_sign_exponent(s1, in.pending_norm, in.carry_adj, diag);
    AlignedOperands ops =
        retimed_align(in, placed, s1.prod_negative, fx, diag);
    AddResult sum = add_signed(ops.product, ops.addend);
    if (sum.is_zero) return ChainValue{};

    // Register the raw result.  The e_hat wire was committed at the top of
    // the stage; any carry the adder produced is folded here and recorded.
    ChainValue out;
    out.is_zero = false;
    out.sig = sum.sum;
    out.exp = fx.e_hat;
    int msb = msb_index(out.sig.mag);
    if (msb > HID_BIT) {
        ShiftResult s = shift_right_sticky(out.sig.mag, msb - HID_BIT);
        count_shift(s, msb - HID_BIT, out.sig.mag, diag);
        out.sig.mag = s.mag;
        out.carry_adj = (uint8_t)(msb - HID_BIT);
    }
    out.pending_norm = (uint8_t)(HID_BIT - msb_index(out.sig.mag));
    return out;
}

SkewedStep pe_step_skewed(const UnpackedFloat& a, const UnpackedFloat& b,
                          const ChainValue& in, const FpFormat& fmt,
                          Diagnostics* diag) {
    Stage1Out s1 = stage1_skewed(a, b, in.exp, in.is_zero);
    SkewedStep step;
    step.out = skewed_stage2(s1, in, fmt, diag);
    step.l_out = step.out.pending_norm;
    return step;
}

}  // namespace sysfp
