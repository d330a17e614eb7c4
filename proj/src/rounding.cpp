#include "sysfp/rounding.hpp"

namespace sysfp {

RoundResult round_to_format(const ChainValue& v, const FpFormat& fmt) {
    RoundResult r;
    if (v.is_zero || v.sig.mag == 0) {
        r.bits = 0;  // exact zero packs as +0
        return r;
    }

    uint32_t sign_bit = v.sig.negative ? (1u << (fmt.width() - 1)) : 0u;
    int msb = msb_index(v.sig.mag);
    int32_t exp = v.grid() + (msb - HID_BIT);  // true exponent of the value

    // Reduce the magnitude to frac_bits+1 significand bits.
    uint32_t sig;
    int shift = msb - fmt.frac_bits;
    if (shift > 0) {
        sig = v.sig.mag >> shift;
        uint32_t guard = (v.sig.mag >> (shift - 1)) & 1u;
        uint32_t below = v.sig.mag & ((1u << (shift - 1)) - 1u);
        if (guard && (below != 0 || (sig & 1u))) {
            sig += 1;
            if (sig == (2u << fmt.frac_bits)) {  // rounding carried out
                sig >>= 1;
                exp += 1;
            }
        }
    } else {
        sig = v.sig.mag << -shift;  // exact, no rounding needed
    }

    if (exp > fmt.max_normal_exp()) {
        r.saturated = true;
        r.bits = max_finite_bits(v.sig.negative, fmt);
        return r;
    }
    if (fmt.kind == FormatKind::FP8_E4M3 && exp == fmt.max_normal_exp() &&
        sig == (2u << fmt.frac_bits) - 1u) {
        // 1111/111 is the NaN code; the largest representable value is 1111/110
        r.saturated = true;
        r.bits = max_finite_bits(v.sig.negative, fmt);
        return r;
    }
    if (exp < fmt.min_normal_exp()) {
        r.flushed = true;
        r.bits = sign_bit;  // flush to (signed) zero
        return r;
    }

    uint32_t exp_field = (uint32_t)(exp + fmt.bias);
    uint32_t frac = sig & ((1u << fmt.frac_bits) - 1u);
    r.bits = sign_bit | (exp_field << fmt.frac_bits) | frac;
    return r;
}

}  // namespace sysfp
