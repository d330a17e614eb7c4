#include "sysfp/oracle.hpp"

namespace sysfp {

using boost::multiprecision::cpp_int;

void ExactSum::add_product(const UnpackedFloat& a, const UnpackedFloat& b,
                           const FpFormat& fmt) {
    if (a.is_zero || b.is_zero) return;
    cpp_int term = (uint64_t)a.sig * (uint64_t)b.sig;
    if (a.negative != b.negative) term = -term;
    int64_t term_exp = (int64_t)a.exp + b.exp - 2 * fmt.frac_bits;

    if (num_ == 0) {
        num_ = term;
        exp2_ = term_exp;
        return;
    }
    // Align both to the smaller scale; shifts are exact on big integers.
    if (term_exp >= exp2_) {
        num_ += term << (unsigned)(term_exp - exp2_);
    } else {
        num_ <<= (unsigned)(exp2_ - term_exp);
        num_ += term;
        exp2_ = term_exp;
    }
}

RoundResult ExactSum::round(const FpFormat& fmt) const {
    RoundResult r;
    if (num_ == 0) return r;  // +0

    bool negative = num_ < 0;
    cpp_int n = negative ? cpp_int(-num_) : num_;
    int64_t bitlen = (int64_t)msb(n) + 1;
    int64_t exp = exp2_ + bitlen - 1;  // true exponent of the value

    int64_t shift = (bitlen - 1) - fmt.frac_bits;
    uint32_t sig;
    if (shift > 0) {
        sig = (uint32_t)(cpp_int(n >> (unsigned)shift));
        bool guard = bit_test(n, (unsigned)(shift - 1));
        bool sticky = (n & ((cpp_int(1) << (unsigned)(shift - 1)) - 1)) != 0;
        if (guard && (sticky || (sig & 1u))) {
            sig += 1;
            if (sig == (2u << fmt.frac_bits)) {
                sig >>= 1;
                exp += 1;
            }
        }
    } else {
        sig = (uint32_t)(cpp_int(n << (unsigned)(-shift)));
    }

    if (exp > fmt.max_normal_exp() ||
        (fmt.kind == FormatKind::FP8_E4M3 && exp == fmt.max_normal_exp() &&
         sig == (2u << fmt.frac_bits) - 1u)) {
        r.saturated = true;
        r.bits = max_finite_bits(negative, fmt);
        return r;
    }
    if (exp < fmt.min_normal_exp()) {
        r.flushed = true;
        r.bits = negative ? (1u << (fmt.width() - 1)) : 0u;
        return r;
    }
    uint32_t sign_bit = negative ? (1u << (fmt.width() - 1)) : 0u;
    uint32_t exp_field = (uint32_t)(exp + fmt.bias);
    uint32_t frac = sig & ((1u << fmt.frac_bits) - 1u);
    r.bits = sign_bit | (exp_field << fmt.frac_bits) | frac;
    return r;
}

RoundResult oracle_chain(std::span<const std::pair<uint32_t, uint32_t>> codes,
                         const FpFormat& in_fmt, const FpFormat& accum_fmt) {
    ExactSum sum;
    for (const auto& [a_bits, w_bits] : codes)
        sum.add_product(decode(a_bits, in_fmt), decode(w_bits, in_fmt), in_fmt);
    return sum.round(accum_fmt);
}

}  // namespace sysfp
