#pragma once
// ============================================================================
// Deterministic code generators for tests and the CLI driver.
//
// std::mt19937_64's output sequence is pinned by the standard, so raw draws
// plus explicit range reduction stay reproducible across platforms and
// standard-library versions (the <random> distributions do not).
// ============================================================================

#include <cstdint>
#include <random>

#include "sysfp/formats.hpp"

namespace sysfp {

// Uniform over every code the datapath accepts: Inf/NaN patterns are
// rejected, zeros and subnormal codes stay in (both decode to exact zero,
// which exercises the zero-handling paths).
inline uint32_t random_supported_code(std::mt19937_64& rng,
                                      const FpFormat& fmt) {
    for (;;) {
        uint32_t code = (uint32_t)(rng() & fmt.code_mask());
        if (!is_inf_code(code, fmt) && !is_nan_code(code, fmt)) return code;
    }
}

// Uniform over normal codes with unbiased exponent in [e_lo, e_hi], random
// sign and fraction.  The reject loop only matters for formats whose top
// exponent row holds a NaN pattern.
inline uint32_t random_normal_code(std::mt19937_64& rng, const FpFormat& fmt,
                                   int e_lo, int e_hi) {
    for (;;) {
        uint32_t exp_field =
            (uint32_t)(e_lo + fmt.bias +
                       (int)(rng() % (uint64_t)(e_hi - e_lo + 1)));
        uint32_t frac = (uint32_t)(rng() & ((1u << fmt.frac_bits) - 1u));
        uint32_t sign = (uint32_t)(rng() & 1u);
        uint32_t code =
            (sign << (fmt.width() - 1)) | (exp_field << fmt.frac_bits) | frac;
        if (!is_nan_code(code, fmt) && !is_inf_code(code, fmt)) return code;
    }
}

// Normal code anywhere in the format's full exponent range.
inline uint32_t random_normal_code(std::mt19937_64& rng, const FpFormat& fmt) {
    return random_normal_code(rng, fmt, fmt.min_normal_exp(),
                              fmt.max_normal_exp());
}

}  // namespace sysfp
