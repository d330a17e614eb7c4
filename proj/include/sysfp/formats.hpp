#pragma once
// ============================================================================
// Reduced-precision floating-point formats and packed-code handling.
//
// All formats share the usual layout: sign in the MSB, exponent field next,
// fraction field in the low bits.  E4M3 follows the OCP FP8 convention: there
// are no infinities, the exponent field 1111 encodes normal values up to 448,
// and only S.1111.111 is NaN.  E5M2, BF16 and FP32 use IEEE-style specials
// (exponent field all ones => Inf/NaN).
//
// Subnormal inputs flush to zero on decode; NaN/Inf encodings are rejected.
// ============================================================================

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sysfp {

enum class FormatKind : uint8_t { BF16, FP8_E4M3, FP8_E5M2, FP32 };

struct FpFormat {
    FormatKind kind;
    int exp_bits;
    int frac_bits;
    int bias;

    int width() const { return 1 + exp_bits + frac_bits; }
    int hex_digits() const { return width() / 4; }
    uint32_t code_mask() const {
        return width() >= 32 ? 0xFFFFFFFFu : ((1u << width()) - 1u);
    }
    int max_exp_field() const { return (1 << exp_bits) - 1; }
    // Largest unbiased exponent a finite normal value may carry.
    int max_normal_exp() const {
        // E4M3 uses the top exponent field for normals (NaN is carved out of
        // the fraction space instead).
        if (kind == FormatKind::FP8_E4M3) return max_exp_field() - bias;
        return (max_exp_field() - 1) - bias;
    }
    int min_normal_exp() const { return 1 - bias; }

    const char* name() const;

    static FpFormat bf16() { return {FormatKind::BF16, 8, 7, 127}; }
    static FpFormat fp8_e4m3() { return {FormatKind::FP8_E4M3, 4, 3, 7}; }
    static FpFormat fp8_e5m2() { return {FormatKind::FP8_E5M2, 5, 2, 15}; }
    static FpFormat fp32() { return {FormatKind::FP32, 8, 23, 127}; }
    static FpFormat from_name(const std::string& name);  // throws on unknown
};

// Sign-magnitude unpacked form; significand carries the explicit hidden bit,
// exponent is unbiased.  Zero is flagged, with sig == 0.
struct UnpackedFloat {
    bool negative = false;
    int32_t exp = 0;
    uint32_t sig = 0;
    bool is_zero = true;
};

class UnsupportedEncoding : public std::runtime_error {
  public:
    explicit UnsupportedEncoding(const std::string& what)
        : std::runtime_error(what) {}
};

// --- code classification (on the packed bit pattern) ---
bool is_zero_code(uint32_t bits, const FpFormat& fmt);
bool is_subnormal_code(uint32_t bits, const FpFormat& fmt);
bool is_inf_code(uint32_t bits, const FpFormat& fmt);
bool is_nan_code(uint32_t bits, const FpFormat& fmt);
bool is_normal_code(uint32_t bits, const FpFormat& fmt);

// Unpack a code.  Subnormals flush to zero; Inf/NaN throw UnsupportedEncoding.
UnpackedFloat decode(uint32_t bits, const FpFormat& fmt);

// Packed code of the largest finite value (used as the saturation clamp).
uint32_t max_finite_bits(bool negative, const FpFormat& fmt);

// Exact magnitude order of two nonzero unpacked values of the same format
// (-1, 0, +1).  Significands are normalized, so (exp, sig) orders values.
int compare_magnitude(const UnpackedFloat& a, const UnpackedFloat& b);

}  // namespace sysfp
