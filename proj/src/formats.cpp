#include "sysfp/formats.hpp"

#include <stdexcept>

namespace sysfp {

namespace {

struct Fields {
    uint32_t sign;
    uint32_t exp_field;
    uint32_t frac;
};

Fields split(uint32_t bits, const FpFormat& fmt) {
    Fields f;
    f.sign = (bits >> (fmt.width() - 1)) & 1u;
    f.exp_field = (bits >> fmt.frac_bits) & ((1u << fmt.exp_bits) - 1u);
    f.frac = bits & ((1u << fmt.frac_bits) - 1u);
    return f;
}

bool e4m3(const FpFormat& fmt) { return fmt.kind == FormatKind::FP8_E4M3; }

}  // namespace

const char* FpFormat::name() const {
    switch (kind) {
        case FormatKind::BF16: return "bf16";
        case FormatKind::FP8_E4M3: return "fp8_e4m3";
        case FormatKind::FP8_E5M2: return "fp8_e5m2";
        case FormatKind::FP32: return "fp32";
    }
    return "?";
}

FpFormat FpFormat::from_name(const std::string& name) {
    if (name == "bf16") return bf16();
    if (name == "fp8_e4m3" || name == "e4m3") return fp8_e4m3();
    if (name == "fp8_e5m2" || name == "e5m2") return fp8_e5m2();
    if (name == "fp32") return fp32();
    throw std::invalid_argument("unknown format name: " + name);
}

bool is_zero_code(uint32_t bits, const FpFormat& fmt) {
    Fields f = split(bits, fmt);
    return f.exp_field == 0 && f.frac == 0;
}

bool is_subnormal_code(uint32_t bits, const FpFormat& fmt) {
    Fields f = split(bits, fmt);
    return f.exp_field == 0 && f.frac != 0;
}

bool is_inf_code(uint32_t bits, const FpFormat& fmt) {
    if (e4m3(fmt)) return false;  // no infinities in E4M3
    Fields f = split(bits, fmt);
    return f.exp_field == (uint32_t)fmt.max_exp_field() && f.frac == 0;
}

bool is_nan_code(uint32_t bits, const FpFormat& fmt) {
    Fields f = split(bits, fmt);
    if (f.exp_field != (uint32_t)fmt.max_exp_field()) return false;
    if (e4m3(fmt)) return f.frac == (uint32_t)((1 << fmt.frac_bits) - 1);
    return f.frac != 0;
}

bool is_normal_code(uint32_t bits, const FpFormat& fmt) {
    return !is_zero_code(bits, fmt) && !is_subnormal_code(bits, fmt) &&
           !is_inf_code(bits, fmt) && !is_nan_code(bits, fmt);
}

UnpackedFloat decode(uint32_t bits, const FpFormat& fmt) {
    bits &= fmt.code_mask();
    if (is_inf_code(bits, fmt))
        throw UnsupportedEncoding(std::string("infinity encoding rejected (") +
                                  fmt.name() + ")");
    if (is_nan_code(bits, fmt))
        throw UnsupportedEncoding(std::string("NaN encoding rejected (") +
                                  fmt.name() + ")");

    Fields f = split(bits, fmt);
    UnpackedFloat u;
    u.negative = f.sign != 0;
    if (f.exp_field == 0) {
        // zero stays zero; subnormals flush to zero
        u.is_zero = true;
        u.exp = 0;
        u.sig = 0;
        return u;
    }
    u.is_zero = false;
    u.exp = (int32_t)f.exp_field - fmt.bias;
    u.sig = (1u << fmt.frac_bits) | f.frac;
    return u;
}

uint32_t max_finite_bits(bool negative, const FpFormat& fmt) {
    uint32_t sign = negative ? (1u << (fmt.width() - 1)) : 0u;
    uint32_t exp_field;
    uint32_t frac;
    if (e4m3(fmt)) {
        // 1111 / 110 = 448, the largest value below the NaN pattern
        exp_field = (uint32_t)fmt.max_exp_field();
        frac = (1u << fmt.frac_bits) - 2u;
    } else {
        exp_field = (uint32_t)fmt.max_exp_field() - 1u;
        frac = (1u << fmt.frac_bits) - 1u;
    }
    return sign | (exp_field << fmt.frac_bits) | frac;
}

int compare_magnitude(const UnpackedFloat& a, const UnpackedFloat& b) {
    if (a.is_zero || b.is_zero) {
        if (a.is_zero && b.is_zero) return 0;
        return a.is_zero ? -1 : 1;
    }
    if (a.exp != b.exp) return a.exp < b.exp ? -1 : 1;
    if (a.sig != b.sig) return a.sig < b.sig ? -1 : 1;
    return 0;
}

}  // namespace sysfp
