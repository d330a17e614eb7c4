#pragma once
// ============================================================================
// Wide fixed-point significand domain shared by every datapath model.
//
// Register layout (ACC_SIG_BITS = 32):
//
//   bit 31..28   carry headroom (sums of a product in [1,4) and a normalized
//                addend reach at most bit 29)
//   bit 27       canonical hidden-bit position (HID_BIT); a normalized value
//                has its MSB here
//   bit 26..4    23 fraction bits, matching the FP32 significand
//   bit  3..0    guard region for alignment loss; bit 0 doubles as the
//                sticky catcher for bits shifted off the bottom
//
// A magnitude sitting on exponent grid g has numeric value
//     (-1)^sign * mag * 2^(g - ACC_FRAC_POINT).
//
// Right shifts OR all dropped bits into bit 0 of the result ("sticky").
// This makes shift sequences compose exactly: a right-shift-by-a followed by
// a right-shift-by-b produces the same bits and the same sticky as a single
// right-shift-by-(a+b), and a lossless left shift followed by a sticky right
// shift equals the single net shift.  The cross-mode bit-equivalence of the
// pipelines rests on that property.
// ============================================================================

#include <bit>
#include <cstdint>

#include "sysfp/formats.hpp"

namespace sysfp {

inline constexpr int ACC_SIG_BITS = 32;   // wide register width
inline constexpr int HID_BIT = 27;        // canonical hidden-bit position
inline constexpr int ACC_FRAC_POINT = HID_BIT;
inline constexpr int GUARD_BITS = 4;
inline constexpr int CARRY_BITS = ACC_SIG_BITS - 1 - HID_BIT;

struct WideSig {
    uint32_t mag = 0;
    bool negative = false;
};

// Partial sum handed from PE to PE down a column.
//
//   exp          exponent grid the producing PE announced on its forwarding
//                wire (committed before its adder finished)
//   carry_adj    adder carry-out folded into the register after the wire was
//                committed; the register actually sits on grid exp+carry_adj
//   pending_norm left-shift count that would normalize the register (the
//                leading-zero count above HID_BIT); always >= 0.  Baseline
//                handoffs are normalized, so pending_norm == 0 there.
//   is_zero      exact-zero flag (zero keeps no meaningful exponent)
struct ChainValue {
    WideSig sig;
    int32_t exp = 0;
    uint8_t carry_adj = 0;
    uint8_t pending_norm = 0;
    bool is_zero = true;

    int32_t grid() const { return exp + carry_adj; }
    int32_t normalized_exp() const { return grid() - pending_norm; }
};

inline int msb_index(uint32_t mag) {  // -1 for zero
    return 32 - std::countl_zero(mag) - 1;
}

struct ShiftResult {
    uint32_t mag = 0;
    bool sticky = false;  // true iff nonzero bits were dropped
};

inline ShiftResult shift_right_sticky(uint32_t mag, int n) {
    if (n <= 0 || mag == 0) return {mag, false};
    if (n >= ACC_SIG_BITS) return {1u, true};  // everything collapses into bit 0
    uint32_t dropped = mag & ((1u << n) - 1u);
    uint32_t out = mag >> n;
    if (dropped) out |= 1u;
    return {out, dropped != 0};
}

// left_by > 0 shifts left (callers guarantee the result stays in range),
// left_by < 0 shifts right with sticky collapse.
inline ShiftResult shift_signed_sticky(uint32_t mag, int left_by) {
    if (left_by >= 0) {
        if (left_by == 0 || mag == 0) return {mag, false};
        return {mag << left_by, false};
    }
    return shift_right_sticky(mag, -left_by);
}

// Place a decoded operand on the wide grid, normalized (MSB at HID_BIT).
inline ChainValue lift(const UnpackedFloat& u, const FpFormat& fmt) {
    ChainValue v;
    if (u.is_zero) return v;
    v.is_zero = false;
    v.sig.negative = u.negative;
    v.sig.mag = u.sig << (HID_BIT - fmt.frac_bits);
    v.exp = u.exp;
    return v;
}

}  // namespace sysfp
