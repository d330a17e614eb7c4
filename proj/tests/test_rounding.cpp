#include "doctest.h"

#include "sysfp/chain.hpp"
#include "sysfp/formats.hpp"
#include "sysfp/rounding.hpp"

#include <cstdint>

using namespace sysfp;

namespace {

ChainValue make_cv(uint32_t mag, int32_t exp, bool negative = false,
                   uint8_t carry_adj = 0, uint8_t pending_norm = 0) {
  ChainValue v;
  v.sig = WideSig{mag, negative};
  v.exp = exp;
  v.carry_adj = carry_adj;
  v.pending_norm = pending_norm;
  v.is_zero = (mag == 0);
  return v;
}

} // namespace

TEST_CASE("exact values round to their own encodings") {
  const FpFormat bf16 = FpFormat::bf16();
  const FpFormat fp32 = FpFormat::fp32();
  const ChainValue one = lift(decode(0x3F80, bf16), bf16);
  CHECK(round_to_format(one, fp32).bits == 0x3F800000u);
  CHECK(round_to_format(one, bf16).bits == 0x3F80u);
  // bf16 is a truncated fp32: any normal bf16 value is exact in fp32
  // with the same bit pattern shifted into the wider fraction.
  for (uint32_t bits : {0x3F80u, 0x4049u, 0xC170u, 0x0080u, 0x7F7Fu}) {
    const RoundResult r = round_to_format(lift(decode(bits, bf16), bf16), fp32);
    CHECK(r.bits == (bits << 16));
    CHECK_FALSE(r.saturated);
    CHECK_FALSE(r.flushed);
  }
}

TEST_CASE("round-to-nearest-even at the fp32 fraction boundary") {
  const FpFormat fp32 = FpFormat::fp32();
  // Register bit 3 is the round bit when targeting a 23-bit fraction
  // (hidden bit sits at bit 27).
  const uint32_t hid = 1u << HID_BIT;

  // 1 + 2^-24: halfway, even neighbor below -> rounds down.
  CHECK(round_to_format(make_cv(hid | (1u << 3), 0), fp32).bits == 0x3F800000u);
  // 1 + 2^-23 + 2^-24: halfway, odd neighbor below -> rounds up.
  CHECK(round_to_format(make_cv(hid | (1u << 4) | (1u << 3), 0), fp32).bits ==
        0x3F800002u);
  // Any sticky bit below the round bit breaks the tie upward.
  CHECK(round_to_format(make_cv(hid | (1u << 3) | 1u, 0), fp32).bits ==
        0x3F800001u);
  // Just below the round bit: plain truncation.
  CHECK(round_to_format(make_cv(hid | (1u << 2), 0), fp32).bits == 0x3F800000u);
}

TEST_CASE("rounding carry-out renormalizes into the next binade") {
  const FpFormat fp32 = FpFormat::fp32();
  // Bits 27..3 all set: 2 - 2^-24, which rounds up to exactly 2.
  const uint32_t mag = ((1u << 25) - 1) << 3;
  const RoundResult r = round_to_format(make_cv(mag, 0), fp32);
  CHECK(r.bits == 0x40000000u);
  CHECK_FALSE(r.saturated);
}

TEST_CASE("unnormalized register states round like their normalized value") {
  const FpFormat fp32 = FpFormat::fp32();
  const uint32_t want = 0x3F800000u;
  // Value 1.0 expressed three ways: normalized, with a pending left
  // shift, and with a carry adjustment folded into the grid exponent.
  CHECK(round_to_format(make_cv(1u << 27, 0), fp32).bits == want);
  CHECK(round_to_format(make_cv(1u << 26, 1, false, 0, 1), fp32).bits == want);
  CHECK(round_to_format(make_cv(1u << 26, 0, false, 1, 1), fp32).bits == want);
  CHECK(round_to_format(make_cv(1u << 24, 3, false, 0, 3), fp32).bits == want);
  // Sign carries through in every representation.
  CHECK(round_to_format(make_cv(1u << 26, 1, true, 0, 1), fp32).bits ==
        (want | 0x80000000u));
}

TEST_CASE("overflow saturates to the largest finite value with the sign kept") {
  const FpFormat bf16 = FpFormat::bf16();
  const RoundResult pos = round_to_format(make_cv(1u << 27, 200), bf16);
  CHECK(pos.saturated);
  CHECK(pos.bits == 0x7F7Fu);
  const RoundResult neg = round_to_format(make_cv(1u << 27, 200, true), bf16);
  CHECK(neg.saturated);
  CHECK(neg.bits == 0xFF7Fu);
}

TEST_CASE("e4m3 saturation never produces the NaN pattern") {
  const FpFormat e4m3 = FpFormat::fp8_e4m3();
  // 472 = 1.84375 * 2^8 rounds up to 480 = 1.111 * 2^8, whose encoding
  // would collide with NaN; it must clamp to 448 (0x7E) instead.
  const RoundResult r = round_to_format(make_cv(0x1D8u << 19, 8), e4m3);
  CHECK(r.saturated);
  CHECK(r.bits == 0x7Eu);
  // 480 is exact but its encoding would be the NaN pattern; it clamps too.
  const RoundResult tie = round_to_format(make_cv(0x1Eu << 23, 8), e4m3);
  CHECK(tie.saturated);
  CHECK(tie.bits == 0x7Eu);
  // 448 itself is representable and must not be flagged.
  const RoundResult exact = round_to_format(make_cv(0x1Cu << 23, 8), e4m3);
  CHECK_FALSE(exact.saturated);
  CHECK(exact.bits == 0x7Eu);
  // Same ceiling on the negative side.
  const RoundResult negsat = round_to_format(make_cv(0x1D8u << 19, 8, true), e4m3);
  CHECK(negsat.saturated);
  CHECK(negsat.bits == 0xFEu);
}

TEST_CASE("underflow flushes to a signed zero") {
  const FpFormat bf16 = FpFormat::bf16();
  const RoundResult pos = round_to_format(make_cv(1u << 27, -200), bf16);
  CHECK(pos.flushed);
  CHECK(pos.bits == 0x0000u);
  const RoundResult neg = round_to_format(make_cv(1u << 27, -200, true), bf16);
  CHECK(neg.flushed);
  CHECK(neg.bits == 0x8000u);
  // The smallest normal value survives un-flushed.
  const RoundResult edge = round_to_format(make_cv(1u << 27, -126), bf16);
  CHECK_FALSE(edge.flushed);
  CHECK(edge.bits == 0x0080u);
}

TEST_CASE("a zero register rounds to positive zero") {
  ChainValue z;
  CHECK(z.is_zero);
  const RoundResult r = round_to_format(z, FpFormat::fp32());
  CHECK(r.bits == 0u);
  CHECK_FALSE(r.saturated);
  CHECK_FALSE(r.flushed);
}
