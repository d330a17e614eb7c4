#pragma once
// ============================================================================
// Exact reference for chained multiply-accumulate.
//
// Keeps the running sum as an arbitrary-precision integer scaled by a power
// of two, so every product and every addition is exact, then rounds once to
// the target format (round-to-nearest-even, same saturation/flush policy as
// the datapath).  Shares nothing with the wide-register implementation except
// the operand decoder: no fixed-point layout, no shift logic, no pending
// normalization.  Used by tests and the verification CLI as ground truth.
// ============================================================================

#include <cstdint>
#include <span>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "sysfp/formats.hpp"
#include "sysfp/rounding.hpp"

namespace sysfp {

class ExactSum {
  public:
    // Accumulate a * b exactly (operands already decoded).
    void add_product(const UnpackedFloat& a, const UnpackedFloat& b,
                     const FpFormat& fmt);

    bool is_zero() const { return num_ == 0; }

    // Round the exact value once to fmt (round-to-nearest-even).
    RoundResult round(const FpFormat& fmt) const;

  private:
    boost::multiprecision::cpp_int num_;  // value = num_ * 2^exp2_
    int64_t exp2_ = 0;
};

// Convenience: exact result of a full chain of packed (a, w) codes.
RoundResult oracle_chain(std::span<const std::pair<uint32_t, uint32_t>> codes,
                         const FpFormat& in_fmt, const FpFormat& accum_fmt);

}  // namespace sysfp
