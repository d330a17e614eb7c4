#pragma once
// ============================================================================
// Final rounding of a wide partial sum into a packed target format.
//
// Rounding happens exactly once per array column, at the South edge.  The
// input may arrive unnormalized (deferred normalization and carry folds are
// resolved here from the magnitude itself).  Mode: round-to-nearest-even.
// Exponent overflow saturates to the largest finite value; results below the
// smallest normal flush to zero.  Both outcomes are flagged, not raised.
// ============================================================================

#include <cstdint>

#include "sysfp/chain.hpp"
#include "sysfp/formats.hpp"

namespace sysfp {

struct RoundResult {
    uint32_t bits = 0;
    bool saturated = false;
    bool flushed = false;
};

RoundResult round_to_format(const ChainValue& v, const FpFormat& fmt);

}  // namespace sysfp
