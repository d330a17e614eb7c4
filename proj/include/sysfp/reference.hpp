#pragma once
// ============================================================================
// Serial functional reference: the same arithmetic as the cycle engine but
// with no timing, no pipeline registers, no parallelism.  One chain value
// folds down each dot product; rounding happens once at the end.  The cycle
// engine must match this model bit for bit in every mode, and every mode
// must match every other.
// ============================================================================

#include <cstdint>
#include <span>
#include <vector>

#include "sysfp/datapath.hpp"
#include "sysfp/rounding.hpp"

namespace sysfp {

// One multiply-accumulate term: packed activation and weight codes.
struct ChainTerm {
    uint32_t a_bits = 0;
    uint32_t w_bits = 0;
};

// Fold one dot-product chain through the selected PE model, then round.
RoundResult reference_chain(PipelineMode mode, std::span<const ChainTerm> terms,
                            const FpFormat& in_fmt, const FpFormat& accum_fmt,
                            Diagnostics* diag = nullptr);

// out[mi][ni] = round(sum_k a[mi][k] * w[k][ni]) with a single final
// rounding per element.  a is M x K row-major, w is K x N row-major, both
// as packed codes of in_fmt; the result is M x N packed codes of accum_fmt.
std::vector<uint32_t> reference_matmul(PipelineMode mode,
                                       std::span<const uint32_t> a, size_t m,
                                       size_t k, std::span<const uint32_t> w,
                                       size_t n, const FpFormat& in_fmt,
                                       const FpFormat& accum_fmt,
                                       Diagnostics* diag = nullptr);

}  // namespace sysfp
