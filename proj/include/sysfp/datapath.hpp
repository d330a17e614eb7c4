#pragma once
// ============================================================================
// Fused multiply-add datapath models for one processing element.
//
// Three organizations of the same arithmetic:
//
//   pe_step_align_first  two stages; the incoming addend is aligned in the
//                        first stage, add/normalize in the second.
//   pe_step_baseline     two stages; stage 1 multiplies and computes the
//                        alignment amount, stage 2 aligns, adds, counts
//                        leading zeros and normalizes.
//   pe_step_skewed       two stages that overlap across PEs: stage 1
//                        multiplies and speculates the exponent compare
//                        against the predecessor's *announced* (unnormalized)
//                        exponent; stage 2 fixes the speculation with the
//                        predecessor's leading-zero count, fuses the deferred
//                        normalization of the incoming addend into its
//                        alignment shift, and adds.  Normalization of the
//                        result is deferred to the consumer; only the
//                        leading-zero count and a small carry fold travel
//                        with the raw register.
//
// All three produce bit-identical rounded results by construction: the only
// lossy operations are sticky right shifts, and those compose exactly (see
// chain.hpp), so every mode drops exactly the same bits.
//
// Sign handling: operands are sign-magnitude; the adder works in two's
// complement internally and converts back, so effective add/subtract is
// resolved by the signs, never by a separate opcode.
// ============================================================================

#include <cstdint>
#include <string_view>

#include "sysfp/chain.hpp"
#include "sysfp/formats.hpp"

namespace sysfp {

// Which pipeline organization a PE (and the array built from it) runs.
enum class PipelineMode : uint8_t { AlignFirst, Baseline, Skewed };

const char* mode_name(PipelineMode m);
PipelineMode mode_from_name(std::string_view s);  // throws std::invalid_argument

// Diagnostic counters.  sticky_collapses counts every shift that dropped
// nonzero bits; alignment_overflows counts shifts at or beyond the full
// register width that left only the sticky bit.  Neither is an error: results
// stay defined, but exactness against the reference oracle is only claimed
// for runs where sticky_collapses == 0.
struct Diagnostics {
    uint64_t sticky_collapses = 0;
    uint64_t alignment_overflows = 0;
    uint64_t saturations = 0;
    uint64_t flushes = 0;

    void merge(const Diagnostics& o) {
        sticky_collapses += o.sticky_collapses;
        alignment_overflows += o.alignment_overflows;
        saturations += o.saturations;
        flushes += o.flushes;
    }
    bool operator==(const Diagnostics&) const = default;
};

// --- stage primitives -------------------------------------------------------

struct ProductResult {
    uint32_t product_sig = 0;  // exact a.sig * b.sig, up to 2*(frac_bits+1) bits
    int32_t e_m = 0;           // e_a + e_b, exact
    bool negative = false;
    bool is_zero = false;
};

// Exact significand product; no rounding, no normalization.
ProductResult multiply_sig(const UnpackedFloat& a, const UnpackedFloat& b);

struct ExpCompute {
    int32_t e_max = 0;
    int32_t d = 0;              // |e_m - e_in|
    bool multiplier_ge = false; // e_m >= e_in (ties select the multiplier side)
};

ExpCompute exponent_compute(int32_t e_m, int32_t e_in);

// Place a product on the wide grid: unit weight at HID_BIT, so the magnitude
// spans [2^HID_BIT, 2^(HID_BIT+2)) for a product value in [1,4).
uint32_t place_product(uint32_t product_sig, const FpFormat& fmt);

enum class Side : uint8_t { Product, Addend };

struct AddResult {
    WideSig sum;
    bool is_zero = false;
};

// Align the smaller operand right by d (sticky) and add signed.  The result
// is raw: carry-out stays in the wide register, cancellation leaves leading
// zeros.  No normalization here.
AddResult align_and_add(WideSig product, WideSig addend, int32_t d, Side larger,
                        Diagnostics* diag);

struct LzaResult {
    int shift = 0;       // >= 0: left shifts to normalize; < 0: carry-out of
                         // |shift| positions above HID_BIT
    bool is_zero = false;
};

// Leading-zero count of the raw adder result above the canonical hidden-bit
// position (exact; stands in for a hardware leading-zero anticipator).
LzaResult lza(const WideSig& raw);

// Apply the normalization shift and produce a normalized ChainValue on the
// true exponent grid.  Carry-out right shifts collapse dropped bits sticky.
ChainValue normalize(const WideSig& raw, const LzaResult& lz, int32_t e_max,
                     Diagnostics* diag);

// --- skewed-pipeline stages --------------------------------------------------

// Everything the stage-1/stage-2 pipeline register of a skewed PE carries.
// e_hat_prev is the predecessor's announced exponent wire; d_spec/m_ge_prev
// are the speculative compare against it.  The true values are recovered in
// fix_sign_exponent once the predecessor's leading-zero count arrives.
struct Stage1Out {
    uint32_t product_sig = 0;
    int32_t e_m = 0;
    int32_t e_hat_prev = 0;
    int32_t d_spec = 0;
    bool m_ge_prev = false;
    bool prod_negative = false;
    bool prod_zero = false;
    bool prev_zero = false;
};

Stage1Out stage1_skewed(const UnpackedFloat& a, const UnpackedFloat& b,
                        int32_t e_hat_prev, bool prev_zero);

struct FixOut {
    int32_t d_true = 0;  // signed: e_m - e_prev; negative means the incoming
                         // addend dominates after netting the pending count
    int32_t e_hat = 0;   // max(e_m, corrected predecessor exponent)
};

// Correct the speculative compare with the predecessor's pending count
// (l_prev >= 0) and carry fold.  With carry_adj == 0 this is exactly
//   d_true = d_spec + l_prev        if m_ge_prev
//   d_true = l_prev - d_spec        otherwise
// and e_hat = max(e_m, e_hat_prev - l_prev).  A nonzero carry_adj bumps the
// announced exponent by the carry the predecessor folded after committing its
// wire, so the compare is redone against e_hat_prev + carry_adj.
FixOut fix_sign_exponent(const Stage1Out& s1, int l_prev, int carry_adj,
                         Diagnostics* diag);

struct AlignedOperands {
    WideSig addend;
    WideSig product;
};

// Fused normalize+align of the raw incoming addend, in parallel with placing
// the product.  The addend receives one net shift (its deferred left
// normalization minus the alignment distance); the product side only ever
// shifts right.  Both emerge on the e_hat grid.
AlignedOperands retimed_align(const ChainValue& in, uint32_t product_placed,
                              bool product_negative, const FixOut& fix,
                              Diagnostics* diag);

// --- full PE steps -----------------------------------------------------------

ChainValue pe_step_align_first(const UnpackedFloat& a, const UnpackedFloat& b,
                               const ChainValue& in, const FpFormat& fmt,
                               Diagnostics* diag);

ChainValue pe_step_baseline(const UnpackedFloat& a, const UnpackedFloat& b,
                            const ChainValue& in, const FpFormat& fmt,
                            Diagnostics* diag);

// Stage 2 of the skewed PE, reusable by the cycle engine (which latches
// Stage1Out itself).  Returns the raw, unnormalized chain value; out.pending
// is the leading-zero count the consumer will net into its alignment.
ChainValue skewed_stage2(const Stage1Out& s1, const ChainValue& in,
                         const FpFormat& fmt, Diagnostics* diag);

struct SkewedStep {
    ChainValue out;
    int l_out = 0;  // leading-zero count forwarded alongside the register
};

SkewedStep pe_step_skewed(const UnpackedFloat& a, const UnpackedFloat& b,
                          const ChainValue& in, const FpFormat& fmt,
                          Diagnostics* diag);

// Test hook: pollutes the exponent-fix logic so verification harnesses can
// prove they detect mismatches.  Off by default.
void set_fault_injection(bool enabled);
bool fault_injection_enabled();

}  // namespace sysfp
