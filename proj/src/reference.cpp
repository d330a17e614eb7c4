#include "sysfp/reference.hpp"

namespace sysfp {

RoundResult reference_chain(PipelineMode mode, std::span<const ChainTerm> terms,
                            const FpFormat& in_fmt, const FpFormat& accum_fmt,
                            Diagnostics* diag) {
    Diagnostics local;
    Diagnostics* d = diag ? diag : &local;
    ChainValue acc;  // exact zero
    for (const ChainTerm& t : terms) {
        UnpackedFloat a = decode(t.a_bits, in_fmt);
        UnpackedFloat w = decode(t.w_bits, in_fmt);
        switch (mode) {
            case PipelineMode::AlignFirst:
                acc = pe_step_align_first(a, w, acc, in_fmt, d);
                break;
            case PipelineMode::Baseline:
                acc = pe_step_baseline(a, w, acc, in_fmt, d);
                break;
            case PipelineMode::Skewed:
                acc = pe_step_skewed(a, w, acc, in_fmt, d).out;
                break;
        }
    }
    RoundResult r = round_to_format(acc, accum_fmt);
    if (r.saturated) d->saturations++;
    if (r.flushed) d->flushes++;
    return r;
}

std::vector<uint32_t> reference_matmul(PipelineMode mode,
                                       std::span<const uint32_t> a, size_t m,
                                       size_t k, std::span<const uint32_t> w,
                                       size_t n, const FpFormat& in_fmt,
                                       const FpFormat& accum_fmt,
                                       Diagnostics* diag) {
    std::vector<uint32_t> out(m * n, 0);
    std::vector<ChainTerm> terms(k);
    for (size_t mi = 0; mi < m; ++mi) {
        for (size_t ni = 0; ni < n; ++ni) {
            for (size_t ki = 0; ki < k; ++ki)
                terms[ki] = {a[mi * k + ki], w[ki * n + ni]};
            out[mi * n + ni] =
                reference_chain(mode, terms, in_fmt, accum_fmt, diag).bits;
        }
    }
    return out;
}

}  // namespace sysfp
