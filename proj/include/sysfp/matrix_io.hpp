#pragma once
// ============================================================================
// Matrix file I/O for packed codes.  Two carriers, picked by extension:
//
//   .csv   one matrix row per line, comma-separated hex tokens, each zero-
//          padded to the format's code width (bf16 "3f80", fp8 "3c", ...).
//          An optional 0x prefix is accepted on input.
//   .bin   little-endian u32 rows, u32 cols, then row-major codes at the
//          format's byte width (1, 2, or 4 bytes per code).
//
// Loading validates every code against the format: values that the datapath
// rejects (Inf/NaN patterns) fail here, with the offending line in the error.
// ============================================================================

#include <stdexcept>
#include <string>

#include "sysfp/formats.hpp"
#include "sysfp/matrix.hpp"

namespace sysfp {

struct MatrixIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PackedMatrix load_matrix(const std::string& path, const FpFormat& fmt);
void store_matrix(const std::string& path, const PackedMatrix& m,
                  const FpFormat& fmt);

}  // namespace sysfp
