#pragma once
// ============================================================================
// Row-major matrix of packed floating-point codes.  The element width is
// whatever format the codes belong to; storage is uniformly uint32_t.
// ============================================================================

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sysfp {

struct PackedMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<uint32_t> data;  // rows * cols, row-major

    PackedMatrix() = default;
    PackedMatrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0) {}

    uint32_t& at(size_t r, size_t c) { return data[r * cols + c]; }
    uint32_t at(size_t r, size_t c) const { return data[r * cols + c]; }

    bool operator==(const PackedMatrix&) const = default;
};

}  // namespace sysfp
