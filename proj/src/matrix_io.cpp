#include "sysfp/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace sysfp {

namespace {

[[noreturn]] void fail(const std::string& path, size_t line,
                       const std::string& what) {
    throw MatrixIoError(path + ":" + std::to_string(line) + ": " + what);
}

bool has_suffix(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() &&
           s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Parse one hex token; validates range and decodability for fmt.
uint32_t parse_code(const std::string& tok, const FpFormat& fmt,
                    const std::string& path, size_t line) {
    std::string t = trim(tok);
    if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X'))
        t = t.substr(2);
    if (t.empty()) fail(path, line, "empty cell");
    uint32_t code = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), code, 16);
    if (ec != std::errc{} || p != t.data() + t.size())
        fail(path, line, "bad hex token '" + tok + "'");
    if (code > fmt.code_mask())
        fail(path, line, "code '" + t + "' exceeds " + fmt.name() + " width");
    try {
        (void)decode(code, fmt);
    } catch (const UnsupportedEncoding& e) {
        fail(path, line, e.what());
    }
    return code;
}

PackedMatrix load_csv(const std::string& path, const FpFormat& fmt) {
    std::ifstream in(path);
    if (!in) throw MatrixIoError(path + ": cannot open");
    PackedMatrix m;
    std::string row_text;
    size_t line = 0;
    while (std::getline(in, row_text)) {
        ++line;
        std::string t = trim(row_text);
        if (t.empty() || t[0] == '#') continue;
        std::vector<uint32_t> row;
        std::stringstream ss(t);
        std::string cell;
        while (std::getline(ss, cell, ','))
            row.push_back(parse_code(cell, fmt, path, line));
        if (m.cols == 0) m.cols = row.size();
        if (row.size() != m.cols)
            fail(path, line,
                 "expected " + std::to_string(m.cols) + " cells, got " +
                     std::to_string(row.size()));
        m.data.insert(m.data.end(), row.begin(), row.end());
        m.rows++;
    }
    if (m.rows == 0) throw MatrixIoError(path + ": no matrix rows");
    return m;
}

void store_csv(const std::string& path, const PackedMatrix& m,
               const FpFormat& fmt) {
    std::ofstream out(path);
    if (!out) throw MatrixIoError(path + ": cannot open for writing");
    char buf[16];
    for (size_t r = 0; r < m.rows; ++r) {
        for (size_t c = 0; c < m.cols; ++c) {
            std::snprintf(buf, sizeof buf, "%0*x", fmt.hex_digits(),
                          m.at(r, c));
            out << (c ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw MatrixIoError(path + ": write failed");
}

size_t code_bytes(const FpFormat& fmt) { return (size_t)(fmt.width() + 7) / 8; }

PackedMatrix load_bin(const std::string& path, const FpFormat& fmt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MatrixIoError(path + ": cannot open");
    auto read_u32 = [&](const char* what) {
        unsigned char b[4];
        if (!in.read((char*)b, 4))
            throw MatrixIoError(path + ": truncated " + what);
        return (uint32_t)b[0] | ((uint32_t)b[1] << 8) | ((uint32_t)b[2] << 16) |
               ((uint32_t)b[3] << 24);
    };
    uint32_t rows = read_u32("row count");
    uint32_t cols = read_u32("column count");
    if (rows == 0 || cols == 0) throw MatrixIoError(path + ": empty matrix");
    PackedMatrix m(rows, cols);
    size_t nb = code_bytes(fmt);
    for (size_t i = 0; i < m.data.size(); ++i) {
        unsigned char b[4] = {0, 0, 0, 0};
        if (!in.read((char*)b, (std::streamsize)nb))
            throw MatrixIoError(path + ": truncated at element " +
                                std::to_string(i));
        uint32_t code = (uint32_t)b[0] | ((uint32_t)b[1] << 8) |
                        ((uint32_t)b[2] << 16) | ((uint32_t)b[3] << 24);
        if (code > fmt.code_mask())
            throw MatrixIoError(path + ": element " + std::to_string(i) +
                                " exceeds " + fmt.name() + " width");
        try {
            (void)decode(code, fmt);
        } catch (const UnsupportedEncoding& e) {
            throw MatrixIoError(path + ": element " + std::to_string(i) + ": " +
                                e.what());
        }
        m.data[i] = code;
    }
    return m;
}

void store_bin(const std::string& path, const PackedMatrix& m,
               const FpFormat& fmt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MatrixIoError(path + ": cannot open for writing");
    auto write_u32 = [&](uint32_t v) {
        unsigned char b[4] = {(unsigned char)(v & 0xff),
                              (unsigned char)((v >> 8) & 0xff),
                              (unsigned char)((v >> 16) & 0xff),
                              (unsigned char)((v >> 24) & 0xff)};
        out.write((char*)b, 4);
    };
    write_u32((uint32_t)m.rows);
    write_u32((uint32_t)m.cols);
    size_t nb = code_bytes(fmt);
    for (uint32_t code : m.data) {
        unsigned char b[4] = {(unsigned char)(code & 0xff),
                              (unsigned char)((code >> 8) & 0xff),
                              (unsigned char)((code >> 16) & 0xff),
                              (unsigned char)((code >> 24) & 0xff)};
        out.write((char*)b, (std::streamsize)nb);
    }
    if (!out) throw MatrixIoError(path + ": write failed");
}

}  // namespace

PackedMatrix load_matrix(const std::string& path, const FpFormat& fmt) {
    if (has_suffix(path, ".csv")) return load_csv(path, fmt);
    if (has_suffix(path, ".bin")) return load_bin(path, fmt);
    throw MatrixIoError(path + ": unknown matrix extension (use .csv or .bin)");
}

void store_matrix(const std::string& path, const PackedMatrix& m,
                  const FpFormat& fmt) {
    if (has_suffix(path, ".csv")) return store_csv(path, m, fmt);
    if (has_suffix(path, ".bin")) return store_bin(path, m, fmt);
    throw MatrixIoError(path + ": unknown matrix extension (use .csv or .bin)");
}

}  // namespace sysfp
