#include "dmc/matrix_io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <system_error>
#include <vector>

#include "dmc/error.hpp"

namespace dmc {

namespace {

static_assert(sizeof(double) == 8);

std::uint64_t to_le(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    std::uint64_t out = 0;
    for (int b = 0; b < 8; ++b) out |= ((v >> (8 * b)) & 0xffULL) << (8 * (7 - b));
    return out;
}

std::uint32_t to_le32(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    return ((v & 0xffU) << 24) | ((v & 0xff00U) << 8) | ((v >> 8) & 0xff00U) | (v >> 24);
}

constexpr char kMagic[4] = {'D', 'M', 'C', '1'};

double parse_field(std::string_view field, std::size_t line_no, std::size_t col_no) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    // from_chars accepts only '-'; allow an explicit plus before a digit
    if (last - first >= 2 && first[0] == '+' && (std::isdigit(first[1]) || first[1] == '.'))
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw io_error("csv: non-numeric field '" + std::string(field) + "' at line " +
                       std::to_string(line_no) + ", column " + std::to_string(col_no));
    return value;
}

} // namespace

MatrixFormat format_from_extension(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".bin" || ext == ".dmc") return MatrixFormat::binary;
    return MatrixFormat::csv;
}

DataMatrix load_matrix(const std::filesystem::path& path, bool header) {
    return load_matrix(path, format_from_extension(path), header);
}

DataMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format, bool header) {
    if (format == MatrixFormat::binary) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw io_error("cannot open '" + path.string() + "'");

        char magic[4];
        if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
            throw io_error("binary matrix '" + path.string() + "': bad magic at offset 0");
        std::uint32_t rows_le = 0, cols_le = 0;
        if (!in.read(reinterpret_cast<char*>(&rows_le), 4))
            throw io_error("binary matrix '" + path.string() + "': truncated header at offset 4");
        if (!in.read(reinterpret_cast<char*>(&cols_le), 4))
            throw io_error("binary matrix '" + path.string() + "': truncated header at offset 8");
        const std::uint32_t rows = to_le32(rows_le);
        const std::uint32_t cols = to_le32(cols_le);

        const std::uint64_t count = static_cast<std::uint64_t>(rows) * cols;
        std::vector<double> values(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            std::uint64_t word = 0;
            if (!in.read(reinterpret_cast<char*>(&word), 8))
                throw io_error("binary matrix '" + path.string() + "': truncated at offset " +
                               std::to_string(12 + 8 * i));
            values[i] = std::bit_cast<double>(to_le(word));
        }
        try {
            return DataMatrix(rows, cols, std::move(values));
        } catch (const validation_error& e) {
            throw io_error("binary matrix '" + path.string() + "': " + e.what());
        }
    }

    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path.string() + "'");

    std::vector<double> values;
    std::size_t cols = 0, rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header && line_no == 1) continue;
        if (line.empty()) {
            // A blank line is only tolerated as a trailing newline artifact.
            std::string rest;
            if (std::getline(in, rest))
                throw io_error("csv '" + path.string() + "': blank line " + std::to_string(line_no));
            break;
        }
        std::size_t field_count = 0;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            const std::string_view field =
                std::string_view(line).substr(pos, comma == std::string::npos ? std::string::npos
                                                                              : comma - pos);
            values.push_back(parse_field(field, line_no, ++field_count));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (rows == 0) {
            cols = field_count;
        } else if (field_count != cols) {
            throw io_error("csv '" + path.string() + "': ragged row at line " +
                           std::to_string(line_no) + " (" + std::to_string(field_count) +
                           " fields, expected " + std::to_string(cols) + ")");
        }
        ++rows;
    }
    try {
        return DataMatrix(rows, cols, std::move(values));
    } catch (const validation_error& e) {
        throw io_error("csv '" + path.string() + "': " + e.what());
    }
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary); // binary: keep LF on every platform
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed for '" + path.string() + "'");
}

void save_matrix_binary(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write '" + path.string() + "'");
    out.write(kMagic, 4);
    const auto rows = to_le32(static_cast<std::uint32_t>(m.rows()));
    const auto cols = to_le32(static_cast<std::uint32_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    for (double v : m.data()) {
        const std::uint64_t word = to_le(std::bit_cast<std::uint64_t>(v));
        out.write(reinterpret_cast<const char*>(&word), 8);
    }
    if (!out) throw io_error("write failed for '" + path.string() + "'");
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
    if (format_from_extension(path) == MatrixFormat::binary)
        save_matrix_binary(path, m);
    else
        save_matrix_csv(path, m);
}

} // namespace dmc
