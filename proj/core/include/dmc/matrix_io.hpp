#pragma once

#include <filesystem>
#include <string>

#include "dmc/matrix.hpp"

namespace dmc {

enum class MatrixFormat { csv, binary };

//! Picks .bin/.dmc -> binary, everything else -> csv.
MatrixFormat format_from_extension(const std::filesystem::path& path);

//! Loads a sample matrix. CSV: one row per line, comma-separated, '.'
//! decimal separator; `header` skips the first line. Binary: magic "DMC1",
//! u32 LE rows, u32 LE cols, then rows*cols little-endian f64, row-major.
//! Parse failures throw io_error naming the line or byte offset.
DataMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format, bool header = false);
DataMatrix load_matrix(const std::filesystem::path& path, bool header = false);

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m);
void save_matrix_binary(const std::filesystem::path& path, const Matrix& m);
void save_matrix(const std::filesystem::path& path, const Matrix& m);

//! Shortest round-trip decimal form of v (locale-independent).
std::string format_double(double v);

} // namespace dmc
