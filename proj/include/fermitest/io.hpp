#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fermitest/linalg.hpp"

namespace fermitest::io {

/// Shortest-safe round-trip text for a double ("%.17g").
std::string format_number(double v);

/// Comma-separated table with a header row and LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  /// Appends a row; the field count must match the header.
  void add_row(std::vector<std::string> fields);
  std::size_t rows() const { return rows_; }
  const std::string& text() const { return text_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

/// Writes bytes verbatim (no newline translation), replacing the file.
void write_file(const std::filesystem::path& path, const std::string& content);

/// Matrix as little-endian f64 pairs (re, im), row-major.
void write_matrix_binary(const std::filesystem::path& path, const CMatrix& m);
CMatrix read_matrix_binary(const std::filesystem::path& path, std::size_t rows,
                           std::size_t cols);

/// Little-endian f64 array; the file must hold exactly `count` values.
std::vector<double> read_f64_array(const std::filesystem::path& path,
                                   std::size_t count);
void write_f64_array(const std::filesystem::path& path,
                     const std::vector<double>& values);

}  // namespace fermitest::io
