#include "fermitest/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "fermitest/error.hpp"

namespace fermitest::io {

namespace {

void put_f64(std::string& out, double v) {
  unsigned char bytes[8];
  std::memcpy(bytes, &v, 8);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + 8);
  out.append(reinterpret_cast<const char*>(bytes), 8);
}

double get_f64(const char* p) {
  unsigned char bytes[8];
  std::memcpy(bytes, p, 8);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + 8);
  double v;
  std::memcpy(&v, bytes, 8);
  return v;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) throw DomainError("CSV header must not be empty");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvTable::add_row(std::vector<std::string> fields) {
  if (fields.size() != columns_)
    throw DomainError("CSV row has " + std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(columns_));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].find_first_of(",\n\"") != std::string::npos)
      throw DomainError("CSV field contains a separator: " + fields[i]);
    if (i) text_ += ',';
    text_ += fields[i];
  }
  text_ += '\n';
  ++rows_;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("write failed for " + path.string());
}

void write_matrix_binary(const std::filesystem::path& path, const CMatrix& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 16);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put_f64(out, m(i, j).real());
      put_f64(out, m(i, j).imag());
    }
  write_file(path, out);
}

CMatrix read_matrix_binary(const std::filesystem::path& path, std::size_t rows,
                           std::size_t cols) {
  const std::string data = read_all(path);
  if (data.size() != rows * cols * 16)
    throw ConfigError(path.string() + " holds " + std::to_string(data.size()) +
                      " bytes, expected " + std::to_string(rows * cols * 16));
  CMatrix m(rows, cols);
  const char* p = data.data();
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j, p += 16)
      m(i, j) = Complex(get_f64(p), get_f64(p + 8));
  return m;
}

std::vector<double> read_f64_array(const std::filesystem::path& path, std::size_t count) {
  const std::string data = read_all(path);
  if (data.size() != count * 8)
    throw ConfigError(path.string() + " holds " + std::to_string(data.size()) +
                      " bytes, expected " + std::to_string(count * 8));
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = get_f64(data.data() + 8 * i);
  return values;
}

void write_f64_array(const std::filesystem::path& path, const std::vector<double>& values) {
  std::string out;
  out.reserve(values.size() * 8);
  for (double v : values) put_f64(out, v);
  write_file(path, out);
}

}  // namespace fermitest::io
