#pragma once

// Data-parallel inner loops. Every kernel exists twice: `*_serial` is the
// reference implementation kept for tests and benchmarks, `*_parallel` is the
// OpenMP version the library calls. The two produce bit-identical results for
// any thread count: work is split into fixed blocks and partial results are
// combined in an order that depends only on the problem size.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <numbers>
#include <span>
#include <vector>

#include "fermitest/linalg.hpp"

namespace fermitest::kernels {

inline constexpr std::size_t kSumBlock = 1024;
inline constexpr int kMaxWedgeOrder = 24;

/// Runs body(i) for i in [0, count) on the OpenMP team. The first exception
/// thrown by any iteration is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  std::exception_ptr error;
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(fermitest_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Midpoint-split pairwise combination of block partial sums.
template <class T>
T pairwise_combine(std::span<const T> partials) {
  if (partials.empty()) return T{};
  if (partials.size() == 1) return partials[0];
  const std::size_t mid = partials.size() / 2;
  return pairwise_combine(partials.first(mid)) +
         pairwise_combine(partials.subspan(mid));
}

/// Σ term(i) for i in [0, count): blocks of kSumBlock summed left to right,
/// block partials combined pairwise.
template <class T, class Term>
T block_sum_serial(std::size_t count, Term&& term) {
  const std::size_t blocks = (count + kSumBlock - 1) / kSumBlock;
  std::vector<T> partial(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    T s{};
    const std::size_t end = std::min(count, (b + 1) * kSumBlock);
    for (std::size_t i = b * kSumBlock; i < end; ++i) s += term(i);
    partial[b] = s;
  }
  return pairwise_combine<T>(partial);
}

template <class T, class Term>
T block_sum_parallel(std::size_t count, Term&& term) {
  const std::size_t blocks = (count + kSumBlock - 1) / kSumBlock;
  std::vector<T> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    T s{};
    const std::size_t end = std::min(count, (b + 1) * kSumBlock);
    for (std::size_t i = b * kSumBlock; i < end; ++i) s += term(i);
    partial[b] = s;
  });
  return pairwise_combine<T>(partial);
}

/// Uniform tensor grid on [0, 2π)^ν, row-major (last axis fastest).
struct GridShape {
  std::vector<int> axes;

  int dimension() const { return static_cast<int>(axes.size()); }

  std::size_t size() const {
    std::size_t s = 1;
    for (int a : axes) s *= static_cast<std::size_t>(a);
    return s;
  }

  /// Multi-index of a flat position.
  void index(std::size_t flat, std::span<int> out) const {
    for (int d = dimension() - 1; d >= 0; --d) {
      out[d] = static_cast<int>(flat % static_cast<std::size_t>(axes[d]));
      flat /= static_cast<std::size_t>(axes[d]);
    }
  }

  /// Coordinates 2π i_d / N_d of a flat position.
  void point(std::size_t flat, std::span<double> out) const {
    for (int d = dimension() - 1; d >= 0; --d) {
      const auto n = static_cast<std::size_t>(axes[d]);
      out[d] = 2.0 * std::numbers::pi * static_cast<double>(flat % n) /
               static_cast<double>(n);
      flat /= n;
    }
  }
};

/// f evaluated at every grid point.
template <class Fn>
std::vector<double> sample_serial(const GridShape& grid, Fn&& f) {
  std::vector<double> out(grid.size());
  std::vector<double> x(grid.axes.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    grid.point(i, x);
    out[i] = f(std::span<const double>(x));
  }
  return out;
}

template <class Fn>
std::vector<double> sample_parallel(const GridShape& grid, Fn&& f) {
  std::vector<double> out(grid.size());
  const std::size_t blocks = (out.size() + kSumBlock - 1) / kSumBlock;
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> x(grid.axes.size());
    const std::size_t end = std::min(out.size(), (b + 1) * kSumBlock);
    for (std::size_t i = b * kSumBlock; i < end; ++i) {
      grid.point(i, x);
      out[i] = f(std::span<const double>(x));
    }
  });
  return out;
}

namespace detail {
inline Complex dft_term(std::span<const double> values, const GridShape& grid,
                        std::span<const int> k, std::size_t flat) {
  double phase = 0.0;
  std::size_t rest = flat;
  for (int d = grid.dimension() - 1; d >= 0; --d) {
    const long long n = grid.axes[d];
    const long long i = static_cast<long long>(rest % static_cast<std::size_t>(n));
    rest /= static_cast<std::size_t>(n);
    const long long km = ((k[d] % n) + n) % n;
    phase += static_cast<double>((km * i) % n) / static_cast<double>(n);
  }
  return values[flat] * std::polar(1.0, -2.0 * std::numbers::pi * phase);
}
}  // namespace detail

/// (1/N) Σ_j v_j e^{-i<k, x_j>} by direct summation.
inline Complex dft_coefficient_serial(std::span<const double> values,
                                      const GridShape& grid,
                                      std::span<const int> k) {
  const Complex s = block_sum_serial<Complex>(
      values.size(),
      [&](std::size_t j) { return detail::dft_term(values, grid, k, j); });
  return s / static_cast<double>(values.size());
}

inline Complex dft_coefficient_parallel(std::span<const double> values,
                                        const GridShape& grid,
                                        std::span<const int> k) {
  const Complex s = block_sum_parallel<Complex>(
      values.size(),
      [&](std::size_t j) { return detail::dft_term(values, grid, k, j); });
  return s / static_cast<double>(values.size());
}

/// Offset table layout for a truncation of side n: entry for multi-offset
/// d ∈ [-(n-1), n-1]^ν lives at Σ_a (d_a + n - 1) (2n-1)^(ν-1-a).
inline std::size_t offset_table_size(int n, int nu) {
  std::size_t s = 1;
  for (int a = 0; a < nu; ++a) s *= static_cast<std::size_t>(2 * n - 1);
  return s;
}

namespace detail {
inline Complex toeplitz_entry(int n, int nu, std::span<const Complex> table,
                              std::size_t row, std::size_t col) {
  std::size_t pos = 0;
  std::size_t stride = 1;
  const auto side = static_cast<std::size_t>(n);
  for (int a = nu - 1; a >= 0; --a) {
    const long long k = static_cast<long long>(row % side);
    const long long j = static_cast<long long>(col % side);
    row /= side;
    col /= side;
    pos += static_cast<std::size_t>(k - j + n - 1) * stride;
    stride *= static_cast<std::size_t>(2 * n - 1);
  }
  return table[pos];
}
}  // namespace detail

/// n^ν x n^ν matrix with entry (k, j) = table[k - j], multi-indices in
/// lexicographic order.
inline CMatrix toeplitz_fill_serial(int n, int nu,
                                    std::span<const Complex> table) {
  std::size_t dim = 1;
  for (int a = 0; a < nu; ++a) dim *= static_cast<std::size_t>(n);
  CMatrix m(dim, dim);
  for (std::size_t c = 0; c < dim; ++c)
    for (std::size_t r = 0; r < dim; ++r)
      m(r, c) = detail::toeplitz_entry(n, nu, table, r, c);
  return m;
}

inline CMatrix toeplitz_fill_parallel(int n, int nu,
                                      std::span<const Complex> table) {
  std::size_t dim = 1;
  for (int a = 0; a < nu; ++a) dim *= static_cast<std::size_t>(n);
  CMatrix m(dim, dim);
  parallel_for(dim, [&](std::size_t c) {
    for (std::size_t r = 0; r < dim; ++r)
      m(r, c) = detail::toeplitz_entry(n, nu, table, r, c);
  });
  return m;
}

namespace detail {
using MinorMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxWedgeOrder,
                  kMaxWedgeOrder>;

inline int collect_bits(std::uint32_t mask, std::span<int, kMaxWedgeOrder> out) {
  int k = 0;
  for (int i = 0; mask != 0; ++i, mask >>= 1)
    if (mask & 1u) out[k++] = i;
  return k;
}

inline Complex minor_det(const CMatrix& a, std::uint32_t row_mask,
                         std::uint32_t col_mask) {
  std::array<int, kMaxWedgeOrder> rows{};
  std::array<int, kMaxWedgeOrder> cols{};
  const int k = collect_bits(row_mask, rows);
  collect_bits(col_mask, cols);
  if (k == 0) return Complex(1.0, 0.0);
  if (k == 1) return a(rows[0], cols[0]);
  MinorMatrix sub(k, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) sub(i, j) = a(rows[i], cols[j]);
  return sub.determinant();
}
}  // namespace detail

/// Block of ∧^k A between occupation masks of equal popcount: entry (r, c) is
/// det A[rows(masks[r]), cols(masks[c])] with modes in increasing order.
inline CMatrix wedge_block_serial(const CMatrix& a,
                                  std::span<const std::uint32_t> masks) {
  const auto dim = static_cast<Eigen::Index>(masks.size());
  CMatrix out(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r)
      out(r, c) = detail::minor_det(a, masks[r], masks[c]);
  return out;
}

inline CMatrix wedge_block_parallel(const CMatrix& a,
                                    std::span<const std::uint32_t> masks) {
  const auto dim = static_cast<Eigen::Index>(masks.size());
  CMatrix out(dim, dim);
  parallel_for(masks.size(), [&](std::size_t c) {
    const auto col = static_cast<Eigen::Index>(c);
    for (Eigen::Index r = 0; r < dim; ++r)
      out(r, col) = detail::minor_det(a, masks[r], masks[c]);
  });
  return out;
}

}  // namespace fermitest::kernels
