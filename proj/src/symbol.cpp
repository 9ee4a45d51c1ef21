#include "fermitest/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <optional>

#include <fftw3.h>

#include "fermitest/error.hpp"
#include "fermitest/kernels.hpp"

namespace fermitest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSymmetryTolerance = 1e-12;

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Normalized forward DFT (X_k / N) of a real row-major tensor.
std::vector<Complex> forward_dft(std::span<const double> values,
                                 const std::vector<int>& shape) {
  std::vector<Complex> in(values.begin(), values.end());
  std::vector<Complex> out(values.size());
  auto* in_ptr = reinterpret_cast<fftw_complex*>(in.data());
  auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), in_ptr,
                         out_ptr, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw NumericalError("FFTW failed to create a plan");
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / static_cast<double>(values.size());
  for (auto& c : out) c *= scale;
  return out;
}

/// Interpolation weights along one axis of an N-point grid at coordinate x:
/// index j carries frequency j (j < N/2) or j - N (j > N/2); the Nyquist index
/// of an even grid contributes cos(N x / 2).
std::vector<Complex> axis_weights(int n, double x) {
  std::vector<Complex> w(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    if (2 * j < n)
      w[j] = std::polar(1.0, j * x);
    else if (2 * j > n)
      w[j] = std::polar(1.0, (j - n) * x);
    else
      w[j] = std::cos(0.5 * n * x);
  }
  return w;
}

/// Contracts `axis` of a row-major tensor with the rows of `m`
/// (m is rows x shape[axis]); the axis length becomes m.rows().
std::vector<Complex> apply_axis(const std::vector<Complex>& tensor,
                                std::vector<int>& shape, int axis,
                                const CMatrix& m) {
  std::size_t outer = 1, inner = 1;
  for (int d = 0; d < axis; ++d) outer *= static_cast<std::size_t>(shape[d]);
  for (int d = axis + 1; d < static_cast<int>(shape.size()); ++d)
    inner *= static_cast<std::size_t>(shape[d]);
  const auto len = static_cast<std::size_t>(shape[axis]);
  const auto rows = static_cast<std::size_t>(m.rows());
  std::vector<Complex> out(outer * rows * inner);
  kernels::parallel_for(outer, [&](std::size_t o) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t i = 0; i < inner; ++i) {
        Complex s{};
        for (std::size_t j = 0; j < len; ++j)
          s += m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) *
               tensor[(o * len + j) * inner + i];
        out[(o * rows + r) * inner + i] = s;
      }
  });
  shape[axis] = static_cast<int>(rows);
  return out;
}

void check_point(std::span<const double> x, int nu) {
  if (static_cast<int>(x.size()) != nu)
    throw DomainError("point has " + std::to_string(x.size()) +
                      " coordinates, symbol dimension is " + std::to_string(nu));
  for (double xi : x)
    if (!(xi >= 0.0 && xi < kTwoPi))
      throw DomainError("point coordinate outside [0, 2*pi)");
}

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 0.5))
    throw DomainError("margin eta must lie in [0, 1/2]");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

struct SymbolFunction::State {
  int nu = 1;
  double eta = 0.0;
  SymbolKind kind = SymbolKind::expression;
  std::string description;
  std::vector<int> dft_resolution;

  std::optional<Expression> expr;
  std::map<MultiIndex, Complex> coeffs;
  std::vector<int> grid_resolution;
  std::vector<double> grid_values;
  std::vector<Complex> grid_spectrum;

  std::function<double(double)> map;

  mutable std::once_flag dft_once;
  mutable std::vector<Complex> dft;

  std::shared_ptr<State> clone() const {
    auto s = std::make_shared<State>();
    s->nu = nu;
    s->eta = eta;
    s->kind = kind;
    s->description = description;
    s->dft_resolution = dft_resolution;
    s->expr = expr;
    s->coeffs = coeffs;
    s->grid_resolution = grid_resolution;
    s->grid_values = grid_values;
    s->grid_spectrum = grid_spectrum;
    s->map = map;
    return s;
  }

  double evaluate_base(std::span<const double> x) const {
    switch (kind) {
      case SymbolKind::expression:
        return expr->evaluate(x);
      case SymbolKind::fourier: {
        Complex s{};
        for (const auto& [k, a] : coeffs) {
          double phase = 0.0;
          for (int d = 0; d < nu; ++d) phase += k[d] * x[d];
          s += a * std::polar(1.0, phase);
        }
        return s.real();
      }
      case SymbolKind::grid: {
        std::vector<Complex> t = grid_spectrum;
        std::vector<int> shape = grid_resolution;
        for (int d = nu - 1; d >= 0; --d) {
          const auto w = axis_weights(shape[d], x[d]);
          CMatrix row(1, shape[d]);
          for (int j = 0; j < shape[d]; ++j) row(0, j) = w[j];
          t = apply_axis(t, shape, d, row);
        }
        return t[0].real();
      }
    }
    return 0.0;
  }

  double evaluate(std::span<const double> x) const {
    const double v = evaluate_base(x);
    return map ? map(v) : v;
  }

  std::vector<double> sample(std::span<const int> resolution) const {
    std::vector<int> res(resolution.begin(), resolution.end());
    std::vector<double> out;
    if (kind == SymbolKind::grid) {
      if (res == grid_resolution) {
        out = grid_values;
      } else {
        std::vector<Complex> t = grid_spectrum;
        std::vector<int> shape = grid_resolution;
        for (int d = 0; d < nu; ++d) {
          CMatrix m(res[d], shape[d]);
          for (int r = 0; r < res[d]; ++r) {
            const auto w = axis_weights(shape[d], kTwoPi * r / res[d]);
            for (int j = 0; j < shape[d]; ++j) m(r, j) = w[j];
          }
          t = apply_axis(t, shape, d, m);
        }
        out.resize(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i].real();
      }
    } else {
      out = kernels::sample_parallel(kernels::GridShape{res},
                                     [this](std::span<const double> x) {
                                       return evaluate_base(x);
                                     });
    }
    if (map)
      kernels::parallel_for(out.size(), [&](std::size_t i) { out[i] = map(out[i]); });
    return out;
  }

  const std::vector<Complex>& dft_table() const {
    std::call_once(dft_once, [this] {
      const auto values = sample(dft_resolution);
      dft = forward_dft(values, dft_resolution);
    });
    return dft;
  }
};

std::vector<int> default_resolution(int nu) {
  if (nu < 1) throw DomainError("dimension must be a positive integer");
  const int per_axis = nu == 1 ? 4096 : nu == 2 ? 512 : nu == 3 ? 128 : 32;
  return std::vector<int>(static_cast<std::size_t>(nu), per_axis);
}

SymbolFunction SymbolFunction::from_expression(Expression expr, double eta) {
  check_eta(eta);
  auto s = std::make_shared<State>();
  s->nu = expr.dimension();
  s->eta = eta;
  s->kind = SymbolKind::expression;
  s->description = expr.to_string();
  s->dft_resolution = default_resolution(s->nu);
  s->expr = std::move(expr);
  return SymbolFunction(std::move(s));
}

SymbolFunction SymbolFunction::from_text(std::string_view text, int nu,
                                         double eta) {
  return from_expression(Expression::parse(text, nu), eta);
}

SymbolFunction SymbolFunction::constant(int nu, double value, double eta) {
  return from_expression(Expression::constant(value, nu), eta);
}

SymbolFunction SymbolFunction::from_fourier(int nu,
                                            std::map<MultiIndex, Complex> coeffs,
                                            double eta) {
  check_eta(eta);
  if (nu < 1) throw DomainError("dimension must be a positive integer");
  for (const auto& [k, a] : coeffs) {
    if (static_cast<int>(k.size()) != nu)
      throw DomainError("Fourier multi-index has wrong dimension");
    MultiIndex minus(k.size());
    std::transform(k.begin(), k.end(), minus.begin(), [](int v) { return -v; });
    const auto partner = coeffs.find(minus);
    const Complex expected = std::conj(a);
    const Complex actual = partner == coeffs.end() ? Complex{} : partner->second;
    if (std::abs(actual - expected) > kSymmetryTolerance)
      throw DomainError("Fourier coefficients are not conjugate symmetric; the "
                        "symbol would not be real");
  }
  auto s = std::make_shared<State>();
  s->nu = nu;
  s->eta = eta;
  s->kind = SymbolKind::fourier;
  s->description = "fourier[" + std::to_string(coeffs.size()) + " terms]";
  s->dft_resolution = default_resolution(nu);
  s->coeffs = std::move(coeffs);
  return SymbolFunction(std::move(s));
}

SymbolFunction SymbolFunction::from_grid(std::vector<int> resolution,
                                         std::vector<double> values,
                                         double eta) {
  check_eta(eta);
  if (resolution.empty()) throw DomainError("grid needs at least one axis");
  std::size_t total = 1;
  for (int r : resolution) {
    if (r < 2) throw DomainError("grid resolution must be at least 2 per axis");
    total *= static_cast<std::size_t>(r);
  }
  if (values.size() != total)
    throw DomainError("grid table has " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(total));
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("grid table contains a non-finite value");

  auto s = std::make_shared<State>();
  s->nu = static_cast<int>(resolution.size());
  s->eta = eta;
  s->kind = SymbolKind::grid;
  std::string dims;
  for (std::size_t d = 0; d < resolution.size(); ++d)
    dims += (d ? "x" : "") + std::to_string(resolution[d]);
  s->description = "grid[" + dims + "]";
  s->grid_spectrum = forward_dft(values, resolution);
  s->grid_resolution = resolution;
  s->dft_resolution = std::move(resolution);
  s->grid_values = std::move(values);
  return SymbolFunction(std::move(s));
}

int SymbolFunction::dimension() const noexcept { return state_->nu; }
double SymbolFunction::eta() const noexcept { return state_->eta; }
SymbolKind SymbolFunction::kind() const noexcept { return state_->kind; }
const std::string& SymbolFunction::description() const noexcept {
  return state_->description;
}
const std::vector<int>& SymbolFunction::dft_resolution() const noexcept {
  return state_->dft_resolution;
}

double SymbolFunction::evaluate(std::span<const double> x) const {
  check_point(x, state_->nu);
  return state_->evaluate(x);
}

Complex SymbolFunction::fourier_coefficient(std::span<const int> k) const {
  const State& s = *state_;
  if (static_cast<int>(k.size()) != s.nu)
    throw DomainError("multi-index dimension does not match symbol dimension");
  if (s.kind == SymbolKind::fourier && !s.map) {
    const auto it = s.coeffs.find(MultiIndex(k.begin(), k.end()));
    return it == s.coeffs.end() ? Complex{} : it->second;
  }
  std::size_t flat = 0;
  for (int d = 0; d < s.nu; ++d) {
    const int n = s.dft_resolution[d];
    if (2 * std::abs(k[d]) > n)
      throw AliasingError("Fourier index " + std::to_string(k[d]) +
                          " exceeds the alias-safe range " + std::to_string(n / 2) +
                          " of a " + std::to_string(n) + "-point grid");
    flat = flat * static_cast<std::size_t>(n) +
           static_cast<std::size_t>(((k[d] % n) + n) % n);
  }
  return s.dft_table()[flat];
}

std::vector<double> SymbolFunction::sample(std::span<const int> resolution) const {
  if (static_cast<int>(resolution.size()) != state_->nu)
    throw DomainError("sampling resolution has wrong dimension");
  for (int r : resolution)
    if (r < 1) throw DomainError("sampling resolution must be positive");
  return state_->sample(resolution);
}

SymbolFunction SymbolFunction::with_dft_resolution(std::vector<int> resolution) const {
  if (static_cast<int>(resolution.size()) != state_->nu)
    throw DomainError("resolution has wrong dimension");
  for (int r : resolution)
    if (r < 2) throw DomainError("DFT resolution must be at least 2 per axis");
  auto s = state_->clone();
  s->dft_resolution = std::move(resolution);
  return SymbolFunction(std::move(s));
}

SymbolFunction SymbolFunction::with_eta(double eta) const {
  check_eta(eta);
  auto s = state_->clone();
  s->eta = eta;
  return SymbolFunction(std::move(s));
}

SymbolFunction SymbolFunction::mapped(std::function<double(double)> map,
                                      std::string description) const {
  auto s = state_->clone();
  if (s->map) {
    auto inner = std::move(s->map);
    s->map = [inner = std::move(inner), outer = std::move(map)](double v) {
      return outer(inner(v));
    };
  } else {
    s->map = std::move(map);
  }
  s->description = std::move(description);
  return SymbolFunction(std::move(s));
}

double fermi_function(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

GibbsSymbol gibbs_symbol(const SymbolFunction& dispersion, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("inverse temperature must be positive and finite");
  const auto values = dispersion.sample(dispersion.dft_resolution());
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!std::isfinite(*lo) || !std::isfinite(*hi))
    throw DomainError("dispersion is not bounded on the grid");
  const double eta = std::min({fermi_function(beta * *hi),
                               fermi_function(-beta * *lo), 0.5});
  if (eta < 1e-12)
    throw DomainError("Gibbs symbol touches 0 or 1 (derived margin " +
                      format_double(eta) + "); local faithfulness fails");
  SymbolFunction q = dispersion
                         .mapped([beta](double h) { return fermi_function(beta * h); },
                                 "gibbs(beta=" + format_double(beta) + ", " +
                                     dispersion.description() + ")")
                         .with_eta(eta);
  return {std::move(q), eta, *lo, *hi};
}

FaithfulnessReport verify_faithfulness(const SymbolFunction& s,
                                       int grid_resolution) {
  if (grid_resolution < 16)
    throw DomainError("faithfulness grid needs at least 16 points per axis");
  const std::vector<int> res(static_cast<std::size_t>(s.dimension()),
                             grid_resolution);
  const auto values = s.sample(res);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const bool pass = s.eta() <= *lo && *hi <= 1.0 - s.eta();
  return {*lo, *hi, pass};
}

}  // namespace fermitest
