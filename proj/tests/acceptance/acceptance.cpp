// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--criterion N]

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "../random_symbols.hpp"
#include "../scan.hpp"
#include "fermitest/exponents.hpp"
#include "fermitest/fock.hpp"
#include "fermitest/io.hpp"
#include "fermitest/quasifree.hpp"

using namespace fermitest;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fixed(double v, int digits = 6) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

CMatrix random_matrix(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(m, m);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(g(rng), g(rng));
  return a;
}

CMatrix random_correlation(int m, std::mt19937_64& rng) {
  const CMatrix a = random_matrix(m, rng);
  Eigen::SelfAdjointEigenSolver<CMatrix> es((a + a.adjoint()) / 2.0);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  RVector v(m);
  for (int i = 0; i < m; ++i) v[i] = u(rng);
  return es.eigenvectors() * v.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int pair_index = 0; pair_index < 20; ++pair_index) {
    const auto q = testing::random_faithful_symbol(rng);
    const auto r = testing::random_faithful_symbol(rng);
    for (int m : {2, 4, 6, 8}) {
      const auto pair = FiniteStatePair::from_symbols(q, r, m);
      const auto rho = quasifree_density(pair.q(), pair.eta());
      const auto sigma = quasifree_density(pair.r(), pair.eta());
      for (double t : {-0.5, 0.25, 0.5, 0.75, 1.5})
        worst = std::max(worst, std::abs(psi_n(pair, t) - log_trace_power_product(rho, sigma, t)));
    }
  }
  return {worst <= 1e-9, "20 pairs, m in {2,4,6,8}, max |psi_n - log Tr| = " + sci(worst) + " (limit 1e-9)"};
}

Outcome relative_entropy_equivalence() {
  std::mt19937_64 rng(202);
  double worst_trace = 0.0, worst_derivative = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = testing::random_faithful_symbol(rng);
    const auto r = testing::random_faithful_symbol(rng);
    const int m = 1 + trial % 8;
    const auto pair = FiniteStatePair::from_symbols(q, r, m);
    const double s = relative_entropy_n(pair);
    const double fock = relative_entropy(quasifree_density(pair.q(), pair.eta()),
                                         quasifree_density(pair.r(), pair.eta()));
    worst_trace = std::max(worst_trace, std::abs(s - fock));
    worst_derivative = std::max(worst_derivative, std::abs(psi_n_derivative(pair, 1.0, 1e-4) - fock));
  }
  return {worst_trace <= 1e-9 && worst_derivative <= 1e-6,
          "m <= 8, trace formula vs Fock " + sci(worst_trace) + " (limit 1e-9), psi_n'(1) vs Fock " +
              sci(worst_derivative) + " (limit 1e-6)"};
}

Outcome second_quantization_trace() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 6;
    const CMatrix a = random_matrix(m, rng);
    const Complex expected = (CMatrix::Identity(m, m) + a).determinant();
    worst = std::max(worst, std::abs(second_quantization(a).trace() - expected) / std::abs(expected));
  }
  return {worst <= 1e-9, "50 random A, m <= 6, max relative error " + sci(worst) + " (limit 1e-9)"};
}

Outcome szego_convergence() {
  const auto a1 = SymbolFunction::from_text("0.5+0.25*cos(x)", 1, 0.25);
  const auto a2 = SymbolFunction::from_text("0.5-0.25*cos(x)", 1, 0.25);
  const int ns[] = {64, 128, 256, 512};
  bool pass = true;
  std::string detail;
  for (const char* name : {"identity", "log", "square"}) {
    const auto f = linalg::ScalarFunction::by_name(name);
    const auto rows = szego_convergence_study({name, {a1, a2}, {f, f}}, ns);
    bool decreasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i) decreasing &= rows[i].abs_error < rows[i - 1].abs_error;
    const bool ok = decreasing && rows.back().abs_error <= 1e-3;
    pass &= ok;
    detail += std::string(detail.empty() ? "" : "; ") + name + " err(512)=" + sci(rows.back().abs_error) +
              (decreasing ? " decreasing" : " NOT decreasing");
  }
  return {pass, detail + " (limit 1e-3)"};
}

Outcome classical_reduction() {
  const SampledPair sym(SymbolFunction::constant(1, 0.1, 0.1), SymbolFunction::constant(1, 0.9, 0.1));
  const double chernoff = chernoff_bound(sym).value;
  const SampledPair kl_pair(SymbolFunction::constant(1, 0.5, 0.2), SymbolFunction::constant(1, 0.25, 0.2));
  const double stein = psi_derivative(kl_pair, 1.0).value;
  const double kl = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  const double e1 = std::abs(chernoff + std::log(0.6)), e2 = std::abs(stein - kl);
  return {e1 <= 1e-6 && e2 <= 1e-8, "Chernoff(0.1, 0.9) = " + fixed(chernoff, 9) + " |err| " + sci(e1) +
                                        " (limit 1e-6); stein(0.5, 0.25) = " + fixed(stein, 9) + " |err| " +
                                        sci(e2) + " (limit 1e-8)"};
}

Outcome convex_analysis() {
  const auto e = [](const char* text) { return SymbolFunction::from_text(text, 1, 0.05); };
  // 256-point quadrature: the optimizers and the scans see the same sampled ψ.
  const QuadratureConfig cfg{{256}, 2};
  std::vector<SampledPair> pairs;
  pairs.emplace_back(e("0.5"), e("0.25"), cfg);
  pairs.emplace_back(e("0.1"), e("0.9"), cfg);
  pairs.emplace_back(e("0.5+0.25*cos(x)"), e("0.5"), cfg);
  pairs.emplace_back(e("0.5+0.3*cos(x)"), e("0.4-0.2*sin(2*x)"), cfg);
  pairs.emplace_back(e("0.2+0.1*cos(x)*cos(x)"), e("0.7+0.2*sin(x)"), cfg);
  const std::vector<double> r_grid{0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
  const std::vector<double> a_grid{-0.3, -0.1, -0.02, 0.0, 0.02, 0.1, 0.3};

  double worst_scan = 0.0, worst_convexity = 0.0;
  bool h0_exact = true, monotone = true;
  for (const auto& pair : pairs) {
    const auto& level = pair.base();
    const auto c = chernoff_bound(pair);
    worst_scan = std::max(worst_scan, std::abs(c.value - testing::grid_scan_max(
                                                             [&](double t) { return -psi_on(level, t); }, 0, 1).value));
    double previous = 1e300;
    for (double r : r_grid) {
      const auto h = hoeffding_bound(pair, r);
      if (r == 0.0) {
        h0_exact &= h.value == psi_derivative(pair, 1.0).value;
      } else {
        const auto scan = testing::grid_scan_max(
            [&](double t) { return (-t * r - psi_on(level, t)) / (1 - t); }, 0, 1 - 1e-5);
        worst_scan = std::max(worst_scan, std::abs(h.value - scan.value));
      }
      monotone &= h.value <= previous;
      previous = h.value;
    }
    for (double a : a_grid) {
      const auto scan = testing::grid_scan_max([&](double t) { return t * a - psi_on(level, t); }, 0, 1);
      worst_scan = std::max(worst_scan, std::abs(polar(pair, a).value - scan.value));
    }
    for (int i = 1; i < 60; ++i) {
      const double t = -1.0 + 0.05 * i;
      const double second = psi_on(level, t + 0.05) - 2 * psi_on(level, t) + psi_on(level, t - 0.05);
      worst_convexity = std::min(worst_convexity, second);
    }
  }
  const bool pass = worst_scan <= 1e-8 && worst_convexity >= -1e-9 && h0_exact && monotone;
  return {pass, "5 pairs, optimizer vs 1e-5 scan " + sci(worst_scan) + " (limit 1e-8), min second difference " +
                    sci(worst_convexity) + " (limit -1e-9), H(0) = psi'(1) " + (h0_exact ? "exact" : "MISMATCH") +
                    ", H non-increasing " + (monotone ? "yes" : "NO")};
}

Outcome neyman_pearson() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> ua(-0.5, 0.5), us(0.5, 4.0);
  int violations = 0;
  double worst_gap = -1e300, worst_closed = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    const auto rho = quasifree_density(random_correlation(3, rng), 0.05);
    const auto sigma = quasifree_density(random_correlation(3, rng), 0.05);
    const auto report = np_optimality_check(rho, sigma, ua(rng), us(rng), 50, rng);
    violations += report.violations;
    worst_gap = std::max(worst_gap, report.worst_gap);
    worst_closed = std::max(worst_closed, report.closed_form_residual);
  }
  return {violations == 0 && worst_closed <= 1e-10,
          "100 instances x 50 random tests, violations " + std::to_string(violations) + ", worst gap " +
              sci(worst_gap) + ", closed form residual " + sci(worst_closed) + " (limit 1e-10)"};
}

Outcome exponent_trend() {
  const auto q = SymbolFunction::constant(1, 0.5, 0.2);
  const auto r = SymbolFunction::constant(1, 0.25, 0.2);
  const int ns[] = {4, 6, 8, 10, 12};
  const auto rows = exponent_convergence_study(q, r, 0.0, ns, 12);
  const double target = chernoff_bound(SampledPair(q, r)).value;
  bool increasing = true;
  std::string seq;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double v = rows[i].combined_exponent.value_or(NAN);
    seq += (i ? ", " : "") + fixed(v, 4);
    if (i) increasing &= v > rows[i - 1].combined_exponent.value_or(NAN);
  }
  const double last = rows.back().combined_exponent.value_or(NAN);
  const double rel = std::abs(last - target) / target;
  return {increasing && rel <= 0.15, "sequence n=4..12: " + seq + "; Chernoff " + fixed(target, 4) +
                                         "; increasing " + (increasing ? "yes" : "no") + ", relative gap at n=12 " +
                                         fixed(100 * rel, 1) + "% (limit 15%)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "fermitest_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const nlohmann::json doc = {{"eta", 0.15},
                              {"q", {{"kind", "expr"}, {"text", "0.5+0.25*cos(x)+0.05*sin(3*x)"}}},
                              {"r", {{"kind", "expr"}, {"text", "0.45-0.2*sin(x)"}}},
                              {"finite_n", {8, 32}},
                              {"seed", 42}};
  io::write_file(dir / "config.json", doc.dump());
  std::string reference;
  int runs = 0, mismatches = 0;
  for (int threads : {1, 2, 3, 4, 1}) {
    const fs::path out = dir / ("run" + std::to_string(runs++));
    const std::string cmd = std::string(FERMITEST_EXE) + " exponents --config " + (dir / "config.json").string() +
                            " --seed 42 --threads " + std::to_string(threads) + " --out " + out.string();
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "exponents run failed: " + cmd};
    std::string all;
    for (const char* f : {"report.json", "curves.csv", "psi_curve.json"}) all += slurp(out / f);
    if (reference.empty()) reference = all;
    else if (all != reference) ++mismatches;
  }
  return {mismatches == 0, std::to_string(runs) + " runs with 1..4 threads, " + std::to_string(mismatches) +
                               " differing outputs"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_secs;  // wall-clock limit, 0 when unbounded
  };
  const std::vector<Criterion> criteria{
      {"oracle equivalence", oracle_equivalence, 120},
      {"relative-entropy equivalence", relative_entropy_equivalence, 0},
      {"Tr F(A) = det(I+A)", second_quantization_trace, 0},
      {"Szego convergence", szego_convergence, 60},
      {"classical reduction", classical_reduction, 0},
      {"convex-analysis correctness", convex_analysis, 0},
      {"Neyman-Pearson optimality", neyman_pearson, 0},
      {"exponent convergence trend", exponent_trend, 300},
      {"determinism", determinism, 0},
  };
  linalg::set_blas_threads(1);
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double budget = criteria[i].budget_secs;
    if (budget > 0 && secs > budget) {
      o.pass = false;
      o.detail += "; over time budget of " + std::to_string(static_cast<int>(budget)) + "s";
    }
    std::printf("criterion %zu %s: %s | %s | %.1fs\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all &= o.pass;
  }
  return all ? 0 : 1;
}
