#include "fermitest/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "fermitest/error.hpp"
#include "fermitest/io.hpp"

namespace fermitest {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void allow_keys(const json& j, const std::string& where, std::set<std::string> keys) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!keys.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + " is missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
T get_or(const json& j, const std::string& key, const std::string& where, T fallback) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

std::vector<double> real_grid(const json& j, const std::string& key,
                              std::vector<double> fallback, bool allow_empty) {
  auto grid = get_or(j, key, "config", std::move(fallback));
  if (grid.empty() && !allow_empty) throw ConfigError(key + " must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ConfigError(key + " has a non-finite entry");
    if (i && !(grid[i] > grid[i - 1])) throw ConfigError(key + " must be strictly increasing");
  }
  return grid;
}

std::vector<int> size_list(const json& j, const std::string& key, const std::string& where,
                           std::vector<int> fallback) {
  auto list = get_or(j, key, where, std::move(fallback));
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i] < 1) throw ConfigError(where + "." + key + " entries must be ≥ 1");
    if (i && list[i] <= list[i - 1])
      throw ConfigError(where + "." + key + " must be strictly increasing");
  }
  return list;
}

std::vector<int> default_converge_n(int nu) {
  switch (nu) {
    case 1: return {64, 128, 256, 512};
    case 2: return {8, 16, 32};
    case 3: return {4, 8};
    default: return {2, 4};
  }
}

int faithfulness_resolution(int nu) {
  return nu == 1 ? 256 : nu == 2 ? 64 : 16;
}

SymbolFunction checked_pair_member(const json& j, const std::string& name, int nu,
                                   double eta, const fs::path& base) {
  SymbolFunction s = parse_symbol(j, nu, eta, base);
  const auto report = verify_faithfulness(s, faithfulness_resolution(nu));
  if (!report.pass)
    throw ConfigError("symbol " + name + " leaves [eta, 1-eta]: range [" +
                      io::format_number(report.min) + ", " + io::format_number(report.max) +
                      "] with eta " + io::format_number(eta));
  return s;
}

std::vector<SzegoCase> parse_szego(const json& list, const RunConfig& cfg,
                                   const fs::path& base) {
  if (!list.is_array()) throw ConfigError("converge.szego must be an array");
  std::vector<SzegoCase> cases;
  for (const auto& item : list) {
    allow_keys(item, "szego case", {"label", "symbols", "functions"});
    SzegoCase c;
    c.label = get<std::string>(item, "label", "szego case");
    const json& symbols = item.at("symbols");
    const auto funcs = get<std::vector<std::string>>(item, "functions", "szego case");
    if (!symbols.is_array() || symbols.size() != funcs.size() || funcs.empty())
      throw ConfigError("szego case '" + c.label + "' needs one function per symbol");
    for (const auto& s : symbols) {
      if (s.is_string() && s == "q") c.symbols.push_back(cfg.q);
      else if (s.is_string() && s == "r") c.symbols.push_back(cfg.r);
      else c.symbols.push_back(parse_symbol(s, cfg.nu, 0.0, base));
    }
    for (const auto& f : funcs) c.funcs.push_back(linalg::ScalarFunction::by_name(f));
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<SzegoCase> default_szego(const RunConfig& cfg) {
  std::vector<SzegoCase> cases;
  for (const char* name : {"identity", "log", "square"}) {
    const auto f = linalg::ScalarFunction::by_name(name);
    cases.push_back({std::string(name) + "(q)*" + name + "(r)", {cfg.q, cfg.r}, {f, f}});
  }
  return cases;
}

}  // namespace

SymbolFunction parse_symbol(const json& j, int nu, double eta, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("symbol must be an object");
  const auto kind = get<std::string>(j, "kind", "symbol");
  try {
    if (kind == "expr") {
      allow_keys(j, "expr symbol", {"kind", "text"});
      return SymbolFunction::from_text(get<std::string>(j, "text", "symbol"), nu, eta);
    }
    if (kind == "fourier") {
      allow_keys(j, "fourier symbol", {"kind", "coeffs"});
      std::map<MultiIndex, Complex> coeffs;
      for (const auto& c : j.at("coeffs")) {
        allow_keys(c, "fourier coefficient", {"k", "re", "im"});
        auto k = get<MultiIndex>(c, "k", "fourier coefficient");
        const Complex value(get_or(c, "re", "fourier coefficient", 0.0),
                            get_or(c, "im", "fourier coefficient", 0.0));
        if (!coeffs.emplace(std::move(k), value).second)
          throw ConfigError("duplicate Fourier coefficient index");
      }
      return SymbolFunction::from_fourier(nu, std::move(coeffs), eta);
    }
    if (kind == "grid") {
      allow_keys(j, "grid symbol", {"kind", "resolution", "values_path"});
      auto res = get<std::vector<int>>(j, "resolution", "grid symbol");
      if (static_cast<int>(res.size()) != nu)
        throw ConfigError("grid resolution must have one entry per axis");
      std::size_t count = 1;
      for (int n : res) {
        if (n < 2) throw ConfigError("grid resolution entries must be ≥ 2");
        count *= static_cast<std::size_t>(n);
      }
      fs::path path = get<std::string>(j, "values_path", "grid symbol");
      if (path.is_relative()) path = base / path;
      return SymbolFunction::from_grid(std::move(res), io::read_f64_array(path, count), eta);
    }
    if (kind == "gibbs") {
      allow_keys(j, "gibbs symbol", {"kind", "dispersion", "beta"});
      const SymbolFunction h = parse_symbol(j.at("dispersion"), nu, 0.0, base);
      return gibbs_symbol(h, get<double>(j, "beta", "gibbs symbol")).symbol.with_eta(eta);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(kind + " symbol: " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(kind + " symbol: " + e.what());
  }
  throw ConfigError("unknown symbol kind '" + kind + "'");
}

namespace {

RunConfig parse_config_checked(const json& doc, const fs::path& base) {
  allow_keys(doc, "config",
             {"nu", "eta", "q", "r", "quadrature", "t_grid", "r_grid", "a_grid", "finite_n",
              "row_cap", "converge", "oracle", "output_dir", "seed"});
  RunConfig cfg;
  if (doc.contains("nu") && !doc.at("nu").is_number_integer())
    throw ConfigError("nu must be a positive integer");
  cfg.nu = get_or(doc, "nu", "config", 1);
  if (cfg.nu < 1) throw ConfigError("nu must be a positive integer");
  cfg.eta = get<double>(doc, "eta", "config");
  if (!(cfg.eta > 0.0 && cfg.eta < 0.5)) throw ConfigError("eta must lie in (0, 1/2)");

  cfg.row_cap = get_or<std::size_t>(doc, "row_cap", "config", kDefaultRowCap);
  if (cfg.row_cap < 1) throw ConfigError("row_cap must be positive");

  if (doc.contains("quadrature")) {
    const json& qj = doc.at("quadrature");
    allow_keys(qj, "quadrature", {"resolution", "refinement"});
    cfg.quadrature.resolution = get_or(qj, "resolution", "quadrature", std::vector<int>{});
    cfg.quadrature.refinement = get_or(qj, "refinement", "quadrature", 2);
  }
  try {
    cfg.quadrature.resolved(cfg.nu);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  if (!doc.contains("q") || !doc.contains("r")) throw ConfigError("config needs q and r");
  cfg.q = checked_pair_member(doc.at("q"), "q", cfg.nu, cfg.eta, base);
  cfg.r = checked_pair_member(doc.at("r"), "r", cfg.nu, cfg.eta, base);

  std::vector<double> unit_grid;
  for (int i = 0; i <= 20; ++i) unit_grid.push_back(i / 20.0);
  cfg.t_grid = real_grid(doc, "t_grid", unit_grid, true);
  cfg.r_grid = real_grid(doc, "r_grid", cfg.r_grid, false);
  if (cfg.r_grid.front() < 0.0) throw ConfigError("r_grid entries must be ≥ 0");
  cfg.a_grid = real_grid(doc, "a_grid", cfg.a_grid, false);
  cfg.finite_n = size_list(doc, "finite_n", "config", {});

  cfg.converge.n_list = default_converge_n(cfg.nu);
  if (doc.contains("converge")) {
    const json& cj = doc.at("converge");
    allow_keys(cj, "converge", {"n_list", "t_grid", "szego"});
    cfg.converge.n_list = size_list(cj, "n_list", "converge", cfg.converge.n_list);
    cfg.converge.t_grid = real_grid(cj, "t_grid", cfg.converge.t_grid, false);
    if (cj.contains("szego")) cfg.converge.szego = parse_szego(cj.at("szego"), cfg, base);
    else cfg.converge.szego = default_szego(cfg);
  } else {
    cfg.converge.szego = default_szego(cfg);
  }

  if (doc.contains("oracle")) {
    const json& oj = doc.at("oracle");
    allow_keys(oj, "oracle",
               {"mode_cap", "n_list", "a", "study_n", "trials", "t_probe", "fault_injection"});
    auto& o = cfg.oracle;
    o.mode_cap = get_or(oj, "mode_cap", "oracle", o.mode_cap);
    o.n_list = size_list(oj, "n_list", "oracle", o.n_list);
    o.a = get_or(oj, "a", "oracle", o.a);
    o.study_n = size_list(oj, "study_n", "oracle", o.study_n);
    o.trials = get_or(oj, "trials", "oracle", o.trials);
    o.t_probe = get_or(oj, "t_probe", "oracle", o.t_probe);
    if (oj.contains("fault_injection")) {
      const json& fj = oj.at("fault_injection");
      allow_keys(fj, "oracle.fault_injection", {"density_trace_scale"});
      o.density_trace_scale = get_or(fj, "density_trace_scale", "fault_injection", 1.0);
    }
  }
  const auto& o = cfg.oracle;
  if (o.mode_cap < 1 || o.mode_cap > kDefaultModeCap)
    throw ConfigError("oracle.mode_cap must lie in [1, " + std::to_string(kDefaultModeCap) + "]");
  for (const auto* list : {&o.n_list, &o.study_n})
    for (int n : *list)
      if (std::pow(static_cast<double>(n), cfg.nu) > o.mode_cap)
        throw ConfigError("oracle box n=" + std::to_string(n) + " has more than mode_cap=" +
                          std::to_string(o.mode_cap) + " modes");
  if (o.trials < 1) throw ConfigError("oracle.trials must be positive");
  if (!std::isfinite(o.a)) throw ConfigError("oracle.a must be finite");
  if (!(o.density_trace_scale > 0.0) || !std::isfinite(o.density_trace_scale))
    throw ConfigError("density_trace_scale must be positive");

  for (const auto* list : {&cfg.finite_n, &cfg.converge.n_list})
    for (int n : *list)
      if (std::pow(static_cast<double>(n), cfg.nu) > static_cast<double>(cfg.row_cap))
        throw ConfigError("box n=" + std::to_string(n) + " exceeds row_cap=" +
                          std::to_string(cfg.row_cap));

  fs::path out = get_or<std::string>(doc, "output_dir", "config", "out");
  cfg.output_dir = out.is_relative() ? base / out : out;
  cfg.seed = get_or<std::uint64_t>(doc, "seed", "config", 0);
  return cfg;
}

}  // namespace

RunConfig parse_config(const json& doc, const fs::path& base) {
  try {
    return parse_config_checked(doc, base);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

}  // namespace fermitest
