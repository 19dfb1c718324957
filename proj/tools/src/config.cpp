#include "fockmarket_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "fockmarket/errors.hpp"
#include "fockmarket/time_series.hpp"

namespace fockmarket::cli {

namespace {

using boost::property_tree::ptree;

const std::set<std::string> kSections{"run", "params", "state", "space", "checks", "sweep",
                                      "verify"};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!value.empty() && value.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
std::optional<T> parse_number(const std::string& text) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) return std::nullopt;
  return value;
}

// Typed access to one parsed tree. Every failure is recorded and a neutral
// value returned so that parsing can continue and report everything.
class Reader {
 public:
  Reader(const ptree& tree, std::vector<std::string>& errors) : tree_(tree), errors_(errors) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    consumed_.insert(section + "." + key);
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto node = sec->get_child_optional(ptree::path_type(key, '\0'));
    if (!node) return std::nullopt;
    return trim(node->data());
  }

  bool has(const std::string& section, const std::string& key) {
    return raw(section, key).has_value();
  }

  std::string text(const std::string& section, const std::string& key,
                   std::optional<std::string> fallback = std::nullopt) {
    if (auto v = raw(section, key)) return *v;
    if (!fallback) missing(section, key);
    return fallback.value_or("");
  }

  double real(const std::string& section, const std::string& key,
              std::optional<double> fallback = std::nullopt) {
    const auto v = raw(section, key);
    if (!v) {
      if (!fallback) missing(section, key);
      return fallback.value_or(0.0);
    }
    if (auto d = parse_number<double>(*v)) return *d;
    mismatch(section, key, "a number", *v);
    return 0.0;
  }

  std::optional<double> optional_real(const std::string& section, const std::string& key) {
    if (!has(section, key)) return std::nullopt;
    return real(section, key);
  }

  int integer(const std::string& section, const std::string& key,
              std::optional<int> fallback = std::nullopt) {
    const auto v = raw(section, key);
    if (!v) {
      if (!fallback) missing(section, key);
      return fallback.value_or(0);
    }
    if (auto d = parse_number<int>(*v)) return *d;
    mismatch(section, key, "an integer", *v);
    return 0;
  }

  bool flag(const std::string& section, const std::string& key, bool fallback) {
    const auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    mismatch(section, key, "true or false", *v);
    return fallback;
  }

  template <typename T>
  std::vector<T> list(const std::string& section, const std::string& key,
                      std::optional<std::vector<T>> fallback = std::nullopt) {
    const auto v = raw(section, key);
    if (!v) {
      if (!fallback) missing(section, key);
      return fallback.value_or(std::vector<T>{});
    }
    std::vector<T> out;
    if (v->empty()) return out;
    for (const auto& item : split_list(*v)) {
      if (auto d = parse_number<T>(item)) {
        out.push_back(*d);
      } else {
        mismatch(section, key, std::is_integral_v<T> ? "a list of integers" : "a list of numbers",
                 *v);
        return {};
      }
    }
    return out;
  }

  void error(std::string message) { errors_.push_back(std::move(message)); }

  // Everything present in the tree but never asked for.
  void reject_unknown() {
    for (const auto& [name, node] : tree_) {
      if (node.empty() && !node.data().empty()) {
        error(fmt::format("key '{}' is outside any section", name));
        continue;
      }
      if (!kSections.contains(name)) {
        error(fmt::format("unknown section [{}] (valid: {})", name, fmt::join(kSections, ", ")));
        continue;
      }
      if (name == "sweep" || name == "verify") continue;
      for (const auto& [key, value] : node) {
        if (!consumed_.contains(name + "." + key)) {
          error(fmt::format("unknown key '{}' in [{}]", key, name));
        }
      }
    }
  }

 private:
  void missing(const std::string& section, const std::string& key) {
    error(fmt::format("missing required key '{}' in [{}]", key, section));
  }
  void mismatch(const std::string& section, const std::string& key, const char* expected,
                const std::string& got) {
    error(fmt::format("[{}] {}: expected {}, got '{}'", section, key, expected, got));
  }

  const ptree& tree_;
  std::vector<std::string>& errors_;
  std::set<std::string> consumed_;
};

std::optional<Scenario> scenario_from(const std::string& name) {
  const auto& names = scenario_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<Scenario>(it - names.begin());
}

// Runs a module validator and records its message as a config error.
template <typename F>
void validated(Reader& r, const char* what, F&& check) {
  try {
    check();
  } catch (const Error& e) {
    r.error(fmt::format("{}: {}", what, e.what()));
  }
}

void require_size(Reader& r, const std::string& key, std::size_t got, std::size_t want) {
  if (got != want && got != 0) {
    r.error(fmt::format("{} has {} entries, expected {}", key, got, want));
  }
}

TwoTraderSettings read_two_trader(Reader& r) {
  TwoTraderSettings s;
  s.params.omega_p = r.real("params", "omega_p", 1.0);
  s.params.lambda = r.real("params", "lambda", 1.0);
  s.params.alpha = r.list<double>("params", "alpha", std::vector<double>{});
  s.params.beta = r.list<double>("params", "beta", std::vector<double>{});
  require_size(r, "[params] alpha", s.params.alpha.size(), 2);
  require_size(r, "[params] beta", s.params.beta.size(), 2);
  const double p12 = r.real("params", "p12", 1.0);
  s.params.p = Eigen::MatrixXd{{0.0, p12}, {p12, 0.0}};
  const int n1 = r.integer("state", "n1"), n2 = r.integer("state", "n2");
  const int k1 = r.integer("state", "k1"), k2 = r.integer("state", "k2");
  const int o = r.integer("state", "supply"), m = r.integer("state", "price");
  s.conserved_check = r.flag("checks", "conserved", false);
  validated(r, "[state]", [&] { s.state = two_trader_state(n1, n2, k1, k2, o, m); });
  validated(r, "[params]", [&] { s.params.validate(ModelKind::kTwoTrader, 2); });
  return s;
}

EffectiveSettings read_effective(Reader& r) {
  EffectiveSettings s;
  s.shares = r.list<int>("state", "shares");
  s.cash = r.list<int>("state", "cash");
  s.supply = r.integer("state", "supply");
  s.price = r.integer("state", "price");
  const std::size_t traders = s.shares.size();
  if (s.cash.size() != traders) {
    r.error(fmt::format("[state] shares and cash must have the same length ({} vs {})", traders,
                        s.cash.size()));
  }
  if (traders < 2 && !s.shares.empty()) r.error("[state] the effective model needs >= 2 traders");
  s.params.omega_p = r.real("params", "omega_p", 1.0);
  s.params.lambda = r.real("params", "lambda", 1.0);
  s.params.alpha = r.list<double>("params", "alpha", std::vector<double>{});
  s.params.beta = r.list<double>("params", "beta", std::vector<double>{});
  require_size(r, "[params] alpha", s.params.alpha.size(), traders);
  require_size(r, "[params] beta", s.params.beta.size(), traders);
  const double coupling = r.real("params", "coupling", 1.0);
  s.params.p = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(traders),
                                         static_cast<Eigen::Index>(traders), coupling);
  s.params.p.diagonal().setZero();
  s.frozen_price = r.integer("params", "frozen_price", s.price);
  s.gamma = r.optional_real("params", "gamma");
  s.conserved_check = r.flag("checks", "conserved", false);
  if (s.frozen_price < 0) r.error("[params] frozen_price must be >= 0");
  validated(r, "[state]", [&] {
    if (s.cash.size() == traders) closed_market_state(s.shares, s.cash, s.supply, s.price);
  });
  validated(r, "[params]", [&] { s.params.validate(ModelKind::kEffective, traders); });
  return s;
}

MeanFieldSettings read_meanfield(Reader& r) {
  MeanFieldSettings s;
  auto& p = s.params;
  p.phi = r.real("params", "phi");
  p.nu = r.real("params", "nu", 0.0);
  p.x0 = Complex(r.real("params", "x0_re", 0.0), r.real("params", "x0_im", 0.0));
  p.n0 = r.real("params", "n0");
  p.k0 = r.real("params", "k0");
  p.gamma_share = r.real("params", "gamma_share", 1.0);
  s.ode = r.flag("checks", "ode", false);
  validated(r, "[params]", [&] { p.validate(); });
  return s;
}

std::vector<Complex> complex_list(Reader& r, const std::string& prefix, std::size_t size) {
  const auto re = r.list<double>("params", prefix + "_re", std::vector<double>(size, 1.0));
  const auto im = r.list<double>("params", prefix + "_im", std::vector<double>(size, 0.0));
  if (re.size() != size || im.size() != size) {
    r.error(fmt::format("[params] {}_re and {}_im need {} entries", prefix, prefix, size));
    return std::vector<Complex>(size, Complex(1.0, 0.0));
  }
  std::vector<Complex> out;
  for (std::size_t i = 0; i < size; ++i) out.emplace_back(re[i], im[i]);
  return out;
}

StochasticSettings read_stochastic(Reader& r) {
  StochasticSettings s;
  auto& p = s.params;
  p.omega_a = r.real("params", "omega_a", 1.0);
  p.omega_c = r.real("params", "omega_c", 1.0);
  p.omega_p = r.real("params", "omega_p", 1.0);
  p.Omega_A = r.list<double>("params", "Omega_A");
  const std::size_t labels = p.Omega_A.size();
  p.Omega_C = r.list<double>("params", "Omega_C", p.Omega_A);
  p.Omega_O = r.list<double>("params", "Omega_O");
  require_size(r, "[params] Omega_C", p.Omega_C.size(), labels);
  require_size(r, "[params] Omega_O", p.Omega_O.size(), labels);
  p.f = complex_list(r, "f", labels);
  p.g = complex_list(r, "g", labels);
  s.delta.zero_tol = r.real("params", "zero_tol", 1e-12);
  s.delta.lorentzian_width = r.optional_real("params", "lorentzian_width");

  s.n = r.integer("state", "n");
  s.k = r.integer("state", "k");
  s.price = r.integer("state", "price");
  s.reservoir.shares = r.list<int>("state", "reservoir_shares");
  s.reservoir.cash = r.list<int>("state", "reservoir_cash");
  s.reservoir.supply = r.list<int>("state", "reservoir_supply");
  s.share_cutoff = r.integer("space", "share_cutoff", s.n + 1);
  s.cash_cutoff = r.integer("space", "cash_cutoff", s.k + s.price);
  s.price_cutoff = r.integer("space", "price_cutoff", s.price + 1);
  if (s.n < 0 || s.k < 0 || s.price < 0) r.error("[state] n, k and price must be >= 0");
  if (s.n > s.share_cutoff || s.k > s.cash_cutoff || s.price > s.price_cutoff) {
    r.error("[space] cutoffs must be at least the state occupations");
  }
  validated(r, "[state]", [&] { s.reservoir.validate(labels); });
  if (p.Omega_O.size() == labels && p.Omega_C.size() == labels) {
    validated(r, "[params]", [&] { p.validate(ModelKind::kOpenMarket, labels); });
  }
  return s;
}

FplSettings read_fpl(Reader& r) {
  FplSettings s;
  auto& p = s.params;
  const FplParams d;
  p.M = r.integer("params", "M", d.M);
  p.O = r.integer("params", "O", d.O);
  p.lam = r.real("params", "lam", d.lam);
  p.omega_a = r.real("params", "omega_a", d.omega_a);
  p.omega_c = r.real("params", "omega_c", d.omega_c);
  p.Omega_A = r.real("params", "Omega_A", d.Omega_A);
  p.Omega_C = r.real("params", "Omega_C", d.Omega_C);
  p.n = r.integer("params", "n", d.n);
  p.k = r.integer("params", "k", d.k);
  p.n_res = r.integer("params", "n_res", d.n_res);
  p.k_res = r.integer("params", "k_res", d.k_res);
  p.f = Complex(r.real("params", "f_re", 1.0), r.real("params", "f_im", 0.0));
  p.w1 = r.optional_real("params", "w1");
  p.w2 = r.optional_real("params", "w2");
  const std::string method = r.text("params", "method", "adaptive");
  if (method == "adaptive") {
    s.method = Quadrature::kAdaptive;
  } else if (method == "simpson") {
    s.method = Quadrature::kSimpson;
  } else {
    r.error(fmt::format("[params] method: expected adaptive or simpson, got '{}'", method));
  }
  validated(r, "[params]", [&] { p.validate(); });
  return s;
}

ScenarioConfig read_scenario(const ptree& tree, std::vector<std::string>& errors) {
  Reader r(tree, errors);
  ScenarioConfig c;
  const std::string name = r.text("run", "scenario");
  const auto scenario = scenario_from(name);
  if (!scenario && !name.empty()) {
    r.error(fmt::format("unknown scenario '{}' (valid: {})", name,
                        fmt::join(scenario_names(), ", ")));
  }
  c.scenario = scenario.value_or(Scenario::kFpl);
  if (scenario != Scenario::kStochasticVerdict) {
    c.grid.t_max = r.real("run", "t_max", 10.0);
    const int samples = r.integer("run", "samples", 201);
    if (!(c.grid.t_max > 0.0)) r.error("[run] t_max must be > 0");
    if (samples < 2) r.error("[run] samples must be >= 2");
    c.grid.samples = static_cast<std::size_t>(std::max(samples, 2));
  }
  if (auto out = r.raw("run", "out")) c.out = *out;
  c.plots = r.flag("run", "plots", false);

  if (scenario) {
    switch (*scenario) {
      case Scenario::kTwoTraderExact:
        c.settings = read_two_trader(r);
        break;
      case Scenario::kEffectiveL:
        c.settings = read_effective(r);
        break;
      case Scenario::kMeanField:
        c.settings = read_meanfield(r);
        break;
      case Scenario::kStochasticVerdict:
        c.settings = read_stochastic(r);
        break;
      case Scenario::kFpl:
        c.settings = read_fpl(r);
        break;
    }
  }
  r.reject_unknown();
  return c;
}

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out;
  for (const auto& e : errors) out += e + "\n";
  if (!out.empty()) out.pop_back();
  return out;
}

}  // namespace

std::string to_string(Scenario scenario) {
  return scenario_names().at(static_cast<std::size_t>(scenario));
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"two-trader-exact", "effective-L", "meanfield",
                                              "stochastic-verdict", "fpl"};
  return names;
}

std::vector<double> TimeGrid::times() const { return uniform_grid(t_max, samples); }

ConfigFile parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  // '#' comments are accepted alongside the parser's own ';'.
  std::string cleaned;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const std::string t = trim(line);
    cleaned += (!t.empty() && t.front() == '#') ? ";" : line;
    cleaned += '\n';
  }
  ptree tree;
  try {
    std::istringstream in(cleaned);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
  }

  std::vector<std::string> errors;
  std::vector<std::string> base_errors;
  ConfigFile out;
  out.base = read_scenario(tree, base_errors);

  if (const auto verify = tree.get_child_optional("verify")) {
    for (const auto& [file, node] : *verify) {
      out.fixtures.emplace_back(file, base_dir / trim(node.data()));
    }
  }

  if (const auto sweep = tree.get_child_optional("sweep")) {
    if (!out.fixtures.empty()) errors.emplace_back("[sweep] and [verify] cannot be combined");
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
    for (const auto& [key, node] : *sweep) {
      const auto dot = key.find('.');
      const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
      if (section.empty() || section == "sweep" || section == "verify" || key == "run.scenario" ||
          !kSections.contains(section)) {
        errors.push_back(fmt::format("[sweep] '{}' is not a sweepable section.key", key));
        continue;
      }
      auto values = split_list(trim(node.data()));
      if (values.empty() || std::any_of(values.begin(), values.end(),
                                        [](const std::string& v) { return v.empty(); })) {
        errors.push_back(fmt::format("[sweep] '{}' needs a comma separated list of values", key));
        continue;
      }
      axes.emplace_back(key, std::move(values));
    }
    if (errors.empty() && !axes.empty()) {
      std::size_t total = 1;
      for (const auto& a : axes) total *= a.second.size();
      for (std::size_t run = 0; run < total; ++run) {
        SweepRun sr;
        sr.name = fmt::format("run_{:03d}", run);
        ptree copy = tree;
        copy.erase("sweep");
        std::size_t rest = run;
        // last axis varies fastest
        std::vector<std::size_t> pick(axes.size());
        for (std::size_t i = axes.size(); i-- > 0;) {
          pick[i] = rest % axes[i].second.size();
          rest /= axes[i].second.size();
        }
        for (std::size_t i = 0; i < axes.size(); ++i) {
          const std::string& key = axes[i].first;
          const std::string& value = axes[i].second[pick[i]];
          copy.put(key, value);
          sr.assignments.emplace_back(key, value);
        }
        std::vector<std::string> run_errors;
        sr.config = read_scenario(copy, run_errors);
        for (const auto& e : run_errors) errors.push_back(fmt::format("{}: {}", sr.name, e));
        out.sweep.push_back(std::move(sr));
      }
    }
  }

  // with a sweep the runs are validated individually
  if (out.sweep.empty()) errors.insert(errors.begin(), base_errors.begin(), base_errors.end());
  if (!errors.empty()) throw ConfigError(join_errors(errors));
  return out;
}

ConfigFile parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.parent_path());
}

}  // namespace fockmarket::cli
