#include "adaiht/scenario.hpp"

#include "adaiht/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

namespace adaiht {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& v) {
  const auto t = trim(v);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return t.substr(1, t.size() - 2);
  return t;
}

std::vector<std::string> split_list(const std::string& v) {
  auto t = trim(v);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw ParseError("unterminated array '" + t + "'");
    t = t.substr(1, t.size() - 2);
  }
  std::vector<std::string> items;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  const auto t = unquote(v);
  std::size_t used = 0;
  T out{};
  try {
    if constexpr (std::is_same_v<T, double>) {
      out = std::stod(t, &used);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!t.empty() && t.front() == '-') throw std::invalid_argument("negative");
      out = std::stoull(t, &used, 0);
    } else {
      out = std::stol(t, &used);
    }
  } catch (const std::exception&) {
    throw ParseError("bad value for '" + key + "': '" + t + "'");
  }
  if (used != t.size()) throw ParseError("bad value for '" + key + "': '" + t + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const auto t = unquote(v);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ParseError("bad boolean for '" + key + "': '" + t + "'");
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

template <typename T>
Setter number(T ScenarioConfig::*field) {
  return [field](ScenarioConfig& c, const std::string& k, const std::string& v) {
    c.*field = parse_number<T>(k, v);
  };
}

Setter flag(bool ScenarioConfig::*field) {
  return [field](ScenarioConfig& c, const std::string& k, const std::string& v) { c.*field = parse_bool(k, v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"id", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.id = unquote(v); }},
      {"name", [](ScenarioConfig& c, const std::string&, const std::string& v) { c.id = unquote(v); }},
      {"n", number(&ScenarioConfig::n)},
      {"p", number(&ScenarioConfig::p)},
      {"s", number(&ScenarioConfig::s)},
      {"sigma", number(&ScenarioConfig::sigma)},
      {"a_over_astar",
       [](ScenarioConfig& c, const std::string& k, const std::string& v) {
         c.a_over_astar.clear();
         for (const auto& item : split_list(v)) c.a_over_astar.push_back(parse_number<double>(k, item));
       }},
      {"kappa", number(&ScenarioConfig::kappa)},
      {"epsilon", number(&ScenarioConfig::epsilon)},
      {"design_kind",
       [](ScenarioConfig& c, const std::string&, const std::string& v) {
         c.design_kind = parse_design_kind(unquote(v));
       }},
      {"normalize", flag(&ScenarioConfig::normalize)},
      {"design_perturbation", number(&ScenarioConfig::design_perturbation)},
      {"design_path",
       [](ScenarioConfig& c, const std::string&, const std::string& v) { c.design_path = unquote(v); }},
      {"fixed_design", flag(&ScenarioConfig::fixed_design)},
      {"noise_kind",
       [](ScenarioConfig& c, const std::string&, const std::string& v) {
         c.noise_kind = parse_noise_kind(unquote(v));
       }},
      {"magnitude_kind",
       [](ScenarioConfig& c, const std::string&, const std::string& v) {
         c.magnitude_kind = parse_magnitude_kind(unquote(v));
       }},
      {"replications", number(&ScenarioConfig::replications)},
      {"master_seed", number(&ScenarioConfig::master_seed)},
      {"estimators",
       [](ScenarioConfig& c, const std::string&, const std::string& v) { c.estimators = split_list(v); }},
      {"penalty_const", number(&ScenarioConfig::penalty_const)},
      {"sharp_adaptive_sigma", flag(&ScenarioConfig::sharp_adaptive_sigma)},
      {"sharp_steps", number(&ScenarioConfig::sharp_steps)},
      {"max_iter", number(&ScenarioConfig::max_iter)},
      {"iht_iters", number(&ScenarioConfig::iht_iters)},
      {"ista_iters", number(&ScenarioConfig::ista_iters)},
      {"ista_tol", number(&ScenarioConfig::ista_tol)},
      {"lasso_lambda", number(&ScenarioConfig::lasso_lambda)},
      {"record_timing", flag(&ScenarioConfig::record_timing)},
  };
  return table;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ScenarioConfig::validate() const {
  auto fail = [this](const std::string& msg) { throw ParseError("scenario '" + id + "': " + msg); };
  if (id.empty()) fail("empty id");
  if (id.find_first_of(",\n\"") != std::string::npos) fail("id may not contain commas or quotes");
  if (n < 1 || p < 1) fail("n and p must be >= 1");
  if (s < 1) fail("s must be >= 1");
  if (3 * s > p) fail("s must satisfy s <= p/3");
  if (!(sigma >= 0)) fail("sigma must be >= 0");
  if (a_over_astar.empty()) fail("a_over_astar grid is empty");
  for (double a : a_over_astar)
    if (!(a >= 0)) fail("a_over_astar values must be >= 0");
  if (!(kappa > 0 && kappa < 1)) fail("kappa must lie in (0,1)");
  if (!(epsilon > 0 && epsilon < 1)) fail("epsilon must lie in (0,1)");
  if (replications < 1) fail("replications must be >= 1");
  if (estimators.empty()) fail("no estimators requested");
  for (const auto& e : estimators) {
    const auto& known = known_estimators();
    if (std::find(known.begin(), known.end(), e) == known.end()) fail("unknown estimator '" + e + "'");
  }
  if (!(penalty_const > 0)) fail("penalty_const must be > 0");
  if (sigma == 0 && std::find(estimators.begin(), estimators.end(), "nonadaptive") != estimators.end()) {
    fail("the nonadaptive estimator needs sigma > 0");
  }
  if (max_iter < 1 || iht_iters < 0 || ista_iters < 0) fail("iteration caps must be positive");
  if (design_kind == DesignKind::identity_scaled && n != p) fail("identity_scaled design needs n == p");
  if (design_kind == DesignKind::near_orthogonal && n < p) fail("near_orthogonal design needs n >= p");
  if (design_kind == DesignKind::from_file && design_path.empty()) fail("from_file design needs design_path");
}

void apply_setting(ScenarioConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ParseError("unknown key '" + key + "'");
  it->second(config, key, value);
}

std::vector<ScenarioConfig> parse_scenarios(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> defaults;
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(strip_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError("line " + std::to_string(lineno) + ": bad section header");
      sections.push_back({unquote(t.substr(1, t.size() - 2)), {}});
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    auto kv = std::make_pair(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    if (sections.empty()) {
      defaults.push_back(std::move(kv));
    } else {
      sections.back().second.push_back(std::move(kv));
    }
  }
  std::vector<ScenarioConfig> out;
  auto build = [&](const std::string* section, const std::vector<std::pair<std::string, std::string>>* own) {
    ScenarioConfig c;
    for (const auto& [k, v] : defaults) apply_setting(c, k, v);
    if (section) c.id = *section;
    if (own)
      for (const auto& [k, v] : *own) apply_setting(c, k, v);
    return c;
  };
  if (sections.empty()) {
    out.push_back(build(nullptr, nullptr));
  } else {
    for (const auto& [name, kvs] : sections) out.push_back(build(&name, &kvs));
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (out[i].id == out[j].id) throw ParseError("duplicate scenario id '" + out[i].id + "'");
  return out;
}

std::vector<ScenarioConfig> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  return parse_scenarios(in);
}

void write_scenario(std::ostream& out, const ScenarioConfig& c) {
  out << "[" << c.id << "]\n";
  out << "n = " << c.n << "\np = " << c.p << "\ns = " << c.s << "\nsigma = " << fmt(c.sigma) << '\n';
  out << "a_over_astar = [";
  for (std::size_t i = 0; i < c.a_over_astar.size(); ++i) out << (i ? ", " : "") << fmt(c.a_over_astar[i]);
  out << "]\nkappa = " << fmt(c.kappa) << "\nepsilon = " << fmt(c.epsilon) << '\n';
  out << "design_kind = \"" << to_string(c.design_kind) << "\"\n";
  out << "normalize = " << (c.normalize ? "true" : "false") << '\n';
  out << "design_perturbation = " << fmt(c.design_perturbation) << '\n';
  if (!c.design_path.empty()) out << "design_path = \"" << c.design_path << "\"\n";
  out << "fixed_design = " << (c.fixed_design ? "true" : "false") << '\n';
  out << "noise_kind = \"" << to_string(c.noise_kind) << "\"\n";
  out << "magnitude_kind = \"" << to_string(c.magnitude_kind) << "\"\n";
  out << "replications = " << c.replications << "\nmaster_seed = " << c.master_seed << '\n';
  out << "estimators = [";
  for (std::size_t i = 0; i < c.estimators.size(); ++i) out << (i ? ", " : "") << '"' << c.estimators[i] << '"';
  out << "]\npenalty_const = " << fmt(c.penalty_const) << '\n';
  out << "sharp_adaptive_sigma = " << (c.sharp_adaptive_sigma ? "true" : "false") << '\n';
  out << "sharp_steps = " << c.sharp_steps << "\nmax_iter = " << c.max_iter << '\n';
  out << "iht_iters = " << c.iht_iters << "\nista_iters = " << c.ista_iters << "\nista_tol = " << fmt(c.ista_tol)
      << "\nlasso_lambda = " << fmt(c.lasso_lambda) << '\n';
  out << "record_timing = " << (c.record_timing ? "true" : "false") << '\n';
}

std::pair<std::string, std::string> split_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ParseError("override '" + text + "' is not key=value");
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

}  // namespace adaiht
