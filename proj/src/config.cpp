#include "kickjt/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "kickjt/error.hpp"

namespace kickjt {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  double parse() {
    const double v = expr();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("bad expression '" + s_ + "': " + why);
  }
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  double term() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    const double base = primary();
    if (eat('^')) return std::pow(base, unary());
    return base;
  }
  double primary() {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const auto r = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (r.ec != std::errc()) fail("bad number");
      pos_ = static_cast<std::size_t>(r.ptr - s_.data());
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "pi") return std::numbers::pi;
      static const std::map<std::string, std::function<double(double)>> fns = {
          {"sqrt", [](double x) { return std::sqrt(x); }}, {"sin", [](double x) { return std::sin(x); }},
          {"cos", [](double x) { return std::cos(x); }},   {"tan", [](double x) { return std::tan(x); }},
          {"atan", [](double x) { return std::atan(x); }}, {"acot", [](double x) { return acot(x); }},
          {"exp", [](double x) { return std::exp(x); }},   {"log", [](double x) { return std::log(x); }}};
      const auto it = fns.find(name);
      if (it == fns.end()) fail("unknown name '" + name + "'");
      if (!eat('(')) fail("expected '(' after " + name);
      const double arg = expr();
      if (!eat(')')) fail("missing ')'");
      return it->second(arg);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

// Grid values are rounded to 1e-12 so that lambda_min + k * step lands on
// the decimal the user meant.
double round_grid(double x) { return std::round(x * 1e12) / 1e12; }

struct Field {
  std::function<void(ScenarioConfig&, const std::string&, int)> set;
};

double number(const std::string& v, int line) {
  try {
    const double x = evaluate_expression(v);
    if (!std::isfinite(x)) throw ConfigError("value '" + v + "' is not finite", line);
    return x;
  } catch (const ConfigError& e) {
    if (e.line()) throw;
    throw ConfigError(std::string(e.what()), line);
  }
}

int integer(const std::string& v, int line) {
  const double x = number(v, line);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError("value '" + v + "' is not an integer", line);
  return static_cast<int>(x);
}

const std::map<std::string, Field>& fields() {
  using C = ScenarioConfig;
  using S = const std::string&;
  static const std::map<std::string, Field> f = {
      {"model.omega", {[](C& c, S v, int l) { c.model.omega = number(v, l); }}},
      {"model.delta", {[](C& c, S v, int l) { c.model.delta = number(v, l); }}},
      {"model.lambda", {[](C& c, S v, int l) { c.model.lambda = number(v, l); }}},
      {"numerics.truncation", {[](C& c, S v, int l) { c.numerics.truncation = integer(v, l); }}},
      {"numerics.newton_tol", {[](C& c, S v, int l) { c.numerics.newton_tol = number(v, l); }}},
      {"numerics.newton_max_iter", {[](C& c, S v, int l) { c.numerics.newton_max_iter = integer(v, l); }}},
      {"numerics.overlap_threshold", {[](C& c, S v, int l) { c.numerics.overlap_threshold = number(v, l); }}},
      {"numerics.eig_residual_tol", {[](C& c, S v, int l) { c.numerics.eig_residual_tol = number(v, l); }}},
      {"numerics.fd_step", {[](C& c, S v, int l) { c.numerics.fd_step = number(v, l); }}},
      {"scan.lambdas",
       {[](C& c, S v, int l) {
         c.lambdas.clear();
         for (const auto& item : split_list(v)) {
           if (item.empty()) throw ConfigError("empty entry in scan.lambdas", l);
           c.lambdas.push_back(number(item, l));
         }
       }}},
      {"scan.lambda_min", {[](C&, S v, int l) { number(v, l); }}},
      {"scan.lambda_max", {[](C&, S v, int l) { number(v, l); }}},
      {"scan.lambda_step", {[](C&, S v, int l) { number(v, l); }}},
      {"portrait.extent", {[](C& c, S v, int l) { c.portrait.extent = number(v, l); }}},
      {"portrait.points_per_axis", {[](C& c, S v, int l) { c.portrait.points_per_axis = integer(v, l); }}},
      {"portrait.iterations", {[](C& c, S v, int l) { c.portrait.iterations = integer(v, l); }}},
      {"portrait.p_slope", {[](C& c, S v, int l) { c.portrait.p_slope = number(v, l); }}},
      {"portrait.spin_theta", {[](C& c, S v, int l) { c.portrait.spin_theta = number(v, l); }}},
      {"portrait.spin_phi", {[](C& c, S v, int l) { c.portrait.spin_phi = number(v, l); }}},
      {"tracking.initial_step", {[](C& c, S v, int l) { c.tracking.initial_step = number(v, l); }}},
      {"tracking.max_step", {[](C& c, S v, int l) { c.tracking.max_step = number(v, l); }}},
      {"tracking.min_step", {[](C& c, S v, int l) { c.tracking.min_step = number(v, l); }}},
      {"husimi.section_min", {[](C& c, S v, int l) { c.husimi.section_min = number(v, l); }}},
      {"husimi.section_max", {[](C& c, S v, int l) { c.husimi.section_max = number(v, l); }}},
      {"husimi.section_points", {[](C& c, S v, int l) { c.husimi.section_points = integer(v, l); }}},
      {"husimi.plane_lambda", {[](C& c, S v, int l) { c.husimi.plane_lambda = number(v, l); }}},
      {"husimi.plane_min", {[](C& c, S v, int l) { c.husimi.plane_min = number(v, l); }}},
      {"husimi.plane_max", {[](C& c, S v, int l) { c.husimi.plane_max = number(v, l); }}},
      {"husimi.plane_points", {[](C& c, S v, int l) { c.husimi.plane_points = integer(v, l); }}},
  };
  return f;
}

}  // namespace

double evaluate_expression(const std::string& text) { return Parser(text).parse(); }

ValidatedConfig ScenarioConfig::validated() const {
  try {
    return validate_params(model, numerics);
  } catch (const OutOfRangeError& e) {
    int line = 0;
    for (const auto& f : e.fields()) {
      for (const char* sec : {"model.", "numerics."}) {
        const auto it = key_lines.find(sec + f);
        if (it != key_lines.end() && (line == 0 || it->second < line)) line = it->second;
      }
    }
    throw ConfigError(e.what(), line);
  }
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  std::map<std::string, std::string> raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = fields().find(key);
    if (it == fields().end()) throw ConfigError("unknown key '" + key + "'", lineno);
    if (cfg.key_lines.count(key)) throw ConfigError("duplicate key '" + key + "'", lineno);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", lineno);
    it->second.set(cfg, value, lineno);
    cfg.key_lines[key] = lineno;
    raw[key] = value;
  }

  auto line_of = [&](const std::string& key) {
    const auto it = cfg.key_lines.find(key);
    return it == cfg.key_lines.end() ? 0 : it->second;
  };

  const bool has_list = raw.count("scan.lambdas") > 0;
  const int range_keys = static_cast<int>(raw.count("scan.lambda_min") + raw.count("scan.lambda_max") +
                                          raw.count("scan.lambda_step"));
  if (has_list && range_keys > 0)
    throw ConfigError("give either scan.lambdas or scan.lambda_min/max/step, not both", line_of("scan.lambdas"));
  if (range_keys > 0) {
    if (range_keys != 3) throw ConfigError("scan.lambda_min, scan.lambda_max and scan.lambda_step go together",
                                           std::max({line_of("scan.lambda_min"), line_of("scan.lambda_max"),
                                                     line_of("scan.lambda_step")}));
    const double lo = number(raw["scan.lambda_min"], line_of("scan.lambda_min"));
    const double hi = number(raw["scan.lambda_max"], line_of("scan.lambda_max"));
    const double step = number(raw["scan.lambda_step"], line_of("scan.lambda_step"));
    if (!(step > 0.0)) throw ConfigError("scan.lambda_step must be > 0", line_of("scan.lambda_step"));
    if (hi < lo) throw ConfigError("scan.lambda_max is below scan.lambda_min", line_of("scan.lambda_max"));
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    if (n > 1000000) throw ConfigError("lambda grid too large", line_of("scan.lambda_step"));
    for (long long k = 0; k <= n; ++k) cfg.lambdas.push_back(round_grid(lo + static_cast<double>(k) * step));
  }
  const int grid_line = has_list ? line_of("scan.lambdas") : line_of("scan.lambda_min");
  if (cfg.lambdas.empty()) throw ConfigError("empty lambda grid", grid_line);
  for (std::size_t i = 0; i < cfg.lambdas.size(); ++i) {
    if (!(cfg.lambdas[i] >= 0.0)) throw ConfigError("lambda values must be >= 0", grid_line);
    if (i && !(cfg.lambdas[i] > cfg.lambdas[i - 1]))
      throw ConfigError("lambda grid must be strictly increasing", grid_line);
  }

  if (cfg.portrait.points_per_axis < 1)
    throw ConfigError("portrait.points_per_axis must be >= 1", line_of("portrait.points_per_axis"));
  if (cfg.portrait.iterations < 0)
    throw ConfigError("portrait.iterations must be >= 0", line_of("portrait.iterations"));
  if (!(cfg.portrait.extent > 0.0)) throw ConfigError("portrait.extent must be > 0", line_of("portrait.extent"));
  if (cfg.portrait.spin_theta < 0.0 || cfg.portrait.spin_theta > std::numbers::pi)
    throw ConfigError("portrait.spin_theta must lie in [0, pi]", line_of("portrait.spin_theta"));
  const auto& t = cfg.tracking;
  if (!(t.min_step > 0.0 && t.min_step <= t.initial_step && t.initial_step <= t.max_step))
    throw ConfigError("tracking steps need 0 < min_step <= initial_step <= max_step",
                      std::max({line_of("tracking.min_step"), line_of("tracking.initial_step"),
                                line_of("tracking.max_step")}));
  const auto& h = cfg.husimi;
  if (h.section_points < 2 || !(h.section_max > h.section_min))
    throw ConfigError("husimi section needs section_max > section_min and >= 2 points",
                      std::max({line_of("husimi.section_points"), line_of("husimi.section_min"),
                                line_of("husimi.section_max")}));
  if (h.plane_points < 2 || !(h.plane_max > h.plane_min))
    throw ConfigError("husimi plane needs plane_max > plane_min and >= 2 points",
                      std::max({line_of("husimi.plane_points"), line_of("husimi.plane_min"),
                                line_of("husimi.plane_max")}));
  if (!(h.plane_lambda >= 0.0)) throw ConfigError("husimi.plane_lambda must be >= 0", line_of("husimi.plane_lambda"));

  cfg.validated();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace kickjt
