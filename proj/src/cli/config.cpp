#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qent/cli.hpp"
#include "qent/numeric.hpp"

namespace qent::cli {

namespace {

constexpr std::string_view kKeys[] = {"mode",   "m",      "omega0", "gamma",  "xbar",
                                      "hbar",   "L",      "n",      "t-start", "t-stop",
                                      "t-step", "sweep",  "sweep-range", "out", "delta"};

std::string canonical_key(std::string_view key) {
  std::string k(key);
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

bool known_key(const std::string& key) {
  return std::find(std::begin(kKeys), std::end(kKeys), key) != std::end(kKeys);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& origin, const std::string& key,
                            const std::string& value, const char* expected) {
  throw Error(ErrorKind::ConfigParseError,
              origin + ": cannot parse '" + value + "' as " + expected + " for '" + key + "'");
}

double to_double(const std::string& value, const std::string& key, const std::string& origin) {
  double v = 0.0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) bad_value(origin, key, value, "a number");
  return v;
}

std::size_t to_count(const std::string& value, const std::string& key, const std::string& origin) {
  std::size_t v = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) bad_value(origin, key, value, "a non-negative integer");
  return v;
}

Range to_range(const std::string& value, const std::string& key, const std::string& origin) {
  const auto c1 = value.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : value.find(':', c1 + 1);
  if (c2 == std::string::npos || value.find(':', c2 + 1) != std::string::npos)
    bad_value(origin, key, value, "A:B:STEP");
  return {to_double(value.substr(0, c1), key, origin),
          to_double(value.substr(c1 + 1, c2 - c1 - 1), key, origin),
          to_double(value.substr(c2 + 1), key, origin)};
}

Mode to_mode(const std::string& value, const std::string& origin) {
  if (value == "sho") return Mode::sho;
  if (value == "dho") return Mode::dho;
  if (value == "validate") return Mode::validate;
  if (value == "sweep") return Mode::sweep;
  bad_value(origin, "mode", value, "one of sho|dho|validate|sweep");
}

[[noreturn]] void violation(const std::string& what) {
  throw Error(ErrorKind::ConstraintViolation, what);
}

}  // namespace

std::vector<double> Range::values() const {
  std::vector<double> out;
  if (!(step > 0.0) || stop < start) return out;
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

std::map<std::string, std::string> parse_config_text(std::string_view text,
                                                     std::string_view source_name) {
  std::map<std::string, std::string> settings;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::ConfigParseError, where + ": expected 'key = value'");
    const std::string key = canonical_key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!known_key(key)) throw Error(ErrorKind::ConfigParseError, where + ": unknown key '" + key + "'");
    if (value.empty()) throw Error(ErrorKind::ConfigParseError, where + ": empty value for '" + key + "'");
    settings[key] = value;
    if (end == text.size()) break;
  }
  return settings;
}

void apply_settings(RunConfig& cfg, const std::map<std::string, std::string>& settings,
                    const std::map<std::string, std::string>& origins) {
  for (const auto& [key, value] : settings) {
    const auto it = origins.find(key);
    const std::string origin = it != origins.end() ? it->second : "--" + key;
    if (key == "mode") cfg.mode = to_mode(value, origin);
    else if (key == "m") cfg.params.m = to_double(value, key, origin);
    else if (key == "omega0") cfg.params.omega0 = to_double(value, key, origin);
    else if (key == "gamma") cfg.params.gamma = to_double(value, key, origin);
    else if (key == "xbar") cfg.params.xbar = to_double(value, key, origin);
    else if (key == "hbar") cfg.params.hbar = to_double(value, key, origin);
    else if (key == "L") cfg.half_width = to_double(value, key, origin);
    else if (key == "n") cfg.n_points = to_count(value, key, origin);
    else if (key == "t-start") cfg.times.start = to_double(value, key, origin);
    else if (key == "t-stop") cfg.times.stop = to_double(value, key, origin);
    else if (key == "t-step") cfg.times.step = to_double(value, key, origin);
    else if (key == "delta") cfg.caustic_delta = to_double(value, key, origin);
    else if (key == "out") cfg.out_path = value;
    else if (key == "sweep-range") cfg.sweep_range = to_range(value, key, origin);
    else if (key == "sweep") {
      if (value == "omega") cfg.sweep_variable = SweepVariable::omega;
      else if (value == "gamma") cfg.sweep_variable = SweepVariable::gamma;
      else bad_value(origin, key, value, "omega|gamma");
    } else {
      throw Error(ErrorKind::ConfigParseError, origin + ": unknown key '" + key + "'");
    }
  }
}

CheckedParams checked_params(const RunConfig& cfg, Regime regime) {
  return validate_params(cfg.params, regime, cfg.caustic_delta);
}

Grid config_grid(const RunConfig& cfg) {
  return numeric::build_grid(cfg.half_width, cfg.n_points, cfg.params.hbar);
}

void check_config(const RunConfig& cfg) {
  const Range& t = cfg.times;
  if (!(t.step > 0.0)) violation("t-step must be > 0");
  if (!(t.start >= 0.0)) violation("t-start must be >= 0");
  if (!(t.stop > t.start)) violation("t-stop must be > t-start");
  if (!(cfg.caustic_delta > 0.0) || cfg.caustic_delta >= 1.0) violation("delta must lie in (0, 1)");

  try {
    (void)config_grid(cfg);
    const bool damped = cfg.mode == Mode::dho || cfg.params.gamma > 0.0;
    (void)checked_params(cfg, damped ? Regime::dho : Regime::sho);
  } catch (const Error& e) {
    violation(e.what());
  }
  if (cfg.mode == Mode::sho && cfg.params.gamma > 0.0)
    violation("sho mode has no damping; set gamma = 0 or use dho");

  if (cfg.mode == Mode::sweep) {
    if (!cfg.sweep_variable) violation("sweep mode needs --sweep omega|gamma");
    if (!cfg.sweep_range) violation("sweep mode needs --sweep-range A:B:STEP");
    const Range& r = *cfg.sweep_range;
    if (!(r.step > 0.0)) violation("sweep-range step must be > 0");
    if (r.stop < r.start) violation("sweep-range needs A <= B");
    for (double v : r.values()) {
      OscillatorParams p = cfg.params;
      if (*cfg.sweep_variable == SweepVariable::omega) p.omega0 = v;
      else p.gamma = v;
      try {
        (void)validate_params(p, p.gamma > 0.0 ? Regime::dho : Regime::sho, cfg.caustic_delta);
      } catch (const Error& e) {
        violation("sweep value " + format_number(v) + ": " + e.what());
      }
    }
  }
}

RunConfig parse_config(std::span<const std::string> args) {
  CLI::App app{"qent: joint entropy of simple and damped harmonic oscillators", "qent"};
  std::string mode;
  std::string config_path;
  app.add_option("mode", mode, "sho | dho | validate | sweep")->required();
  app.add_option("--config", config_path, "key = value configuration file");

  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<std::string, CLI::Option*>> flags;
  for (std::string_view key : kKeys) {
    if (key == "mode") continue;
    const std::string name(key);
    flags.emplace_back(name, app.add_option("--" + name, flag_values[name]));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorKind::ConfigParseError, std::string(e.get_name()) + ": " + e.what());
  }

  RunConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw Error(ErrorKind::ConfigParseError, config_path + ": cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto settings = parse_config_text(buffer.str(), config_path);
    std::map<std::string, std::string> origins;
    for (const auto& [key, value] : settings) origins[key] = config_path + " (" + key + ")";
    apply_settings(cfg, settings, origins);
  }

  std::map<std::string, std::string> overrides{{"mode", mode}};
  std::map<std::string, std::string> origins{{"mode", "mode argument"}};
  for (const auto& [name, option] : flags) {
    if (option->count() == 0) continue;
    overrides[name] = flag_values[name];
    origins[name] = "--" + name;
  }
  apply_settings(cfg, overrides, origins);
  check_config(cfg);
  return cfg;
}

}  // namespace qent::cli
