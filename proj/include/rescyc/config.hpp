#ifndef RESCYC_CONFIG_HPP
#define RESCYC_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "rescyc/errors.hpp"
#include "rescyc/ingest.hpp"
#include "rescyc/metrics.hpp"

namespace rescyc {

/// Everything a pipeline run needs. Defaults are usable without any config
/// file: 4-day smoothing, 3-day duration filter, RR 0.01%, ET 80%, 1000
/// bootstrap reps.
struct RunConfig {
  std::string input;
  std::string out_dir = ".";

  bool normalize = true; // preprocess.normalize
  bool smooth = true;    // preprocess.smooth
  int span_days = 4;     // preprocess.span_days

  int tau_days = 3; // cycles.tau_days

  double p_rr = 0.0001;                                         // metric.p_rr
  double p_et = 0.8;                                            // metric.p_et
  RestabDenominator restab_denominator = RestabDenominator::eq4; // metric.restab_denominator

  std::size_t reps = 1000;     // dynamics.reps
  std::uint64_t seed = 42;     // dynamics.seed
  std::size_t batch_size = 50; // dynamics.batch_size

  double rr_lo = 0.0001, rr_hi = 0.002, rr_step = 0.0001; // sweep.rr_*
  double et_lo = 0.0, et_hi = 1.0, et_step = 0.01;        // sweep.et_*
  bool et_micro = true;                                   // sweep.et_micro
  double et_micro_lo = 0.99, et_micro_hi = 1.0, et_micro_step = 0.001;

  std::string fetch_symbol;                // fetch.symbol
  std::string fetch_start = "2013-09-16";  // fetch.start
  std::string fetch_end = "2018-04-16";    // fetch.end
  std::string url_template{kDefaultUrlTemplate}; // fetch.url_template

  ToleranceConfig tolerance() const { return {p_rr, p_et, restab_denominator}; }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out;
  in >> out;
  if (in.fail() || !in.eof())
    throw ConfigError("bad value for " + key + ": \"" + value + "\"");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("bad boolean for " + key + ": \"" + value + "\"");
}

} // namespace detail

inline RestabDenominator parse_restab(const std::string& value) {
  if (value == "eq4") return RestabDenominator::eq4;
  if (value == "appendix") return RestabDenominator::appendix;
  throw ConfigError("metric.restab_denominator must be \"eq4\" or \"appendix\", got \"" +
                    value + "\"");
}

/// Apply one key = value pair; false when the key is unknown.
inline bool apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_bool;
  using detail::parse_number;
  if (key == "input") cfg.input = value;
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "preprocess.normalize") cfg.normalize = parse_bool(key, value);
  else if (key == "preprocess.smooth") cfg.smooth = parse_bool(key, value);
  else if (key == "preprocess.span_days") cfg.span_days = parse_number<int>(key, value);
  else if (key == "cycles.tau_days") cfg.tau_days = parse_number<int>(key, value);
  else if (key == "metric.p_rr") cfg.p_rr = parse_number<double>(key, value);
  else if (key == "metric.p_et") cfg.p_et = parse_number<double>(key, value);
  else if (key == "metric.restab_denominator") cfg.restab_denominator = parse_restab(value);
  else if (key == "dynamics.reps") cfg.reps = parse_number<std::size_t>(key, value);
  else if (key == "dynamics.seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "dynamics.batch_size") cfg.batch_size = parse_number<std::size_t>(key, value);
  else if (key == "sweep.rr_lo") cfg.rr_lo = parse_number<double>(key, value);
  else if (key == "sweep.rr_hi") cfg.rr_hi = parse_number<double>(key, value);
  else if (key == "sweep.rr_step") cfg.rr_step = parse_number<double>(key, value);
  else if (key == "sweep.et_lo") cfg.et_lo = parse_number<double>(key, value);
  else if (key == "sweep.et_hi") cfg.et_hi = parse_number<double>(key, value);
  else if (key == "sweep.et_step") cfg.et_step = parse_number<double>(key, value);
  else if (key == "sweep.et_micro") cfg.et_micro = parse_bool(key, value);
  else if (key == "sweep.et_micro_lo") cfg.et_micro_lo = parse_number<double>(key, value);
  else if (key == "sweep.et_micro_hi") cfg.et_micro_hi = parse_number<double>(key, value);
  else if (key == "sweep.et_micro_step") cfg.et_micro_step = parse_number<double>(key, value);
  else if (key == "fetch.symbol") cfg.fetch_symbol = value;
  else if (key == "fetch.start") cfg.fetch_start = value;
  else if (key == "fetch.end") cfg.fetch_end = value;
  else if (key == "fetch.url_template") cfg.url_template = value;
  else return false;
  return true;
}

/// Flat "key = value" file; '#' starts a comment, blank lines are ignored.
inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (!apply_config_key(cfg, key, value))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key \"" + key + "\"");
  }
}

} // namespace rescyc

#endif // RESCYC_CONFIG_HPP
