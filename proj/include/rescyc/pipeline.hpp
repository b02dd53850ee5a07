#ifndef RESCYC_PIPELINE_HPP
#define RESCYC_PIPELINE_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rescyc/config.hpp"
#include "rescyc/cycles.hpp"
#include "rescyc/dynamics.hpp"
#include "rescyc/errors.hpp"
#include "rescyc/ingest.hpp"
#include "rescyc/metrics.hpp"
#include "rescyc/preprocess.hpp"
#include "rescyc/sensitivity.hpp"

namespace rescyc {

/// Fixed 6-significant-digit float formatting for all CSV output, so reruns
/// are diffable byte for byte.
inline std::string format_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace detail {

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

inline std::string input_symbol(const RunConfig& cfg) {
  if (!cfg.fetch_symbol.empty()) return cfg.fetch_symbol;
  const std::string stem = std::filesystem::path(cfg.input).stem().string();
  return stem.empty() ? "series" : stem;
}

// Minimal CSV table reader for our own outputs.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw FormatError("missing column \"" + name + "\"");
  }
};

inline CsvTable read_csv_table(const std::string& path) {
  const std::string raw = read_text_file(path);
  CsvTable table;
  std::size_t pos = 0;
  bool first = true;
  while (pos < raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    if (nl == std::string::npos) nl = raw.size();
    std::string_view line = strip_cr(std::string_view(raw).substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) throw FormatError(path + " is empty");
  return table;
}

inline double to_double(const std::string& text) {
  double v = 0.0;
  if (!parse_double(text, v)) throw FormatError("bad number \"" + text + "\"");
  return v;
}

} // namespace detail

struct AnalysisOutput {
  PriceSeries prices;
  PerformanceSeries performance;
  std::vector<Run> runs;
  std::vector<ResilienceCycle> cycles;
  ScoredBatch batch;
};

/// Ingest -> normalize -> optional smoothing -> segmentation -> duration
/// filter -> cycle extraction -> scoring, per the run configuration.
inline AnalysisOutput run_analysis(const RunConfig& cfg) {
  AnalysisOutput out;
  const std::size_t min_rows = 2 * static_cast<std::size_t>(std::max(1, cfg.tau_days));
  out.prices = parse_csv(detail::read_text_file(cfg.input), detail::input_symbol(cfg), min_rows);

  if (cfg.normalize) {
    out.performance = normalize(out.prices);
  } else {
    out.performance.symbol = out.prices.symbol;
    out.performance.smoothed = false;
    out.performance.lop.reserve(out.prices.size());
    for (const auto& obs : out.prices.observations) out.performance.lop.push_back(obs.close);
  }
  if (cfg.smooth) out.performance = rlowess(out.performance, cfg.span_days);

  out.runs = tau_filter(segment_runs(out.performance), out.performance, cfg.tau_days);
  out.cycles = extract_cycles(out.runs, out.performance);
  out.batch = score_all(out.cycles, out.performance, cfg.tolerance());
  return out;
}

inline std::string cycles_to_csv(const std::vector<ResilienceCycle>& cycles) {
  std::string out = "cycle,t_pre,t_event,t_post,p_pre,p_event,p_post\n";
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const auto& c = cycles[i];
    out += std::to_string(i) + ',' + std::to_string(c.t_pre) + ',' +
           std::to_string(c.t_event) + ',' + std::to_string(c.t_post) + ',' +
           format_g6(c.p_pre) + ',' + format_g6(c.p_event) + ',' + format_g6(c.p_post) + '\n';
  }
  return out;
}

inline std::string metrics_to_csv(const ScoredBatch& batch) {
  std::string out =
      "cycle,t_pre,t_event,t_post,rr_width,et,r_m,r_e,s_f,s_r,r_d,r_s,ri,r1,r2,r3,recovery_type\n";
  std::size_t skipped_pos = 0;
  std::size_t cycle_idx = 0;
  for (const auto& s : batch.scores) {
    while (skipped_pos < batch.skipped.size() && batch.skipped[skipped_pos] == cycle_idx) {
      ++skipped_pos;
      ++cycle_idx;
    }
    const auto& c = s.cycle;
    out += std::to_string(cycle_idx) + ',' + std::to_string(c.t_pre) + ',' +
           std::to_string(c.t_event) + ',' + std::to_string(c.t_post) + ',' +
           format_g6(s.rr_width) + ',' + format_g6(s.et) + ',' + format_g6(s.r_m) + ',' +
           format_g6(s.r_e) + ',' + format_g6(s.s_f) + ',' + format_g6(s.s_r) + ',' +
           format_g6(s.r_d) + ',' + format_g6(s.r_s) + ',' + format_g6(s.ri) + ',' +
           format_g6(s.r1) + ',' + format_g6(s.r2) + ',' + format_g6(s.r3) + ',' +
           to_string(s.recovery_type) + '\n';
    ++cycle_idx;
  }
  return out;
}

namespace detail {

inline int guard(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 3;
  }
}

inline void print_ri_summary(std::ostream& out, const ScoredBatch& batch) {
  std::vector<double> ri;
  ri.reserve(batch.scores.size());
  for (const auto& s : batch.scores) ri.push_back(s.ri);
  out << "cycles scored: " << ri.size();
  if (!batch.skipped.empty()) out << " (skipped " << batch.skipped.size() << " degenerate)";
  out << '\n';
  if (ri.empty()) {
    out << "warning: no resilience cycles found (no downturn in the series)\n";
    return;
  }
  std::vector<double> sorted(ri);
  std::sort(sorted.begin(), sorted.end());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                      static_cast<double>(sorted.size());
  const double median = sorted.size() % 2 == 1
                            ? sorted[sorted.size() / 2]
                            : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  out << "RI min " << format_g6(sorted.front()) << ", median " << format_g6(median)
      << ", mean " << format_g6(mean) << ", max " << format_g6(sorted.back()) << '\n';
}

} // namespace detail

/// analyze: full pipeline, emitting cycles.csv and metrics.csv.
inline int cmd_analyze(const RunConfig& cfg, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  return detail::guard(err, [&] {
    if (cfg.input.empty()) throw ConfigError("analyze requires an input CSV (--input)");
    const AnalysisOutput result = run_analysis(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    detail::write_text_file(cfg.out_dir + "/cycles.csv", cycles_to_csv(result.cycles));
    detail::write_text_file(cfg.out_dir + "/metrics.csv", metrics_to_csv(result.batch));
    if (result.prices.dropped_rows > 0)
      out << "dropped " << result.prices.dropped_rows << " rows with missing close\n";
    detail::print_ri_summary(out, result.batch);
  });
}

/// fit: read metrics.csv, characterize the positive RI distribution.
inline int cmd_fit(const RunConfig& cfg, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  return detail::guard(err, [&] {
    const auto table = detail::read_csv_table(cfg.out_dir + "/metrics.csv");
    const std::size_t ri_col = table.column("ri");
    std::vector<double> ri;
    for (const auto& row : table.rows) {
      const double v = detail::to_double(row.at(ri_col));
      if (v > 0.0) ri.push_back(v); // zero-score cycles carry no tail information
    }
    if (ri.size() < 10)
      throw InsufficientTailError("only " + std::to_string(ri.size()) +
                                  " positive scores in metrics.csv, need at least 10");

    std::string rank_csv = "rank,value\n";
    for (const auto& [rank, value] : rank_size(ri))
      rank_csv += std::to_string(rank) + ',' + format_g6(value) + '\n';
    std::string exc_csv = "value,prob\n";
    for (const auto& [value, prob] : exceedance(ri))
      exc_csv += format_g6(value) + ',' + format_g6(prob) + '\n';

    TailFit fit = fit_power_law(ri);
    fit = bootstrap_ks(ri, fit, cfg.reps, cfg.seed, cfg.batch_size);

    nlohmann::ordered_json doc;
    doc["alpha"] = fit.alpha;
    doc["x_min"] = fit.x_min;
    doc["n_tail"] = fit.n_tail;
    doc["ks_stat"] = fit.ks_stat;
    doc["p_mean"] = fit.p_mean;
    doc["p_values"] = fit.p_values;
    doc["reps"] = cfg.reps;
    doc["seed"] = cfg.seed;
    doc["batch_size"] = cfg.batch_size;

    std::filesystem::create_directories(cfg.out_dir);
    detail::write_text_file(cfg.out_dir + "/rank_size.csv", rank_csv);
    detail::write_text_file(cfg.out_dir + "/exceedance.csv", exc_csv);
    detail::write_text_file(cfg.out_dir + "/fit.json", doc.dump(2) + "\n");

    out << "tail fit: alpha " << format_g6(fit.alpha) << ", x_min " << format_g6(fit.x_min)
        << ", n_tail " << fit.n_tail << ", ks " << format_g6(fit.ks_stat) << ", p_mean "
        << format_g6(fit.p_mean) << '\n';
  });
}

namespace detail {

inline std::vector<ResilienceCycle> read_cycles_csv(const std::string& path) {
  const auto table = read_csv_table(path);
  const std::size_t t_pre = table.column("t_pre");
  const std::size_t t_event = table.column("t_event");
  const std::size_t t_post = table.column("t_post");
  const std::size_t p_pre = table.column("p_pre");
  const std::size_t p_event = table.column("p_event");
  const std::size_t p_post = table.column("p_post");
  std::vector<ResilienceCycle> cycles;
  for (const auto& row : table.rows) {
    ResilienceCycle c;
    c.t_pre = static_cast<std::size_t>(to_double(row.at(t_pre)));
    c.t_event = static_cast<std::size_t>(to_double(row.at(t_event)));
    c.t_post = static_cast<std::size_t>(to_double(row.at(t_post)));
    c.p_pre = to_double(row.at(p_pre));
    c.p_event = to_double(row.at(p_event));
    c.p_post = to_double(row.at(p_post));
    cycles.push_back(c);
  }
  return cycles;
}

inline std::string sweep_to_csv(const SweepResult& result, const std::string& param_name) {
  std::string out = param_name;
  for (std::size_t c = 0; c < result.cycle_index.size(); ++c)
    out += ",c" + std::to_string(result.cycle_index[c]) + "_t" +
           std::to_string(result.t_event[c]);
  out += '\n';
  for (std::size_t g = 0; g < result.grid.size(); ++g) {
    out += format_g6(result.grid[g]);
    for (double v : result.scores[g]) out += ',' + format_g6(v);
    out += '\n';
  }
  return out;
}

} // namespace detail

/// sweep: RI trajectories over the RR and ET grids, from cycles.csv.
inline int cmd_sweep(const RunConfig& cfg, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
  return detail::guard(err, [&] {
    const auto cycles = detail::read_cycles_csv(cfg.out_dir + "/cycles.csv");
    const SweepResult rr = sweep_rr(cycles, cfg.tolerance(), cfg.rr_lo, cfg.rr_hi, cfg.rr_step);
    MicroRange micro{cfg.et_micro_lo, cfg.et_micro_hi, cfg.et_micro_step};
    const SweepResult et = sweep_et(cycles, cfg.tolerance(), cfg.et_lo, cfg.et_hi, cfg.et_step,
                                    cfg.et_micro ? &micro : nullptr);
    std::filesystem::create_directories(cfg.out_dir);
    detail::write_text_file(cfg.out_dir + "/sensitivity_rr.csv",
                            detail::sweep_to_csv(rr, "p_rr"));
    detail::write_text_file(cfg.out_dir + "/sensitivity_et.csv",
                            detail::sweep_to_csv(et, "p_et"));
    out << "sweep: " << rr.grid.size() << " RR rows, " << et.grid.size() << " ET rows ("
        << et.grid.size() - et.micro_start << " micro), " << rr.cycle_index.size()
        << " cycles\n";
  });
}

/// fetch: download a daily history and cache it as canonical CSV.
inline int cmd_fetch(const RunConfig& cfg, HttpTransport& transport,
                     std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return detail::guard(err, [&] {
    if (cfg.fetch_symbol.empty()) throw ConfigError("fetch requires fetch.symbol");
    const auto start = Date::parse_iso(cfg.fetch_start);
    const auto end = Date::parse_iso(cfg.fetch_end);
    if (!start || !end) throw ConfigError("fetch.start and fetch.end must be YYYY-MM-DD");
    const std::size_t min_rows = 2 * static_cast<std::size_t>(std::max(1, cfg.tau_days));
    const PriceSeries series =
        fetch_history(cfg.fetch_symbol, *start, *end, transport, cfg.url_template, min_rows);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.out_dir + "/" + cfg.fetch_symbol + ".csv";
    detail::write_text_file(path, serialize_csv(series));
    out << "fetched " << series.size() << " observations";
    if (series.dropped_rows > 0) out << " (dropped " << series.dropped_rows << ")";
    out << " -> " << path << '\n';
  });
}

/// report: human-readable recap of whatever artifacts exist in out_dir.
inline int cmd_report(const RunConfig& cfg, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  return detail::guard(err, [&] {
    namespace fs = std::filesystem;
    bool any = false;

    const std::string metrics_path = cfg.out_dir + "/metrics.csv";
    if (fs::exists(metrics_path)) {
      any = true;
      const auto table = detail::read_csv_table(metrics_path);
      const std::size_t ri_col = table.column("ri");
      const std::size_t type_col = table.column("recovery_type");
      std::vector<double> ri;
      std::size_t adaptive = 0, leveled = 0, insufficient = 0, collapse = 0;
      for (const auto& row : table.rows) {
        ri.push_back(detail::to_double(row.at(ri_col)));
        const std::string& t = row.at(type_col);
        if (t == "adaptive") ++adaptive;
        else if (t == "leveled") ++leveled;
        else if (t == "insufficient") ++insufficient;
        else ++collapse;
      }
      out << "metrics.csv: " << ri.size() << " cycles (adaptive " << adaptive << ", leveled "
          << leveled << ", insufficient " << insufficient << ", collapse " << collapse << ")\n";
      if (!ri.empty()) {
        std::vector<std::size_t> order(ri.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return ri[a] > ri[b]; });
        out << "top cycles by RI:";
        for (std::size_t i = 0; i < std::min<std::size_t>(5, order.size()); ++i)
          out << ' ' << table.rows[order[i]].at(0) << " (" << format_g6(ri[order[i]]) << ')';
        out << '\n';
      }
    }

    const std::string fit_path = cfg.out_dir + "/fit.json";
    if (fs::exists(fit_path)) {
      any = true;
      try {
        const auto doc = nlohmann::json::parse(detail::read_text_file(fit_path));
        out << "fit.json: alpha " << format_g6(doc.at("alpha").get<double>()) << ", x_min "
            << format_g6(doc.at("x_min").get<double>()) << ", n_tail "
            << doc.at("n_tail").get<std::size_t>() << ", p_mean "
            << format_g6(doc.at("p_mean").get<double>());
        out << (doc.at("p_mean").get<double>() < 0.05
                    ? " (power-law hypothesis rejected at 0.05)\n"
                    : " (power-law hypothesis not rejected at 0.05)\n");
      } catch (const nlohmann::json::exception& e) {
        throw FormatError("fit.json: " + std::string(e.what()));
      }
    }

    for (const char* name : {"sensitivity_rr.csv", "sensitivity_et.csv"}) {
      const std::string path = cfg.out_dir + "/" + name;
      if (!fs::exists(path)) continue;
      any = true;
      const auto table = detail::read_csv_table(path);
      out << name << ": " << table.rows.size() << " grid rows x " << table.header.size() - 1
          << " cycles\n";
    }

    if (!any) out << "no artifacts in " << cfg.out_dir << "; run analyze/fit/sweep first\n";
  });
}

} // namespace rescyc

#endif // RESCYC_PIPELINE_HPP
