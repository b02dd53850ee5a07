// Command-line front end: analyze | fit | sweep | fetch | report.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rescyc/config.hpp"
#include "rescyc/net.hpp"
#include "rescyc/pipeline.hpp"

namespace {

struct PendingOptions {
  std::string config_path;
  rescyc::RunConfig cfg;
};

// Every config key is also a flag; flags win over the config file.
void add_common_options(CLI::App& cmd, PendingOptions& pending) {
  cmd.add_option("--config", pending.config_path, "flat key = value config file");
  cmd.add_option("--input", pending.cfg.input, "input CSV path");
  cmd.add_option("--out-dir", pending.cfg.out_dir, "output directory");

  cmd.add_option("--preprocess.normalize", pending.cfg.normalize);
  cmd.add_option("--preprocess.smooth", pending.cfg.smooth);
  cmd.add_option("--preprocess.span_days", pending.cfg.span_days);
  cmd.add_option("--cycles.tau_days", pending.cfg.tau_days);
  cmd.add_option("--metric.p_rr", pending.cfg.p_rr);
  cmd.add_option("--metric.p_et", pending.cfg.p_et);
  cmd.add_option_function<std::string>(
      "--metric.restab_denominator",
      [&pending](const std::string& v) {
        pending.cfg.restab_denominator = rescyc::parse_restab(v);
      },
      "eq4 | appendix");
  cmd.add_option("--dynamics.reps", pending.cfg.reps);
  cmd.add_option("--dynamics.seed", pending.cfg.seed);
  cmd.add_option("--dynamics.batch_size", pending.cfg.batch_size);
  cmd.add_option("--sweep.rr_lo", pending.cfg.rr_lo);
  cmd.add_option("--sweep.rr_hi", pending.cfg.rr_hi);
  cmd.add_option("--sweep.rr_step", pending.cfg.rr_step);
  cmd.add_option("--sweep.et_lo", pending.cfg.et_lo);
  cmd.add_option("--sweep.et_hi", pending.cfg.et_hi);
  cmd.add_option("--sweep.et_step", pending.cfg.et_step);
  cmd.add_option("--sweep.et_micro", pending.cfg.et_micro);
  cmd.add_option("--sweep.et_micro_lo", pending.cfg.et_micro_lo);
  cmd.add_option("--sweep.et_micro_hi", pending.cfg.et_micro_hi);
  cmd.add_option("--sweep.et_micro_step", pending.cfg.et_micro_step);
  cmd.add_option("--fetch.symbol,--symbol", pending.cfg.fetch_symbol);
  cmd.add_option("--fetch.start", pending.cfg.fetch_start);
  cmd.add_option("--fetch.end", pending.cfg.fetch_end);
  cmd.add_option("--fetch.url_template", pending.cfg.url_template);
}

// Load the config file under the flag values: start from defaults + file,
// then re-apply whatever the command line set.
rescyc::RunConfig resolve(const CLI::App& cmd, const PendingOptions& pending) {
  if (pending.config_path.empty()) return pending.cfg;
  rescyc::RunConfig cfg;
  rescyc::load_config_file(cfg, pending.config_path);
  rescyc::RunConfig merged = pending.cfg;
  auto keep_flag = [&cmd](const std::string& name) {
    const CLI::Option* opt = cmd.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  // Fields not set on the command line fall back to the file's values.
  if (!keep_flag("--input")) merged.input = cfg.input;
  if (!keep_flag("--out-dir")) merged.out_dir = cfg.out_dir;
  if (!keep_flag("--preprocess.normalize")) merged.normalize = cfg.normalize;
  if (!keep_flag("--preprocess.smooth")) merged.smooth = cfg.smooth;
  if (!keep_flag("--preprocess.span_days")) merged.span_days = cfg.span_days;
  if (!keep_flag("--cycles.tau_days")) merged.tau_days = cfg.tau_days;
  if (!keep_flag("--metric.p_rr")) merged.p_rr = cfg.p_rr;
  if (!keep_flag("--metric.p_et")) merged.p_et = cfg.p_et;
  if (!keep_flag("--metric.restab_denominator"))
    merged.restab_denominator = cfg.restab_denominator;
  if (!keep_flag("--dynamics.reps")) merged.reps = cfg.reps;
  if (!keep_flag("--dynamics.seed")) merged.seed = cfg.seed;
  if (!keep_flag("--dynamics.batch_size")) merged.batch_size = cfg.batch_size;
  if (!keep_flag("--sweep.rr_lo")) merged.rr_lo = cfg.rr_lo;
  if (!keep_flag("--sweep.rr_hi")) merged.rr_hi = cfg.rr_hi;
  if (!keep_flag("--sweep.rr_step")) merged.rr_step = cfg.rr_step;
  if (!keep_flag("--sweep.et_lo")) merged.et_lo = cfg.et_lo;
  if (!keep_flag("--sweep.et_hi")) merged.et_hi = cfg.et_hi;
  if (!keep_flag("--sweep.et_step")) merged.et_step = cfg.et_step;
  if (!keep_flag("--sweep.et_micro")) merged.et_micro = cfg.et_micro;
  if (!keep_flag("--sweep.et_micro_lo")) merged.et_micro_lo = cfg.et_micro_lo;
  if (!keep_flag("--sweep.et_micro_hi")) merged.et_micro_hi = cfg.et_micro_hi;
  if (!keep_flag("--sweep.et_micro_step")) merged.et_micro_step = cfg.et_micro_step;
  if (!keep_flag("--fetch.symbol")) merged.fetch_symbol = cfg.fetch_symbol;
  if (!keep_flag("--fetch.start")) merged.fetch_start = cfg.fetch_start;
  if (!keep_flag("--fetch.end")) merged.fetch_end = cfg.fetch_end;
  if (!keep_flag("--fetch.url_template")) merged.url_template = cfg.url_template;
  return merged;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"resilience-cycle quantification for daily price histories"};
  app.require_subcommand(1);

  PendingOptions pending;
  CLI::App* analyze = app.add_subcommand("analyze", "score resilience cycles from a CSV");
  CLI::App* fit = app.add_subcommand("fit", "power-law tail fit of the scored cycles");
  CLI::App* sweep = app.add_subcommand("sweep", "RR / ET sensitivity grids");
  CLI::App* fetch = app.add_subcommand("fetch", "download and cache a daily history CSV");
  CLI::App* report = app.add_subcommand("report", "summarize emitted artifacts");
  for (CLI::App* cmd : {analyze, fit, sweep, fetch, report})
    add_common_options(*cmd, pending);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1; // any parse failure is a usage error
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const rescyc::RunConfig cfg = resolve(*cmd, pending);
    if (cmd == analyze) return rescyc::cmd_analyze(cfg);
    if (cmd == fit) return rescyc::cmd_fit(cfg);
    if (cmd == sweep) return rescyc::cmd_sweep(cfg);
    if (cmd == fetch) {
      rescyc::LiveHttpTransport transport;
      return rescyc::cmd_fetch(cfg, transport);
    }
    return rescyc::cmd_report(cfg);
  } catch (const rescyc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
