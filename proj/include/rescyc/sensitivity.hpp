#ifndef RESCYC_SENSITIVITY_HPP
#define RESCYC_SENSITIVITY_HPP

#include <cmath>
#include <string>
#include <vector>

#include "rescyc/cycles.hpp"
#include "rescyc/errors.hpp"
#include "rescyc/metrics.hpp"
#include "rescyc/series.hpp"

namespace rescyc {

enum class SweepParameter { p_rr, p_et };

/// RI trajectories over a parameter grid. scores[g][c] is the indicator of
/// scored cycle c at grid value g. When a micro grid is appended (ET sweeps),
/// micro_start marks where it begins; each segment is strictly increasing.
struct SweepResult {
  SweepParameter parameter = SweepParameter::p_rr;
  std::vector<double> grid;
  std::size_t micro_start = 0; // == grid.size() when no micro segment
  std::vector<std::vector<double>> scores;
  std::vector<std::size_t> cycle_index; // input index of each scored column
  std::vector<std::size_t> t_event;     // event day of each scored column
};

namespace detail {

// grid[i] = lo + i*step, never accumulated; the endpoint joins when (hi-lo)
// is an integer multiple of step within 1e-12.
inline std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) throw ConfigError("sweep step must be positive");
  if (hi < lo) throw ConfigError("sweep range is empty");
  const double k = (hi - lo) / step;
  const double rounded = std::round(k);
  const auto count = static_cast<std::size_t>(
      (std::fabs(k - rounded) <= 1e-12 ? rounded : std::floor(k)) + 1.0);
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo + static_cast<double>(i) * step;
  return grid;
}

inline SweepResult sweep(const std::vector<ResilienceCycle>& cycles, SweepParameter parameter,
                         ToleranceConfig cfg, const std::vector<double>& grid) {
  SweepResult result;
  result.parameter = parameter;
  result.grid = grid;
  result.micro_start = grid.size();
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    if (!(cycles[i].p_pre > cycles[i].p_event) || cycles[i].t_event == cycles[i].t_pre)
      continue; // degenerate, skipped exactly as score_all does
    result.cycle_index.push_back(i);
    result.t_event.push_back(cycles[i].t_event);
  }
  result.scores.assign(grid.size(), std::vector<double>(result.cycle_index.size(), 0.0));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (parameter == SweepParameter::p_rr)
      cfg.p_rr = grid[g];
    else
      cfg.p_et = grid[g];
    for (std::size_t c = 0; c < result.cycle_index.size(); ++c)
      result.scores[g][c] = resilience_indicator(cycles[result.cycle_index[c]], cfg);
  }
  return result;
}

} // namespace detail

/// Robustness-range sweep; p_et held at its configured value.
inline SweepResult sweep_rr(const std::vector<ResilienceCycle>& cycles,
                            const ToleranceConfig& cfg, double lo, double hi, double step) {
  return detail::sweep(cycles, SweepParameter::p_rr, cfg, detail::make_grid(lo, hi, step));
}

struct MicroRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
};

/// Elasticity-threshold sweep; p_rr held fixed. An optional micro range is
/// appended after the main grid for a finer look near its upper end.
inline SweepResult sweep_et(const std::vector<ResilienceCycle>& cycles,
                            const ToleranceConfig& cfg, double lo, double hi, double step,
                            const MicroRange* micro = nullptr) {
  std::vector<double> grid = detail::make_grid(lo, hi, step);
  const std::size_t main_size = grid.size();
  if (micro != nullptr) {
    const std::vector<double> fine = detail::make_grid(micro->lo, micro->hi, micro->step);
    grid.insert(grid.end(), fine.begin(), fine.end());
  }
  SweepResult result = detail::sweep(cycles, SweepParameter::p_et, cfg, grid);
  result.micro_start = main_size;
  return result;
}

} // namespace rescyc

#endif // RESCYC_SENSITIVITY_HPP
