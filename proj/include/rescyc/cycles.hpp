#ifndef RESCYC_CYCLES_HPP
#define RESCYC_CYCLES_HPP

#include <cstddef>
#include <limits>
#include <vector>

#include "rescyc/errors.hpp"
#include "rescyc/series.hpp"

namespace rescyc {

enum class RunDirection { down, up };

/// Maximal weakly monotone stretch. Runs share boundary indices:
/// run k ends where run k+1 starts.
struct Run {
  RunDirection direction = RunDirection::down;
  std::size_t start_index = 0;
  std::size_t end_index = 0; // inclusive, > start_index

  std::size_t span_days() const { return end_index - start_index; }
};

/// One drawdown-then-drawup event. t_post == t_event encodes a series that
/// ends mid-decline (no recovery observed).
struct ResilienceCycle {
  std::size_t t_pre = 0;
  std::size_t t_event = 0;
  std::size_t t_post = 0;
  double p_pre = 0.0;
  double p_event = 0.0;
  double p_post = 0.0;
};

namespace detail {

// Net-change direction over [start, end]; flat spans count as down.
inline RunDirection span_direction(const std::vector<double>& lop, std::size_t start,
                                   std::size_t end) {
  return lop[end] > lop[start] ? RunDirection::up : RunDirection::down;
}

// Rebuild alternating runs from breakpoints: assign directions by net change,
// then join adjacent same-direction spans until the list alternates.
inline std::vector<Run> runs_from_breakpoints(const std::vector<double>& lop,
                                              std::vector<std::size_t> bp) {
  bool changed = true;
  while (changed && bp.size() > 2) {
    changed = false;
    for (std::size_t i = 0; i + 2 < bp.size(); ++i) {
      if (span_direction(lop, bp[i], bp[i + 1]) == span_direction(lop, bp[i + 1], bp[i + 2])) {
        bp.erase(bp.begin() + static_cast<std::ptrdiff_t>(i + 1));
        changed = true;
        break;
      }
    }
  }
  std::vector<Run> runs;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i)
    runs.push_back({span_direction(lop, bp[i], bp[i + 1]), bp[i], bp[i + 1]});
  return runs;
}

} // namespace detail

/// Partition [0, n-1] into maximal alternating weakly monotone runs.
/// Plateaus are absorbed into the preceding run; an all-flat series is a
/// single down run.
inline std::vector<Run> segment_runs(const PerformanceSeries& series) {
  const auto& lop = series.lop;
  const std::size_t n = lop.size();
  if (n < 2) throw ConfigError("segmentation needs at least 2 points");

  std::vector<Run> runs;
  bool have_direction = false;
  RunDirection current = RunDirection::down;
  std::size_t run_start = 0;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double delta = lop[i + 1] - lop[i];
    if (delta == 0.0) continue;
    const RunDirection d = delta > 0.0 ? RunDirection::up : RunDirection::down;
    if (!have_direction) {
      have_direction = true;
      current = d;
    } else if (d != current) {
      runs.push_back({current, run_start, i});
      run_start = i;
      current = d;
    }
  }
  runs.push_back({current, run_start, n - 1});
  return runs;
}

/// Duration filter: any run spanning fewer than tau_days is merged away,
/// shortest first (ties to the earliest start). Interior runs merge with both
/// neighbors; boundary runs merge inward only when the adjacent run is
/// interior. Directions of merged spans follow the endpoint net change.
inline std::vector<Run> tau_filter(const std::vector<Run>& runs,
                                   const PerformanceSeries& series, int tau_days) {
  if (tau_days < 1) throw ConfigError("tau_days must be at least 1");
  if (runs.empty()) return {};
  const auto tau = static_cast<std::size_t>(tau_days);

  std::vector<std::size_t> bp;
  bp.push_back(runs.front().start_index);
  for (const auto& r : runs) bp.push_back(r.end_index);

  auto current = detail::runs_from_breakpoints(series.lop, bp);
  while (current.size() > 1) {
    std::size_t pick = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < current.size(); ++i) {
      if (current[i].span_days() >= tau) continue;
      const bool interior = i > 0 && i + 1 < current.size();
      const bool mergeable_boundary =
          (i == 0 && current.size() > 2) || (i + 1 == current.size() && current.size() > 2);
      if (!interior && !mergeable_boundary) continue;
      if (pick == std::numeric_limits<std::size_t>::max() ||
          current[i].span_days() < current[pick].span_days())
        pick = i;
    }
    if (pick == std::numeric_limits<std::size_t>::max()) break;

    bp.clear();
    bp.push_back(current.front().start_index);
    for (const auto& r : current) bp.push_back(r.end_index);
    if (pick > 0 && pick + 1 < current.size()) {
      // interior: drop both ends of the run, joining it with both neighbors
      bp.erase(bp.begin() + static_cast<std::ptrdiff_t>(pick + 1));
      bp.erase(bp.begin() + static_cast<std::ptrdiff_t>(pick));
    } else if (pick == 0) {
      bp.erase(bp.begin() + 1);
    } else {
      bp.erase(bp.end() - 2);
    }
    current = detail::runs_from_breakpoints(series.lop, bp);
  }
  return current;
}

/// Pair each down run with its following up run. A terminal down run closes
/// at the last index with whatever recovery the data shows (none at all when
/// the series ends on its minimum).
inline std::vector<ResilienceCycle> extract_cycles(const std::vector<Run>& runs,
                                                   const PerformanceSeries& series) {
  std::vector<ResilienceCycle> cycles;
  const auto& lop = series.lop;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].direction != RunDirection::down) continue;
    ResilienceCycle c;
    c.t_pre = runs[i].start_index;
    c.t_event = runs[i].end_index;
    c.t_post = (i + 1 < runs.size()) ? runs[i + 1].end_index : runs[i].end_index;
    c.p_pre = lop[c.t_pre];
    c.p_event = lop[c.t_event];
    c.p_post = lop[c.t_post];
    cycles.push_back(c);
  }
  return cycles;
}

} // namespace rescyc

#endif // RESCYC_CYCLES_HPP
