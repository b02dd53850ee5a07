#ifndef RESCYC_METRICS_HPP
#define RESCYC_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rescyc/cycles.hpp"
#include "rescyc/errors.hpp"
#include "rescyc/series.hpp"

namespace rescyc {

/// Two published variants of the re-stabilization denominator exist: the
/// defining equation divides by the pre-to-minimum drop, the worked example
/// divides by the threshold itself. Both are selectable; eq4 is the default.
enum class RestabDenominator { eq4, appendix };

struct ToleranceConfig {
  double p_rr = 0.0001; // robustness half-range, fraction of LoP (0.01% default)
  double p_et = 0.8;    // elasticity threshold, fraction of p_pre (80% default)
  RestabDenominator restab_denominator = RestabDenominator::eq4;
};

enum class RecoveryType { collapse, insufficient, leveled, adaptive };

inline const char* to_string(RecoveryType t) {
  switch (t) {
    case RecoveryType::collapse: return "collapse";
    case RecoveryType::insufficient: return "insufficient";
    case RecoveryType::leveled: return "leveled";
    case RecoveryType::adaptive: return "adaptive";
  }
  return "?";
}

/// Full width of the +/- robustness band on the normalized LoP scale.
inline double rr_width(const ToleranceConfig& cfg) { return 2.0 * cfg.p_rr; }

/// LoP level below which a phase transition is assumed.
inline double elasticity_threshold(const ToleranceConfig& cfg, const ResilienceCycle& cycle) {
  return cfg.p_et * cycle.p_pre;
}

/// Resistance: minimum LoP reached, credited with the robustness band.
inline double resistance(const ResilienceCycle& cycle, const ToleranceConfig& cfg) {
  return cycle.p_event + rr_width(cfg);
}

/// Re-stabilization effort in [0,1]; zero when the minimum stayed above the
/// elasticity threshold.
inline double restabilization(const ResilienceCycle& cycle, const ToleranceConfig& cfg) {
  if (!(cycle.p_pre > cycle.p_event))
    throw DegenerateCycleError("re-stabilization undefined without a downturn");
  const double et = elasticity_threshold(cfg, cycle);
  if (et <= cycle.p_event) return 0.0;
  const double denom = cfg.restab_denominator == RestabDenominator::eq4
                           ? cycle.p_pre - cycle.p_event
                           : et;
  const double r_e = (et - cycle.p_event) / denom;
  return std::clamp(r_e, 0.0, 1.0);
}

struct Rebuilding {
  double s_f = 0.0; // downturn slope, LoP per trading day
  double s_r = 0.0; // recovery slope, LoP per trading day
  double r_d = 0.0; // s_r / s_f
};

/// Relative rapidity of recovery versus failure. s_r is zero for a cycle the
/// series truncates before any recovery.
inline Rebuilding rebuilding(const ResilienceCycle& cycle) {
  if (cycle.t_event == cycle.t_pre || !(cycle.p_pre > cycle.p_event))
    throw ZeroFailureSlopeError("rebuilding requires a downturn with nonzero slope");
  Rebuilding out;
  out.s_f = (cycle.p_pre - cycle.p_event) / static_cast<double>(cycle.t_event - cycle.t_pre);
  out.s_r = cycle.t_post == cycle.t_event
                ? 0.0
                : (cycle.p_post - cycle.p_event) /
                      static_cast<double>(cycle.t_post - cycle.t_event);
  out.r_d = out.s_r / out.s_f;
  return out;
}

/// Fraction of the lost LoP that was restored. 1 is a full recovery, above 1
/// an adaptive overshoot.
inline double reconfiguration(const ResilienceCycle& cycle) {
  if (!(cycle.p_pre > cycle.p_event))
    throw DegenerateCycleError("reconfiguration undefined without a downturn");
  return (cycle.p_post - cycle.p_event) / (cycle.p_pre - cycle.p_event);
}

/// The proposed multiplicative indicator: resistance x remaining stabilizing
/// capacity x rebuilding x reconfiguration.
inline double resilience_indicator(const ResilienceCycle& cycle, const ToleranceConfig& cfg) {
  return resistance(cycle, cfg) * (1.0 - restabilization(cycle, cfg)) *
         rebuilding(cycle).r_d * reconfiguration(cycle);
}

inline RecoveryType classify_recovery(double r_s, double tol = 1e-9) {
  if (r_s <= tol) return RecoveryType::collapse;
  if (std::fabs(r_s - 1.0) <= tol) return RecoveryType::leveled;
  return r_s < 1.0 ? RecoveryType::insufficient : RecoveryType::adaptive;
}

namespace detail {

// Trapezoidal integral of lop over [t_pre, t_post], one trading day per step.
inline double integrate_lop(const ResilienceCycle& cycle, const PerformanceSeries& series) {
  double area = 0.0;
  for (std::size_t t = cycle.t_pre; t < cycle.t_post; ++t)
    area += 0.5 * (series.lop[t] + series.lop[t + 1]);
  return area;
}

} // namespace detail

/// Triangle-loss comparator: area between the pre-event level and the actual
/// LoP. Goes negative when an adaptive recovery spends time above the
/// baseline, which the proposed indicator is designed to avoid.
inline double triangle_loss(const ResilienceCycle& cycle, const PerformanceSeries& series) {
  const double span = static_cast<double>(cycle.t_post - cycle.t_pre);
  return cycle.p_pre * span - detail::integrate_lop(cycle, series);
}

/// Area-ratio comparator: actual over target area, target being the
/// pre-event level held for the whole cycle. Exceeds 1 on adaptive cycles.
inline double area_ratio(const ResilienceCycle& cycle, const PerformanceSeries& series) {
  const double span = static_cast<double>(cycle.t_post - cycle.t_pre);
  return detail::integrate_lop(cycle, series) / (cycle.p_pre * span);
}

/// Speed-and-level comparator: recovery slope scaled by post-event and
/// minimum LoP relative to the pre-event level.
inline double recovery_speed_index(const ResilienceCycle& cycle) {
  const double s_r = cycle.t_post == cycle.t_event
                         ? 0.0
                         : (cycle.p_post - cycle.p_event) /
                               static_cast<double>(cycle.t_post - cycle.t_event);
  return s_r * (cycle.p_post / cycle.p_pre) * (cycle.p_event / cycle.p_pre);
}

struct CycleScores {
  ResilienceCycle cycle;
  double rr_width = 0.0;
  double et = 0.0;
  double r_m = 0.0;
  double r_e = 0.0;
  double s_f = 0.0;
  double s_r = 0.0;
  double r_d = 0.0;
  double r_s = 0.0;
  double ri = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  RecoveryType recovery_type = RecoveryType::collapse;
};

struct ScoredBatch {
  std::vector<CycleScores> scores;
  std::vector<std::size_t> skipped; // input indices of degenerate cycles
};

/// Score every cycle with the proposed indicator and the three comparators.
/// Degenerate cycles (zero-height downturn) are skipped and flagged rather
/// than aborting the batch. Output order follows input order.
inline ScoredBatch score_all(const std::vector<ResilienceCycle>& cycles,
                             const PerformanceSeries& series, const ToleranceConfig& cfg) {
  ScoredBatch batch;
  batch.scores.reserve(cycles.size());
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const ResilienceCycle& c = cycles[i];
    if (!(c.p_pre > c.p_event) || c.t_event == c.t_pre) {
      batch.skipped.push_back(i);
      continue;
    }
    CycleScores s;
    s.cycle = c;
    s.rr_width = rr_width(cfg);
    s.et = elasticity_threshold(cfg, c);
    s.r_m = resistance(c, cfg);
    s.r_e = restabilization(c, cfg);
    const Rebuilding rb = rebuilding(c);
    s.s_f = rb.s_f;
    s.s_r = rb.s_r;
    s.r_d = rb.r_d;
    s.r_s = reconfiguration(c);
    s.ri = s.r_m * (1.0 - s.r_e) * s.r_d * s.r_s;
    s.r1 = triangle_loss(c, series);
    s.r2 = area_ratio(c, series);
    s.r3 = recovery_speed_index(c);
    s.recovery_type = classify_recovery(s.r_s);
    batch.scores.push_back(s);
  }
  return batch;
}

} // namespace rescyc

#endif // RESCYC_METRICS_HPP
