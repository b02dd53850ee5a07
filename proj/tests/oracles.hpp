// Independent reference implementations used only to cross-check the library.
// These deliberately take different computational routes from the production
// code (fresh re-derivation per step, explicit matrix solves, inverse-CDF
// sampling) so agreement is meaningful.

#ifndef RESCYC_TESTS_ORACLES_HPP
#define RESCYC_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rescyc/cycles.hpp"
#include "rescyc/series.hpp"

namespace oracles {

// ---------------------------------------------------------------------------
// Duration filter, re-deriving the whole run list from scratch after every
// single merge: breakpoints -> directions by net change (ties down) ->
// repeated full-pass coalescing of equal neighbors.
// ---------------------------------------------------------------------------

inline std::vector<rescyc::Run> rebuild_runs(const std::vector<double>& lop,
                                             std::vector<std::size_t> bp) {
  using rescyc::Run;
  using rescyc::RunDirection;
  while (true) {
    std::vector<std::size_t> next;
    next.push_back(bp.front());
    bool merged = false;
    for (std::size_t i = 1; i + 1 < bp.size(); ++i) {
      const auto dir_left =
          lop[bp[i]] > lop[next.back()] ? RunDirection::up : RunDirection::down;
      const auto dir_right = lop[bp[i + 1]] > lop[bp[i]] ? RunDirection::up : RunDirection::down;
      if (dir_left == dir_right && !merged) {
        merged = true; // drop this breakpoint, then re-derive everything again
        continue;
      }
      next.push_back(bp[i]);
    }
    next.push_back(bp.back());
    bp = std::move(next);
    if (!merged) break;
  }
  std::vector<Run> runs;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const auto dir =
        lop[bp[i + 1]] > lop[bp[i]] ? RunDirection::up : RunDirection::down;
    runs.push_back({dir, bp[i], bp[i + 1]});
  }
  return runs;
}

inline std::vector<rescyc::Run> reference_tau_filter(const std::vector<rescyc::Run>& input,
                                                     const rescyc::PerformanceSeries& series,
                                                     std::size_t tau) {
  std::vector<std::size_t> bp;
  bp.push_back(input.front().start_index);
  for (const auto& r : input) bp.push_back(r.end_index);
  auto runs = rebuild_runs(series.lop, bp);

  while (runs.size() > 1) {
    std::size_t pick = runs.size();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs[i].span_days() >= tau) continue;
      const bool interior = i > 0 && i + 1 < runs.size();
      const bool boundary_with_interior_neighbor = !interior && runs.size() > 2;
      if (!interior && !boundary_with_interior_neighbor) continue;
      if (pick == runs.size() || runs[i].span_days() < runs[pick].span_days()) pick = i;
    }
    if (pick == runs.size()) break;

    bp.clear();
    bp.push_back(runs.front().start_index);
    for (const auto& r : runs) bp.push_back(r.end_index);
    if (pick > 0 && pick + 1 < runs.size()) {
      bp.erase(bp.begin() + static_cast<std::ptrdiff_t>(pick + 1));
      bp.erase(bp.begin() + static_cast<std::ptrdiff_t>(pick));
    } else if (pick == 0) {
      bp.erase(bp.begin() + 1);
    } else {
      bp.erase(bp.end() - 2);
    }
    runs = rebuild_runs(series.lop, bp);
  }
  return runs;
}

// ---------------------------------------------------------------------------
// Robust lowess via explicit normal-equation solves on raw abscissas.
// ---------------------------------------------------------------------------

inline std::vector<double> reference_rlowess(const std::vector<double>& y, std::size_t k,
                                             int robust_iters = 5) {
  const std::size_t n = y.size();
  std::vector<double> robust(n, 1.0);
  std::vector<double> fit(n, 0.0);

  auto one_pass = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t lo = i >= (k - 1) / 2 ? i - (k - 1) / 2 : 0;
      lo = std::min(lo, n - k);
      const std::size_t hi = lo + k - 1;
      double dmax = 0.0;
      for (std::size_t j = lo; j <= hi; ++j)
        dmax = std::max(dmax, std::fabs(double(j) - double(i)));
      // normal equations A^T W A beta = A^T W y with A = [1, x]
      double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
      for (std::size_t j = lo; j <= hi; ++j) {
        double w = 1.0;
        if (dmax > 0) {
          const double u = std::fabs(double(j) - double(i)) / dmax;
          w = std::pow(1.0 - u * u * u, 3.0);
        }
        w *= robust[j];
        const double x = double(j);
        a11 += w;
        a12 += w * x;
        a22 += w * x * x;
        b1 += w * y[j];
        b2 += w * x * y[j];
      }
      const double det = a11 * a22 - a12 * a12;
      if (a11 <= 0) {
        fit[i] = y[i];
      } else if (det <= 1e-12 * std::max(1.0, a11 * a22)) {
        fit[i] = b1 / a11;
      } else {
        const double intercept = (a22 * b1 - a12 * b2) / det;
        const double slope = (a11 * b2 - a12 * b1) / det;
        fit[i] = intercept + slope * double(i);
      }
    }
  };

  one_pass();
  for (int it = 0; it < robust_iters; ++it) {
    std::vector<double> absr(n);
    for (std::size_t i = 0; i < n; ++i) absr[i] = std::fabs(y[i] - fit[i]);
    std::vector<double> sorted(absr);
    std::sort(sorted.begin(), sorted.end());
    const double mad = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    if (mad <= 0.0) break;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = absr[i] / (6.0 * mad);
      robust[i] = u >= 1.0 ? 0.0 : (1.0 - u * u) * (1.0 - u * u);
    }
    one_pass();
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Sampling and small statistics helpers.
// ---------------------------------------------------------------------------

/// Inverse-CDF draw from a continuous power law with the given exponent.
inline std::vector<double> pareto_sample(std::size_t n, double alpha, double x_min,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) {
    double u = unit(rng);
    while (u <= 0.0) u = unit(rng);
    v = x_min * std::pow(u, -1.0 / (alpha - 1.0));
  }
  return out;
}

inline std::vector<double> half_normal_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) {
    double g = gauss(rng);
    while (g == 0.0) g = gauss(rng);
    v = std::fabs(g);
  }
  return out;
}

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace oracles

#endif // RESCYC_TESTS_ORACLES_HPP
