#ifndef RESCYC_PREPROCESS_HPP
#define RESCYC_PREPROCESS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "rescyc/errors.hpp"
#include "rescyc/series.hpp"

namespace rescyc {

/// Scale closes by the series maximum so the level of performance sits in
/// (0,1] with max exactly 1.
inline PerformanceSeries normalize(const PriceSeries& series) {
  series.validate(2);
  double max_close = 0.0;
  for (const auto& obs : series.observations) max_close = std::max(max_close, obs.close);
  PerformanceSeries out;
  out.symbol = series.symbol;
  out.smoothed = false;
  out.lop.reserve(series.size());
  for (const auto& obs : series.observations) out.lop.push_back(obs.close / max_close);
  return out;
}

namespace detail {

inline double median_abs(std::vector<double> values) {
  for (auto& v : values) v = std::fabs(v);
  const std::size_t n = values.size();
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(values.begin(), mid);
  return 0.5 * (lo + hi);
}

// Weighted degree-1 least squares over window [lo, hi], evaluated at the
// target index. Abscissas are centered on the target for conditioning.
// Falls back to the weighted mean when the weighted abscissas coincide.
inline double wls_at(const std::vector<double>& y, std::size_t lo, std::size_t hi,
                     const std::vector<double>& w, std::size_t target) {
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t j = lo; j <= hi; ++j) {
    const double wj = w[j - lo];
    const double x = static_cast<double>(j) - static_cast<double>(target);
    sw += wj;
    swx += wj * x;
    swy += wj * y[j];
    swxx += wj * x * x;
    swxy += wj * x * y[j];
  }
  if (sw <= 0.0) return y[target];
  const double denom = sw * swxx - swx * swx;
  if (denom <= 1e-12 * std::max(1.0, sw * swxx)) return swy / sw;
  const double slope = (sw * swxy - swx * swy) / denom;
  return (swy - slope * swx) / sw; // intercept == value at the target
}

} // namespace detail

/// Robust locally weighted linear regression ("rlowess").
///
/// Each point is refit over its span_days nearest neighbors (contiguous
/// window, ties resolved rightward) with tricube distance weights, then the
/// whole pass is repeated five times with bisquare weights on residuals
/// scaled by 6 x median(|residual|).
inline PerformanceSeries rlowess(const PerformanceSeries& series, int span_days) {
  const std::size_t n = series.size();
  if (span_days < 2)
    throw ConfigError("smoothing span must be at least 2, got " + std::to_string(span_days));
  if (static_cast<std::size_t>(span_days) > n)
    throw ConfigError("smoothing span " + std::to_string(span_days) +
                      " exceeds series length " + std::to_string(n));

  const std::size_t k = static_cast<std::size_t>(span_days);
  const std::vector<double>& y = series.lop;
  std::vector<double> robust(n, 1.0);
  std::vector<double> fitted(n);
  std::vector<double> w(k);

  auto smooth_pass = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t lo = i >= (k - 1) / 2 ? i - (k - 1) / 2 : 0;
      lo = std::min(lo, n - k);
      const std::size_t hi = lo + k - 1;
      double dmax = 0.0;
      for (std::size_t j = lo; j <= hi; ++j)
        dmax = std::max(dmax, std::fabs(static_cast<double>(j) - static_cast<double>(i)));
      for (std::size_t j = lo; j <= hi; ++j) {
        double tricube = 1.0;
        if (dmax > 0.0) {
          const double u = std::fabs(static_cast<double>(j) - static_cast<double>(i)) / dmax;
          const double c = 1.0 - u * u * u;
          tricube = c * c * c;
        }
        w[j - lo] = tricube * robust[j];
      }
      fitted[i] = detail::wls_at(y, lo, hi, w, i);
    }
  };

  smooth_pass();
  for (int iter = 0; iter < 5; ++iter) {
    std::vector<double> residuals(n);
    for (std::size_t i = 0; i < n; ++i) residuals[i] = y[i] - fitted[i];
    const double mad = detail::median_abs(residuals);
    if (mad <= 0.0) break; // already an exact fit
    const double scale = 6.0 * mad;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = residuals[i] / scale;
      if (std::fabs(u) >= 1.0) {
        robust[i] = 0.0;
      } else {
        const double c = 1.0 - u * u;
        robust[i] = c * c;
      }
    }
    smooth_pass();
  }

  PerformanceSeries out;
  out.symbol = series.symbol;
  out.smoothed = true;
  out.lop = std::move(fitted);
  return out;
}

} // namespace rescyc

#endif // RESCYC_PREPROCESS_HPP
