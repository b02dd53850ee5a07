#ifndef RESCYC_DYNAMICS_HPP
#define RESCYC_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "rescyc/errors.hpp"

namespace rescyc {

/// Continuous power-law fit of the upper tail plus bootstrap goodness-of-fit.
struct TailFit {
  double alpha = 0.0;   // exponent, > 1
  double x_min = 0.0;   // tail cutoff
  std::size_t n_tail = 0;
  double ks_stat = 0.0; // two-sided K-S distance of the selected tail
  std::vector<double> p_values; // per-batch means of bootstrap indicators
  double p_mean = 0.0;          // overall fraction of reps with synthetic KS >= empirical
};

/// Values sorted descending with 1-based ranks; ties keep input order.
inline std::vector<std::pair<std::size_t, double>> rank_size(const std::vector<double>& values) {
  std::vector<double> sorted(values);
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<double>());
  std::vector<std::pair<std::size_t, double>> out;
  out.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) out.emplace_back(i + 1, sorted[i]);
  return out;
}

/// For each distinct value x, the fraction of observations >= x.
/// Ascending in value; probabilities start at 1 and decrease.
inline std::vector<std::pair<double, double>> exceedance(const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("exceedance requires a nonempty sample");
  for (double v : values)
    if (!(v > 0.0)) throw ConfigError("exceedance requires positive values");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    out.emplace_back(sorted[i], static_cast<double>(sorted.size() - i) / n);
  }
  return out;
}

namespace detail {

struct FitScan {
  double alpha = 0.0;
  double x_min = 0.0;
  std::size_t n_tail = 0;
  double ks = 0.0;
  bool ok = false;
};

// Scan every distinct value as a tail cutoff; for each, the continuous MLE
// exponent is 1 + m / sum(ln(x/x_min)) and the candidate minimizing the
// two-sided K-S distance between the tail's empirical CDF and the fitted
// power law wins. Tails that cannot carry a fit (fewer than two points, or
// all points equal) are not candidates.
inline FitScan fit_scan(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(sorted[i]);
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + logs[i];

  FitScan best;
  for (std::size_t i = 0; i + 2 <= n; ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    const std::size_t m = n - i;
    const double slog = suffix[i] - static_cast<double>(m) * logs[i];
    if (!(slog > 0.0)) continue;
    const double rate = static_cast<double>(m) / slog; // alpha - 1
    const double alpha = 1.0 + rate;
    double ks = 0.0;
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t j = i; j < n; ++j) {
      const double cdf = -std::expm1(-rate * (logs[j] - logs[i]));
      const double lower = static_cast<double>(j - i) * inv_m;
      const double upper = static_cast<double>(j - i + 1) * inv_m;
      ks = std::max({ks, cdf - lower, upper - cdf});
    }
    if (!best.ok || ks < best.ks) {
      best = {alpha, sorted[i], m, ks, true};
    }
  }
  return best;
}

// Decide whether every candidate cutoff fits the sample no better than
// `threshold` (the empirical K-S distance). Equivalent to
// fit_scan(sorted).ks >= threshold but cheap: each candidate's scan stops the
// moment its running maximum reaches the threshold, and the whole search
// stops at the first candidate that stays below it. Candidates are visited
// outward from hint_index, where the refit optimum usually sits.
inline bool no_better_fit_than(const std::vector<double>& sorted, double threshold,
                               std::size_t hint_index, std::vector<double>& logs_buf,
                               std::vector<double>& suffix_buf) {
  const std::size_t n = sorted.size();
  logs_buf.resize(n);
  for (std::size_t i = 0; i < n; ++i) logs_buf[i] = std::log(sorted[i]);
  suffix_buf.assign(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix_buf[i] = suffix_buf[i + 1] + logs_buf[i];

  std::vector<std::size_t> candidates;
  candidates.reserve(n);
  for (std::size_t i = 0; i + 2 <= n; ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    candidates.push_back(i);
  }
  if (candidates.empty()) return false;

  auto split = std::lower_bound(candidates.begin(), candidates.end(), hint_index) -
               candidates.begin();
  bool any_usable = false;
  auto beats_threshold = [&](std::size_t i) {
    const std::size_t m = n - i;
    const double slog = suffix_buf[i] - static_cast<double>(m) * logs_buf[i];
    if (!(slog > 0.0)) return false; // unusable candidate (all tail values equal)
    any_usable = true;
    const double rate = static_cast<double>(m) / slog; // alpha - 1
    const double inv_m = 1.0 / static_cast<double>(m);
    double ks = 0.0;
    for (std::size_t j = i; j < n; ++j) {
      const double cdf = -std::expm1(-rate * (logs_buf[j] - logs_buf[i]));
      const double lower = static_cast<double>(j - i) * inv_m;
      const double upper = static_cast<double>(j - i + 1) * inv_m;
      ks = std::max({ks, cdf - lower, upper - cdf});
      if (ks >= threshold) return false;
    }
    return true; // whole tail stayed below the threshold: strictly better fit
  };

  std::ptrdiff_t right = split;
  std::ptrdiff_t left = split - 1;
  const auto count = static_cast<std::ptrdiff_t>(candidates.size());
  while (right < count || left >= 0) {
    if (right < count) {
      if (beats_threshold(candidates[static_cast<std::size_t>(right)])) return false;
      ++right;
    }
    if (left >= 0) {
      if (beats_threshold(candidates[static_cast<std::size_t>(left)])) return false;
      --left;
    }
  }
  return any_usable;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Generator stream for one bootstrap rep, a pure function of (seed, rep);
/// results are identical under any scheduling of the reps.
inline std::mt19937_64 rep_rng(std::uint64_t seed, std::uint64_t rep) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(rep + 1)));
}

// One bootstrap rep's synthetic sample: body values resampled uniformly,
// tail drawn from the fitted power law, sorted ascending.
inline std::vector<double> synthetic_sample(std::size_t n, const std::vector<double>& body,
                                            double tail_prob, double x_min, double inv_rate,
                                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> synth(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (body.empty() || unit(rng) < tail_prob) {
      double u = unit(rng);
      while (u <= 0.0) u = unit(rng);
      synth[k] = x_min * std::pow(u, inv_rate);
    } else {
      const std::size_t idx = std::min(
          body.size() - 1,
          static_cast<std::size_t>(unit(rng) * static_cast<double>(body.size())));
      synth[k] = body[idx];
    }
  }
  std::sort(synth.begin(), synth.end());
  return synth;
}

inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : threads) t.join();
}

} // namespace detail

/// Fit a continuous power law to the upper tail, selecting x_min by K-S
/// minimization over all distinct candidate cutoffs.
inline TailFit fit_power_law(const std::vector<double>& values) {
  if (values.size() < 10)
    throw InsufficientTailError("power-law fit needs at least 10 values, got " +
                                std::to_string(values.size()));
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError("power-law fit requires positive finite values");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const detail::FitScan best = detail::fit_scan(sorted);
  if (!best.ok || best.n_tail < 2)
    throw InsufficientTailError("no tail cutoff leaves two or more distinct observations");
  TailFit fit;
  fit.alpha = best.alpha;
  fit.x_min = best.x_min;
  fit.n_tail = best.n_tail;
  fit.ks_stat = best.ks;
  return fit;
}

/// Semi-parametric bootstrap goodness-of-fit: each rep redraws the sample
/// (body values resampled, tail drawn from the fitted power law), refits it
/// from scratch, and scores whether the synthetic K-S distance reaches the
/// empirical one. p_mean is the fraction of reps that do; p_values groups the
/// per-rep indicators into batch means. Deterministic for a fixed seed.
inline TailFit bootstrap_ks(const std::vector<double>& values, const TailFit& fit,
                            std::size_t reps, std::uint64_t seed,
                            std::size_t batch_size = 50) {
  if (reps < 1) throw ConfigError("bootstrap needs at least one rep");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (fit.n_tail < 2 || !(fit.alpha > 1.0) || !(fit.x_min > 0.0))
    throw ConfigError("bootstrap requires a fitted tail");

  std::vector<double> body;
  for (double v : values)
    if (v < fit.x_min) body.push_back(v);
  std::sort(body.begin(), body.end());
  const std::size_t n = values.size();
  const double tail_prob = static_cast<double>(fit.n_tail) / static_cast<double>(n);
  const double inv_rate = -1.0 / (fit.alpha - 1.0);

  std::vector<unsigned char> hits(reps, 0);
  detail::parallel_for(reps, [&](std::size_t rep) {
    thread_local std::vector<double> logs_buf, suffix_buf;
    std::mt19937_64 rng = detail::rep_rng(seed, rep);
    const std::vector<double> synth =
        detail::synthetic_sample(n, body, tail_prob, fit.x_min, inv_rate, rng);
    const auto hint = static_cast<std::size_t>(
        std::lower_bound(synth.begin(), synth.end(), fit.x_min) - synth.begin());
    hits[rep] =
        detail::no_better_fit_than(synth, fit.ks_stat, hint, logs_buf, suffix_buf) ? 1 : 0;
  });

  TailFit out = fit;
  out.p_values.clear();
  std::size_t total = 0;
  for (std::size_t start = 0; start < reps; start += batch_size) {
    const std::size_t stop = std::min(reps, start + batch_size);
    std::size_t batch_hits = 0;
    for (std::size_t r = start; r < stop; ++r) batch_hits += hits[r];
    total += batch_hits;
    out.p_values.push_back(static_cast<double>(batch_hits) / static_cast<double>(stop - start));
  }
  out.p_mean = static_cast<double>(total) / static_cast<double>(reps);
  return out;
}

} // namespace rescyc

#endif // RESCYC_DYNAMICS_HPP
