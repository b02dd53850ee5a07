#ifndef RESCYC_SERIES_HPP
#define RESCYC_SERIES_HPP

#include <cmath>
#include <string>
#include <vector>

#include "rescyc/dates.hpp"
#include "rescyc/errors.hpp"

namespace rescyc {

struct Observation {
  Date date;
  double close = 0.0;
};

/// Raw dated closing-value series. Dates strictly increasing, closes > 0.
struct PriceSeries {
  std::string symbol;
  std::vector<Observation> observations;
  std::size_t dropped_rows = 0; // rows with null/missing close skipped on parse

  std::size_t size() const { return observations.size(); }

  void validate(std::size_t min_rows) const {
    if (observations.size() < min_rows)
      throw InsufficientDataError(symbol + ": " + std::to_string(observations.size()) +
                                  " observations, need at least " + std::to_string(min_rows));
    for (std::size_t i = 0; i < observations.size(); ++i) {
      const double c = observations[i].close;
      if (!(c > 0.0) || !std::isfinite(c))
        throw RowError(i, "close must be positive and finite");
      if (i > 0 && !(observations[i - 1].date < observations[i].date))
        throw RowError(i, "dates must be strictly increasing");
    }
  }
};

/// Level-of-performance series indexed by trading day 0..n-1.
/// Fresh normalized series have max(lop) == 1; a smoothed series may not.
struct PerformanceSeries {
  std::string symbol;
  std::vector<double> lop;
  bool smoothed = false;

  std::size_t size() const { return lop.size(); }
  double operator[](std::size_t t) const { return lop[t]; }
};

} // namespace rescyc

#endif // RESCYC_SERIES_HPP
