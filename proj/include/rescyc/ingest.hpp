#ifndef RESCYC_INGEST_HPP
#define RESCYC_INGEST_HPP

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rescyc/errors.hpp"
#include "rescyc/series.hpp"

namespace rescyc {

/// Minimum usable observation count: two tau-filter windows (tau = 3 by default).
inline constexpr std::size_t kDefaultMinRows = 6;

namespace detail {

inline std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size();
}

} // namespace detail

/// Parse a daily-history CSV (Yahoo Finance layout). The header must name
/// Date and Close columns; any other columns are carried but ignored.
/// Rows whose close is empty or the literal "null" are dropped and counted.
/// Output is sorted by ascending date regardless of input order.
inline PriceSeries parse_csv(std::string_view raw, const std::string& symbol,
                             std::size_t min_rows = kDefaultMinRows) {
  std::size_t pos = 0;
  std::size_t row = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= raw.size()) return false;
    const std::size_t nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) {
      line = detail::strip_cr(raw.substr(pos));
      pos = raw.size();
    } else {
      line = detail::strip_cr(raw.substr(pos, nl - pos));
      pos = nl + 1;
    }
    ++row;
    return true;
  };

  std::string_view header;
  if (!next_line(header) || header.empty())
    throw FormatError("empty input, expected a CSV header row");

  const auto columns = detail::split_fields(header);
  std::size_t date_col = std::numeric_limits<std::size_t>::max();
  std::size_t close_col = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == "Date") date_col = i;
    if (columns[i] == "Close") close_col = i;
  }
  if (date_col == std::numeric_limits<std::size_t>::max() ||
      close_col == std::numeric_limits<std::size_t>::max())
    throw FormatError("header must name Date and Close columns, got \"" +
                      std::string(header) + "\"");

  struct Parsed {
    Observation obs;
    std::size_t row;
  };
  std::vector<Parsed> rows;
  std::size_t dropped = 0;

  std::string_view line;
  while (next_line(line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() <= date_col)
      throw RowError(row, "missing Date field");
    const auto date = Date::parse_iso(fields[date_col]);
    if (!date)
      throw RowError(row, "unparseable date \"" + fields[date_col] + "\"");
    if (fields.size() <= close_col || fields[close_col].empty() ||
        fields[close_col] == "null") {
      ++dropped;
      continue;
    }
    double close = 0.0;
    if (!detail::parse_double(fields[close_col], close))
      throw RowError(row, "unparseable close \"" + fields[close_col] + "\"");
    if (!(close > 0.0) || !std::isfinite(close))
      throw RowError(row, "close must be positive, got " + fields[close_col]);
    rows.push_back({{*date, close}, row});
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Parsed& a, const Parsed& b) { return a.obs.date < b.obs.date; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].obs.date == rows[i - 1].obs.date)
      throw RowError(rows[i].row, "duplicate date " + rows[i].obs.date.to_iso());

  PriceSeries series;
  series.symbol = symbol;
  series.dropped_rows = dropped;
  series.observations.reserve(rows.size());
  for (auto& r : rows) series.observations.push_back(r.obs);

  if (series.observations.size() < min_rows)
    throw InsufficientDataError(symbol + ": only " +
                                std::to_string(series.observations.size()) +
                                " valid rows, need at least " + std::to_string(min_rows));
  return series;
}

/// Canonical CSV form: full Yahoo header, Date and Close populated,
/// closes printed with round-trip precision. parse_csv(serialize_csv(s))
/// reproduces s exactly.
inline std::string serialize_csv(const PriceSeries& series) {
  std::string out = "Date,Open,High,Low,Close,Adj Close,Volume\n";
  char buf[64];
  for (const auto& obs : series.observations) {
    std::snprintf(buf, sizeof(buf), ",,,,%.17g,,", obs.close);
    out += obs.date.to_iso();
    out += buf;
    out += '\n';
  }
  return out;
}

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Abstract HTTP-GET capability; tests substitute a canned responder.
class HttpTransport {
public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url) = 0;
};

inline constexpr std::string_view kDefaultUrlTemplate =
    "https://query1.finance.yahoo.com/v7/finance/download/{symbol}"
    "?period1={start_epoch}&period2={end_epoch}&interval=1d&events=history";

inline std::string expand_url_template(std::string templ, const std::string& symbol,
                                       Date start, Date end) {
  auto replace_all = [](std::string& s, std::string_view key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = s.find(key, pos)) != std::string::npos) {
      s.replace(pos, key.size(), value);
      pos += value.size();
    }
  };
  replace_all(templ, "{symbol}", symbol);
  replace_all(templ, "{start_epoch}", std::to_string(start.epoch_seconds()));
  replace_all(templ, "{end_epoch}", std::to_string(end.epoch_seconds()));
  return templ;
}

/// One GET against the daily-history endpoint, piped through parse_csv.
inline PriceSeries fetch_history(const std::string& symbol, Date start, Date end,
                                 HttpTransport& transport,
                                 std::string url_template = std::string(kDefaultUrlTemplate),
                                 std::size_t min_rows = kDefaultMinRows) {
  if (!(start < end))
    throw ConfigError("fetch range is empty: start must precede end");
  const std::string url = expand_url_template(std::move(url_template), symbol, start, end);
  HttpResponse response = transport.get(url);
  if (response.status < 200 || response.status >= 300)
    throw FetchError(response.status, url);
  return parse_csv(response.body, symbol, min_rows);
}

} // namespace rescyc

#endif // RESCYC_INGEST_HPP
