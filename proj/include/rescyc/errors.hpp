#ifndef RESCYC_ERRORS_HPP
#define RESCYC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rescyc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// CSV header is missing or does not expose the required columns.
class FormatError : public Error {
public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

/// A data row could not be interpreted (bad date, non-positive close, ...).
class RowError : public Error {
public:
  RowError(std::size_t row, const std::string& msg)
      : Error("row " + std::to_string(row) + ": " + msg), row_(row) {}
  std::size_t row() const { return row_; }

private:
  std::size_t row_;
};

/// Too few valid observations to form even one cycle.
class InsufficientDataError : public Error {
public:
  explicit InsufficientDataError(const std::string& msg) : Error(msg) {}
};

/// HTTP download failed. status() is 0 when no response was received.
class FetchError : public Error {
public:
  FetchError(int status, const std::string& msg)
      : Error("fetch failed (status " + std::to_string(status) + "): " + msg),
        status_(status) {}
  int status() const { return status_; }

private:
  int status_;
};

/// A configuration value is unusable for the given data.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Cycle with a zero-height downturn; component metrics are undefined.
class DegenerateCycleError : public Error {
public:
  explicit DegenerateCycleError(const std::string& msg) : Error(msg) {}
};

/// Downturn slope is zero, so rebuilding cannot be evaluated.
class ZeroFailureSlopeError : public Error {
public:
  explicit ZeroFailureSlopeError(const std::string& msg) : Error(msg) {}
};

/// Power-law fit selected a tail with fewer than two observations.
class InsufficientTailError : public Error {
public:
  explicit InsufficientTailError(const std::string& msg) : Error(msg) {}
};

} // namespace rescyc

#endif // RESCYC_ERRORS_HPP
