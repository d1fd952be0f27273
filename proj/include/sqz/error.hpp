#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqz {

/// A value lies outside the domain of a model quantity (efficiency > 1,
/// pump above threshold, non-positive variance, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// An inverse problem has no solution for the given observation. `floor()`
/// carries the closest achievable value (linear variance unless stated).
class InfeasibleError : public std::runtime_error {
public:
  InfeasibleError(const std::string& what, double floor)
      : std::runtime_error(what), floor_(floor) {}

  double floor() const noexcept { return floor_; }

private:
  double floor_;
};

class DegenerateFitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed measurement file. Row numbers are 1-based and count the header
/// as row 1; column is the header name (empty when not attributable).
class IngestError : public std::runtime_error {
public:
  IngestError(std::size_t row, std::string column, const std::string& msg)
      : std::runtime_error(format(row, column, msg)),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

private:
  static std::string format(std::size_t row, const std::string& column,
                            const std::string& msg) {
    std::string out = "row " + std::to_string(row);
    if (!column.empty()) out += ", column '" + column + "'";
    return out + ": " + msg;
  }

  std::size_t row_;
  std::string column_;
};

}  // namespace sqz
