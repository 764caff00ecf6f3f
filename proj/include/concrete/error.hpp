#pragma once

#include <stdexcept>
#include <string>

namespace concrete {

/// Base exception. `code()` is a stable identifier (e.g. "MissingColumn")
/// that the CLI prints on its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Input data violates a documented precondition at a known location.
/// row/column are 1-based data-row number and column name; row 0 means n/a.
class DataError : public Error {
 public:
  DataError(std::string code, const std::string& message, std::size_t row = 0,
            std::string column = {})
      : Error(std::move(code), message), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

inline void require(bool condition, const char* code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace concrete
