#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridcast {

// Input data that fails validation. line() is 1-based within the source file,
// or 0 when the problem is not tied to a single line.
class DataError : public std::runtime_error {
public:
    DataError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// The regression Gram matrix cannot be inverted safely.
class SingularDesignError : public std::runtime_error {
public:
    SingularDesignError(std::size_t column, const std::string& column_name, const std::string& detail)
        : std::runtime_error("singular design at column " + std::to_string(column) + " (" +
                             column_name + "): " + detail),
          column_(column), column_name_(column_name) {}

    std::size_t column() const noexcept { return column_; }
    const std::string& column_name() const noexcept { return column_name_; }

private:
    std::size_t column_;
    std::string column_name_;
};

// A series without enough variation to identify autoregressive coefficients.
class DegenerateSeriesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gridcast
