#pragma once

// Minimal CSV emission with a fixed header. Doubles are written in the
// shortest form that reads back to the same value.

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace critsense {

class CsvCell {
public:
    CsvCell(double v) : value_(v) {}
    CsvCell(int v) : value_(static_cast<std::int64_t>(v)) {}
    CsvCell(long v) : value_(static_cast<std::int64_t>(v)) {}
    CsvCell(long long v) : value_(static_cast<std::int64_t>(v)) {}
    CsvCell(unsigned v) : value_(static_cast<std::uint64_t>(v)) {}
    CsvCell(unsigned long v) : value_(static_cast<std::uint64_t>(v)) {}
    CsvCell(unsigned long long v) : value_(static_cast<std::uint64_t>(v)) {}
    CsvCell(bool v) : value_(static_cast<std::int64_t>(v ? 1 : 0)) {}
    CsvCell(std::string_view v) : value_(std::string(v)) {}
    CsvCell(const char* v) : value_(std::string(v)) {}
    CsvCell(std::string v) : value_(std::move(v)) {}

    [[nodiscard]] std::string text() const;

private:
    std::variant<double, std::int64_t, std::uint64_t, std::string> value_;
};

/// Formats a double; NaN is written as "nan".
[[nodiscard]] std::string format_double(double v);

class CsvWriter {
public:
    /// Opens (truncates) path and writes the header. Throws std::runtime_error on I/O failure.
    CsvWriter(const std::string& path, std::vector<std::string> columns);

    /// Writes one row; the cell count must match the header.
    void row(std::initializer_list<CsvCell> cells);
    void row(const std::vector<CsvCell>& cells);
    void flush();

    [[nodiscard]] std::size_t rows_written() const { return rows_; }

private:
    std::ofstream out_;
    std::vector<std::string> columns_;
    std::size_t rows_ = 0;
};

}  // namespace critsense
