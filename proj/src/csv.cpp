#include "critsense/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace critsense {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

std::string CsvCell::text() const {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_double(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (v.find_first_of(",\"\n") == std::string::npos) return v;
                std::string q = "\"";
                for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
                return q + "\"";
            } else {
                return std::to_string(v);
            }
        },
        value_);
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> columns)
    : out_(path), columns_(std::move(columns)) {
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<CsvCell> cells) {
    row(std::vector<CsvCell>(cells));
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != columns_.size()) {
        throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) +
                                    " cells, header has " + std::to_string(columns_.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i].text();
    out_ << '\n';
    ++rows_;
}

void CsvWriter::flush() { out_.flush(); }

}  // namespace critsense
