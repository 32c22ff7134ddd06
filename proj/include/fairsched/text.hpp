#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairsched {

// Comma-delimited text with RFC 4180 quoting. Embedded newlines inside quoted
// fields are supported.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Reads the next record into `fields`. Returns false at end of input.
    bool next(std::vector<std::string>& fields);
    // 1-based physical line number where the last record started.
    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::size_t record_line_ = 0;
};

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest representation that parses back to the same double.
std::string format_double(double v);
// Fixed 17 significant digits, used by the model file format.
std::string format_double17(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<bool> parse_bool(std::string_view s);
std::string_view trim(std::string_view s);

}  // namespace fairsched
