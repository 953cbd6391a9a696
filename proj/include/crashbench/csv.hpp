#pragma once
// RFC-4180 delimited text: reader, writer and number formatting used by every
// canonical file format.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crashbench {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based physical line on which each row starts.
    std::vector<std::size_t> line_numbers;

    std::optional<std::size_t> column(std::string_view name) const;
    // Throws ParseError naming `name` and `context` when the column is absent.
    std::size_t require_column(std::string_view name, std::string_view context) const;
};

// Comma unless the header line holds tabs and no commas.
char sniff_delimiter(std::string_view text);

// Parses a header row plus records. Rows keep their field count even when it
// differs from the header so callers can tally them. Throws ParseError on an
// unterminated quoted field.
CsvTable parse_csv(std::string_view text, std::optional<char> delimiter = std::nullopt);
CsvTable read_csv_file(const std::filesystem::path& path,
                       std::optional<char> delimiter = std::nullopt);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out, char delimiter = ',') : out_(out), delim_(delimiter) {}

    void row(std::span<const std::string> fields);
    void row(std::initializer_list<std::string> fields) {
        row(std::span<const std::string>(fields.begin(), fields.size()));
    }

private:
    std::ostream& out_;
    char delim_;
};

std::string quote_field(std::string_view field, char delimiter = ',');

// Shortest representation that parses back to the same double; "inf"/"-inf"/"nan" for
// non-finite values.
std::string format_double(double value);
std::string format_fixed(double value, int decimals);

// Strict full-string parses; std::nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);
// true/false, yes/no, y/n, 1/0 (case-insensitive).
std::optional<bool> parse_bool(std::string_view text);

std::string_view trim(std::string_view text);
std::string to_lower(std::string_view text);

} // namespace crashbench
