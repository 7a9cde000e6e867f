// CSV and JSON writers with fixed 17-significant-digit number formatting.
#pragma once

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace shuntlab::cli {

using Json = nlohmann::ordered_json;

/// %.17g, with "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);

struct Column {
    std::string name;
    std::string unit;  // "-" for dimensionless
};

using Cell = std::variant<double, long long, std::string>;

/// Comma-separated file with `# key: value` metadata lines, a header row of
/// `name (unit)` cells and LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);

    void meta(const std::string& key, const std::string& value);
    void meta(const std::string& key, double value) { meta(key, format_number(value)); }
    void header(const std::vector<Column>& columns);
    void row(const std::vector<Cell>& cells);

private:
    std::ofstream out_;
    std::filesystem::path path_;
    std::size_t width_ = 0;
};

/// Two-space indented JSON; floating-point values use format_number and
/// non-finite ones become null. Key order is insertion order.
std::string dump_json(const Json& value);
void write_json(const std::filesystem::path& path, const Json& value);

/// Finite numbers as JSON numbers, others as null.
Json number_or_null(double v);

/// Plain text file with LF endings.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace shuntlab::cli
