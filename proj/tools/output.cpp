#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace shuntlab::cli {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
}

void CsvWriter::meta(const std::string& key, const std::string& value) { out_ << "# " << key << ": " << value << '\n'; }

void CsvWriter::header(const std::vector<Column>& columns) {
    width_ = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << (i ? "," : "") << columns[i].name << " (" << columns[i].unit << ")";
    out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
    if (cells.size() != width_) throw std::logic_error("CsvWriter: row width differs from header in " + path_.string());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        std::visit(
            [this](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, double>)
                    out_ << format_number(c);
                else
                    out_ << c;
            },
            cells[i]);
    }
    out_ << '\n';
}

namespace {

void dump_into(std::string& s, const Json& v, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                s += "{}";
                return;
            }
            s += "{\n";
            bool first = true;
            for (const auto& [key, item] : v.items()) {
                if (!first) s += ",\n";
                first = false;
                s += pad + Json(key).dump() + ": ";
                dump_into(s, item, indent + 2);
            }
            s += "\n" + close + "}";
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                s += "[]";
                return;
            }
            s += "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) s += ",\n";
                s += pad;
                dump_into(s, v[i], indent + 2);
            }
            s += "\n" + close + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double d = v.get<double>();
            s += std::isfinite(d) ? format_number(d) : "null";
            return;
        }
        default: s += v.dump();
    }
}

}  // namespace

std::string dump_json(const Json& value) {
    std::string s;
    dump_into(s, value, 0);
    s += '\n';
    return s;
}

void write_json(const std::filesystem::path& path, const Json& value) { write_text(path, dump_json(value)); }

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
}

}  // namespace shuntlab::cli
