#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace mic {

using CsvField = std::variant<std::string, double, long long>;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

/// RFC 4180 table: CRLF line breaks, quoted fields only when needed.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<CsvField> row) {
        require(row.size() == header_.size(), "csv: row width does not match header");
        rows_.push_back(std::move(row));
    }

    std::size_t size() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }

    std::string str() const {
        std::ostringstream os;
        write_row(os, header_);
        for (const auto& r : rows_) {
            std::vector<std::string> cells;
            for (const auto& f : r) {
                if (const auto* s = std::get_if<std::string>(&f)) cells.push_back(*s);
                else if (const auto* d = std::get_if<double>(&f)) cells.push_back(format_double(*d));
                else cells.push_back(std::to_string(std::get<long long>(f)));
            }
            write_row(os, cells);
        }
        return os.str();
    }

    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw config_error("cannot open output file " + path);
        f << str();
    }

private:
    static void write_row(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i]);
        os << "\r\n";
    }

    std::vector<std::string> header_;
    std::vector<std::vector<CsvField>> rows_;
};

} // namespace mic
