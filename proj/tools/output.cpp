#include "output.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace qsearch::cli {

std::string format_sig(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

double rounded_sig(double v, int digits) { return std::strtod(format_sig(v, digits).c_str(), nullptr); }

double rounded_fixed(double v, int decimals) { return std::strtod(format_fixed(v, decimals).c_str(), nullptr); }

std::string render_csv(const std::vector<CsvRow>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        if (eol == std::string_view::npos) throw std::invalid_argument("parse_csv: missing trailing newline");
        std::string_view line = text.substr(0, eol);
        text.remove_prefix(eol + 1);
        CsvRow row;
        while (true) {
            const auto comma = line.find(',');
            row.emplace_back(line.substr(0, comma));
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace qsearch::cli
