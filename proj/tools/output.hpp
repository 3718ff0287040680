#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qsearch::cli {

// "%.6g" rendering used for every non-table number.
std::string format_sig(double v, int digits = 6);
// "%.3f" rendering for tables. printf rounds the exact binary value, so true
// ties go to even.
std::string format_fixed(double v, int decimals = 3);
// Parses a rendered number back, so JSON carries exactly the printed value.
double rounded_sig(double v, int digits = 6);
double rounded_fixed(double v, int decimals = 3);

using CsvRow = std::vector<std::string>;

// Comma-delimited, '\n' line endings, no quoting (fields never contain commas).
std::string render_csv(const std::vector<CsvRow>& rows);
std::vector<CsvRow> parse_csv(std::string_view text);

}  // namespace qsearch::cli
