#pragma once

#include <string>
#include <vector>

#include "spatlasso/types.hpp"

namespace spatlasso {

/// Shortest round-trip decimal representation ('.' separator, no locale).
std::string format_double(double v);

/// Parses a decimal field; "NA" and the empty string produce NaN when
/// allow_missing is set, otherwise they raise InvalidInput.
double parse_double(const std::string& field, bool allow_missing = false);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Rectangular CSV split; throws on ragged rows with row/column coordinates.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable parse_csv(const std::string& text, bool has_header);

/// Plain numeric matrix, one CSV row per matrix row, no header, LF endings.
std::string matrix_csv(const Matrix& m);
Matrix parse_matrix_csv(const std::string& text);

}  // namespace spatlasso
