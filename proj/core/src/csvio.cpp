#include "spatlasso/csvio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

namespace spatlasso {

std::string format_double(double v) {
    if (std::isnan(v)) return "NA";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw NumericError("format_double: conversion failed");
    return std::string(buf, ptr);
}

double parse_double(const std::string& field, bool allow_missing) {
    if (field.empty() || field == "NA" || field == "NaN" || field == "nan") {
        if (allow_missing) return std::numeric_limits<double>::quiet_NaN();
        throw InvalidInput("parse_double: missing value where a number is required");
    }
    double out = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
        throw InvalidInput("parse_double: not a number: '" + field + "'");
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw NumericError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text, bool has_header) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields = split_line(line);
        if (width == 0) {
            width = fields.size();
        } else if (fields.size() != width) {
            std::ostringstream msg;
            msg << "CSV row " << line_no << " has " << fields.size() << " fields, expected "
                << width;
            throw InvalidInput(msg.str());
        }
        if (has_header && table.header.empty() && table.rows.empty()) {
            table.header = std::move(fields);
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    if (has_header && table.header.empty()) throw InvalidInput("CSV: missing header row");
    return table;
}

std::string matrix_csv(const Matrix& m) {
    std::string out;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j > 0) out.push_back(',');
            out += format_double(m(i, j));
        }
        out.push_back('\n');
    }
    return out;
}

Matrix parse_matrix_csv(const std::string& text) {
    CsvTable t = parse_csv(text, false);
    if (t.rows.empty()) throw InvalidInput("matrix CSV: empty");
    Matrix m(static_cast<int>(t.rows.size()), static_cast<int>(t.rows.front().size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        for (std::size_t j = 0; j < t.rows[i].size(); ++j) {
            try {
                m(static_cast<int>(i), static_cast<int>(j)) = parse_double(t.rows[i][j]);
            } catch (const InvalidInput& e) {
                std::ostringstream msg;
                msg << e.what() << " (row " << i + 1 << ", column " << j + 1 << ")";
                throw InvalidInput(msg.str());
            }
        }
    }
    return m;
}

}  // namespace spatlasso
