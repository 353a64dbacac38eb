#pragma once

#include <string>
#include <vector>

#include "gdens/common.hpp"

namespace gdens {

// Header-free numeric CSV: every row must have the same number of fields.
struct CsvMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // row-major

    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

CsvMatrix read_csv_matrix(const std::string& path);
CsvMatrix parse_csv_matrix(const std::string& text, const std::string& origin);

// Writes a table with a header row; values use %.17g so reruns are
// byte-identical.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

std::string format_double(double v);

// FNV-1a hash of a file's bytes, as fixed-width hex (config fingerprint).
std::string file_fingerprint(const std::string& path);
std::string text_fingerprint(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace gdens
