#include "gdens/csv.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gdens {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << text;
    if (!out) throw ConfigError("write failed: " + path);
}

CsvMatrix parse_csv_matrix(const std::string& text, const std::string& origin) {
    CsvMatrix m;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // Skip blank lines and comment lines.
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        std::string field;
        std::size_t cols = 0;
        while (std::getline(fields, field, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(field, &used);
                while (used < field.size() &&
                       (field[used] == ' ' || field[used] == '\t'))
                    ++used;
                if (used != field.size()) throw std::invalid_argument(field);
                m.data.push_back(v);
            } catch (const std::exception&) {
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": not a number: '" + field + "'");
            }
            ++cols;
        }
        if (m.rows == 0)
            m.cols = cols;
        else if (cols != m.cols)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(m.cols) + " fields, got " + std::to_string(cols));
        ++m.rows;
    }
    if (m.rows == 0) throw ConfigError(origin + ": no numeric rows");
    return m;
}

CsvMatrix read_csv_matrix(const std::string& path) {
    return parse_csv_matrix(read_text_file(path), path);
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
    if (columns.size() != header.size()) throw ConfigError("write_csv: header/column mismatch");
    std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) throw ConfigError("write_csv: ragged columns");
    std::ostringstream out;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out << ',';
        out << header[j];
    }
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (j) out << ',';
            out << format_double(columns[j][i]);
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

std::string text_fingerprint(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_fingerprint(const std::string& path) {
    return text_fingerprint(read_text_file(path));
}

} // namespace gdens
