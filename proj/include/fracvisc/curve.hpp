#ifndef FRACVISC_CURVE_HPP
#define FRACVISC_CURVE_HPP

// Sampled curves and their CSV serialization.
//
// CSV conventions: comma separator, '.' decimal point, '#' line comments
// carrying provenance (the configuration values that produced the file),
// one column-name row, then data rows printed with 17 significant digits.
// Files are written to a temporary name and renamed into place, so readers
// never observe a partially written file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fracvisc/errors.hpp"

namespace fracvisc {

/// Ordered abscissa/ordinate pairs plus metadata describing what was sampled.
struct SampledCurve {
    std::vector<double> x;
    std::vector<double> y;
    std::string x_label = "x";
    std::string y_label = "value";
    std::vector<std::pair<std::string, std::string>> meta;
};

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline CsvTable to_table(const SampledCurve& c) {
    CsvTable t;
    t.meta = c.meta;
    t.columns = {c.x_label, c.y_label};
    t.rows.reserve(c.x.size());
    for (std::size_t i = 0; i < c.x.size(); ++i) t.rows.push_back({c.x[i], c.y[i]});
    return t;
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw domain_error("write_csv: cannot open " + tmp.string());
        if (!table.meta.empty()) {
            out << "#";
            for (std::size_t i = 0; i < table.meta.size(); ++i)
                out << (i ? ", " : " ") << table.meta[i].first << "="
                    << table.meta[i].second;
            out << "\n";
        }
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            out << (i ? "," : "") << table.columns[i];
        out << "\n";
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << format_full(row[i]);
            out << "\n";
        }
    }
    std::filesystem::rename(tmp, path);
}

inline void write_csv(const std::filesystem::path& path, const SampledCurve& curve) {
    write_csv(path, to_table(curve));
}

/// Reads back a CSV written by write_csv (comments skipped, header kept).
inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("read_csv: cannot open " + path.string());
    CsvTable t;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!header_seen) {
            t.columns = fields;
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& f : fields) row.push_back(std::stod(f));
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace fracvisc

#endif
