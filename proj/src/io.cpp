#include "resolab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace resolab {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const Csv& table) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write '" + path + "'");
    for (size_t i = 0; i < table.header.size(); ++i)
        f << (i ? "," : "") << table.header[i];
    f << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw IoError("row width mismatch writing '" + path + "'");
        for (size_t i = 0; i < row.size(); ++i)
            f << (i ? "," : "") << format_full(row[i]);
        f << "\n";
    }
    if (!f) throw IoError("write failed for '" + path + "'");
}

Csv read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read '" + path + "'");
    Csv out;
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty CSV '" + path + "'");
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) out.header.push_back(cell);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream rs(line);
        std::vector<double> row;
        while (std::getline(rs, cell, ',')) {
            size_t pos = 0;
            double v = std::stod(cell, &pos);
            if (pos != cell.size())
                throw IoError("bad numeric cell '" + cell + "' in '" + path + "'");
            row.push_back(v);
        }
        if (row.size() != out.header.size())
            throw IoError("ragged row in '" + path + "'");
        out.rows.push_back(std::move(row));
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << text;
    if (!f) throw IoError("write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

}  // namespace resolab
