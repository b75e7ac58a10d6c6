#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace resolab {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric CSV with a single header line; values serialized at 17 significant
// digits so files are bit-stable under round trips.
struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string format_full(double v);  // %.17g

void write_csv(const std::string& path, const Csv& table);
Csv read_csv(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace resolab
