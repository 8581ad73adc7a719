#include "robex/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace robex::csv {

std::string format(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string format(int value) { return std::to_string(value); }

std::string format(std::uint64_t value) { return std::to_string(value); }

void write_file(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    emit(header);
    for (const auto& row : rows) emit(row);
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace robex::csv
