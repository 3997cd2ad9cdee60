#include "lpsim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "lpsim/errors.hpp"

namespace lpsim {

CsvTable::CsvTable(std::string schema_id, std::vector<std::string> header)
    : schema_id_(std::move(schema_id)), header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
        throw ConfigError("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(header_.size()));
    rows_.push_back(std::move(cells));
}

void CsvTable::write(std::ostream& out) const {
    out << "# schema: " << schema_id_ << "\n";
    auto emit_line = [&out](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ",";
            out << csv_escape(cells[i]);
        }
        out << "\n";
    };
    emit_line(header_);
    for (const auto& row : rows_) emit_line(row);
}

void CsvTable::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open for writing");
    write(out);
    if (!out) throw ParseError(path + ": write failed");
}

std::string format_double(double value, int significant_digits) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*g", significant_digits, value);
    return buffer;
}

std::string csv_escape(const std::string& cell) {
    const bool needs_quotes =
        cell.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace lpsim
