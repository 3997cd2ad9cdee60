#ifndef LPSIM_CSV_HPP
#define LPSIM_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace lpsim {

/// Minimal deterministic CSV emitter: fixed column set, quoted only where
/// RFC 4180 requires it, '\n' line endings, no locale involvement. The first
/// line is a `# schema: <id>` comment so files self-describe their layout.
class CsvTable {
public:
    CsvTable(std::string schema_id, std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);

    void write(std::ostream& out) const;
    void write_file(const std::string& path) const;

    size_t rows() const { return rows_.size(); }

private:
    std::string schema_id_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Shortest-round-trip decimal rendering (printf %.17g trimmed is overkill
/// for reporting; this pins %.*g with a fixed precision so output is stable).
std::string format_double(double value, int significant_digits = 6);

std::string csv_escape(const std::string& cell);

}  // namespace lpsim

#endif
