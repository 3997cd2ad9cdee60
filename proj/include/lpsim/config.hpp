#ifndef LPSIM_CONFIG_HPP
#define LPSIM_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lpsim {

/// Flat key=value configuration. Flags populate it first; an optional config
/// file is applied on top and wins conflicts, so a file checked into an
/// experiment directory fully pins a run. `echo()` renders the merged view
/// (sorted, canonical formatting) for provenance alongside the outputs.
///
/// File syntax, TOML-like but flat: one `key = value` per line, `#` starts a
/// comment, blank lines ignored, values optionally double-quoted.
class KeyValueConfig {
public:
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) != 0; }

    /// Parse `text` and overwrite existing keys (file wins).
    void apply_file_text(const std::string& text, const std::string& source_name);
    void apply_file(const std::string& path);

    std::optional<std::string> raw(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    uint64_t get_u64(const std::string& key, uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Comma/space-separated list values.
    std::vector<long long> get_int_list(const std::string& key,
                                        const std::vector<long long>& fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;

    /// Canonical `key = value` lines, sorted by key.
    std::string echo() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace lpsim

#endif
