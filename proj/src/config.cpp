#include "lpsim/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "lpsim/errors.hpp"

namespace lpsim {

namespace {

std::string trim(const std::string& s) {
    size_t begin = 0;
    size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        return s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string current;
    for (char c : s) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) items.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) items.push_back(current);
    return items;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& want) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as " + want);
}

}  // namespace

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

void KeyValueConfig::apply_file_text(const std::string& text, const std::string& source_name) {
    std::istringstream in(text);
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ParseError(source_name + ":" + std::to_string(line_no) + ": empty key");
        values_[key] = value;
    }
}

void KeyValueConfig::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    apply_file_text(buffer.str(), path);
}

std::optional<std::string> KeyValueConfig::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    auto v = raw(key);
    return v ? *v : fallback;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    try {
        size_t used = 0;
        const long long parsed = std::stoll(*v, &used);
        if (used != v->size()) bad_value(key, *v, "an integer");
        return parsed;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(key, *v, "an integer");
    }
}

uint64_t KeyValueConfig::get_u64(const std::string& key, uint64_t fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    try {
        size_t used = 0;
        const uint64_t parsed = std::stoull(*v, &used);
        if (used != v->size()) bad_value(key, *v, "an unsigned integer");
        return parsed;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(key, *v, "an unsigned integer");
    }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    try {
        size_t used = 0;
        const double parsed = std::stod(*v, &used);
        if (used != v->size()) bad_value(key, *v, "a number");
        return parsed;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(key, *v, "a number");
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    bad_value(key, *v, "a boolean");
}

std::vector<long long> KeyValueConfig::get_int_list(
    const std::string& key, const std::vector<long long>& fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    std::vector<long long> out;
    for (const std::string& item : split_list(*v)) {
        try {
            out.push_back(std::stoll(item));
        } catch (const std::exception&) {
            bad_value(key, *v, "a list of integers");
        }
    }
    if (out.empty()) bad_value(key, *v, "a non-empty list of integers");
    return out;
}

std::vector<double> KeyValueConfig::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const std::string& item : split_list(*v)) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            bad_value(key, *v, "a list of numbers");
        }
    }
    if (out.empty()) bad_value(key, *v, "a non-empty list of numbers");
    return out;
}

std::string KeyValueConfig::echo() const {
    std::ostringstream out;
    for (const auto& [key, value] : values_) out << key << " = " << value << "\n";
    return out.str();
}

}  // namespace lpsim
