#include "qcmc/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qcmc {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': '" + s + "' is not a number");
    }
}

}  // namespace

double ConfigValue::as_double() const {
    if (is_array) throw ValidationError("expected a scalar, found an array");
    return to_double(raw, raw);
}

long ConfigValue::as_long() const {
    const double v = as_double();
    if (std::abs(v - std::llround(v)) > 1e-9) throw ValidationError("'" + raw + "' is not an integer");
    return static_cast<long>(std::llround(v));
}

bool ConfigValue::as_bool() const {
    if (raw == "true" || raw == "1") return true;
    if (raw == "false" || raw == "0") return false;
    throw ValidationError("'" + raw + "' is not a boolean");
}

std::vector<double> ConfigValue::as_double_array() const {
    std::vector<double> out;
    if (!is_array) {
        out.push_back(as_double());
        return out;
    }
    out.reserve(items.size());
    for (const auto& s : items) out.push_back(to_double(s, s));
    return out;
}

std::vector<long> ConfigValue::as_long_array() const {
    std::vector<long> out;
    for (double v : as_double_array()) {
        if (std::abs(v - std::llround(v)) > 1e-9) throw ValidationError("array holds a non-integer");
        out.push_back(static_cast<long>(std::llround(v)));
    }
    return out;
}

const ConfigValue& Config::at(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError("missing config key '" + key + "'");
    return it->second;
}

double Config::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

long Config::integer_or(const std::string& key, long fallback) const {
    return has(key) ? integer(key) : fallback;
}

std::string Config::text_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
}

bool Config::flag_or(const std::string& key, bool fallback) const {
    return has(key) ? at(key).as_bool() : fallback;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_text(buf.str(), std::filesystem::path(path).parent_path().string());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

Config Config::parse_text(const std::string& text, const std::string& dir) {
    Config config;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // strip comments outside quotes
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.erase(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("line " + std::to_string(line_no) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ValidationError("line " + std::to_string(line_no) + ": empty section name");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ValidationError("line " + std::to_string(line_no) + ": empty key or value");

        if (key == "include" && section.empty()) {
            const std::string inc = unquote(value);
            const auto inc_path = std::filesystem::path(dir) / inc;
            const Config sub = parse_file(inc_path.string());
            // included values first; this file overrides
            for (const auto& [k, v] : sub.values_)
                if (!config.values_.count(k)) config.values_[k] = v;
            continue;
        }

        ConfigValue cv;
        if (value.front() == '[') {
            if (value.back() != ']')
                throw ValidationError("line " + std::to_string(line_no) + ": unterminated array");
            cv.is_array = true;
            std::string body = value.substr(1, value.size() - 2);
            std::string item;
            std::istringstream items(body);
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (!item.empty()) cv.items.push_back(unquote(item));
            }
        } else {
            cv.raw = unquote(value);
        }
        const std::string full_key = section.empty() ? key : section + "." + key;
        config.values_[full_key] = std::move(cv);
    }
    return config;
}

}  // namespace qcmc
