#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcmc/errors.hpp"

namespace qcmc {

/// One parsed value: scalar (string/number/bool) or an array of scalars.
struct ConfigValue {
    std::string raw;                 // scalar form
    std::vector<std::string> items;  // array form
    bool is_array = false;

    double as_double() const;
    long as_long() const;
    bool as_bool() const;
    const std::string& as_string() const { return raw; }
    std::vector<double> as_double_array() const;
    std::vector<long> as_long_array() const;
};

/// Declarative key = value tables:
///
///   include = "common.toml"        # merged first, relative to this file
///   experiment = "eps_metrics"
///   [model]
///   family = "tfi1d"
///   n_spin = 10
///   [sweep]
///   n_t = [10, 20, 50]
///
/// Keys are flattened to "section.key". Later assignments win, so a file
/// overrides what it includes.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text, const std::string& dir = ".");

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const ConfigValue& at(const std::string& key) const;

    double number(const std::string& key) const { return at(key).as_double(); }
    double number_or(const std::string& key, double fallback) const;
    long integer(const std::string& key) const { return at(key).as_long(); }
    long integer_or(const std::string& key, long fallback) const;
    std::string text(const std::string& key) const { return at(key).as_string(); }
    std::string text_or(const std::string& key, const std::string& fallback) const;
    bool flag_or(const std::string& key, bool fallback) const;

    const std::map<std::string, ConfigValue>& values() const { return values_; }

private:
    std::map<std::string, ConfigValue> values_;
};

}  // namespace qcmc
