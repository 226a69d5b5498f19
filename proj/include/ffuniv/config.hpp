/*
   Copyright 2026 The ffuniv Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef FFUNIV_CONFIG_HPP
#define FFUNIV_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ffuniv {

/// Flat key=value experiment configuration with [section] headers.
///
///   # comment
///   [field]
///   p = 3
///   [modulus]
///   Q = 0 0 0 1
///
/// Keys are addressed as "section.key". Values are kept verbatim (trimmed);
/// the typed getters convert and report the source line on failure.
class ExperimentConfig {
public:
    /// ParseError with the line number for malformed lines, duplicate keys
    /// and (when strict) keys outside the known schema.
    static ExperimentConfig parse(const std::string& text, bool strict = true);
    static ExperimentConfig load(const std::string& path, bool strict = true);

    /// Sections in schema order, keys sorted within a section.
    std::string serialize() const;

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    long long get_int(const std::string& key) const;
    std::optional<long long> get_int_opt(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    double get_double(const std::string& key) const;
    std::optional<double> get_double_opt(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma- or space-separated integers.
    std::vector<long long> get_int_list(const std::string& key, std::vector<long long> fallback) const;

    /// Unknown keys are rejected like in parse, unless the config was parsed
    /// lenient, in which case they are recorded in unknown_keys().
    void set(const std::string& key, const std::string& value);
    const std::map<std::string, std::string>& values() const { return values_; }
    /// Keys outside the schema that were kept because strict was off.
    const std::vector<std::string>& unknown_keys() const { return unknown_; }
    /// Directory of the loaded file ("" for parsed text); relative paths in
    /// values resolve against it.
    const std::string& base_dir() const { return base_dir_; }

    bool operator==(const ExperimentConfig& o) const { return values_ == o.values_; }

    /// Every "section.key" the schema knows.
    static const std::vector<std::string>& schema();

private:
    std::string where(const std::string& key) const;
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
    std::vector<std::string> unknown_;
    std::string base_dir_;
    bool strict_ = true;
};

}  // namespace ffuniv

#endif  // FFUNIV_CONFIG_HPP
