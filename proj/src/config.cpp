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

#include "ffuniv/config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ffuniv/error.hpp"

namespace ffuniv {

namespace {

const std::vector<std::pair<std::string, std::vector<std::string>>>& sections()
{
    static const std::vector<std::pair<std::string, std::vector<std::string>>> s = {
        {"field", {"p", "k"}},
        {"modulus", {"Q"}},
        {"run", {"workers", "seed", "out"}},
        {"params", {"K", "delta", "mu", "rho", "z", "sigma", "t", "epsilon", "epsilon_base", "x_min", "x_max", "n",
                    "c", "maxdeg", "degmax", "index", "Ks", "tol", "grid_points", "sweep_degrees", "compare",
                    "match"}},
        {"grid", {"kind", "r_lo", "r_hi", "n_r", "ang_lo", "ang_hi", "n_ang", "sig_lo", "sig_hi", "n_sig", "t_lo",
                  "t_hi", "n_t"}},
        {"target", {"spec"}},
        {"phases", {"file"}},
    };
    return s;
}

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

bool is_name(const std::string& s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

bool known(const std::string& section, const std::string& key)
{
    for (const auto& [sec, keys] : sections())
        if (sec == section)
            return key.empty() || std::find(keys.begin(), keys.end(), key) != keys.end();
    return false;
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::schema()
{
    static const std::vector<std::string> all = [] {
        std::vector<std::string> v;
        for (const auto& [sec, keys] : sections())
            for (const auto& k : keys)
                v.push_back(sec + "." + k);
        return v;
    }();
    return all;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, bool strict)
{
    ExperimentConfig cfg;
    cfg.strict_ = strict;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        const std::string at = "line " + std::to_string(lineno) + ": ";
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ParseError(at + "unterminated section header '" + t + "'");
            section = trim(t.substr(1, t.size() - 2));
            if (!is_name(section))
                throw ParseError(at + "bad section name '" + section + "'");
            if (strict && !known(section, ""))
                throw ParseError(at + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError(at + "expected key = value, got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (!is_name(key))
            throw ParseError(at + "bad key '" + key + "'");
        if (section.empty())
            throw ParseError(at + "key '" + key + "' outside any [section]");
        const std::string full = section + "." + key;
        if (!known(section, key)) {
            if (strict)
                throw ParseError(at + "unknown key '" + key + "' in [" + section + "]");
            cfg.unknown_.push_back(full);
        }
        if (cfg.values_.count(full))
            throw ParseError(at + "duplicate key '" + full + "' (first on line " +
                             std::to_string(cfg.lines_[full]) + ")");
        cfg.values_[full] = value;
        cfg.lines_[full] = lineno;
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path, bool strict)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ParseError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    ExperimentConfig cfg;
    try {
        cfg = parse(ss.str(), strict);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
    cfg.base_dir_ = std::filesystem::path(path).parent_path().string();
    return cfg;
}

std::string ExperimentConfig::serialize() const
{
    std::ostringstream out;
    bool first = true;
    auto emit_section = [&](const std::string& sec) {
        std::vector<std::pair<std::string, std::string>> kv;
        const std::string prefix = sec + ".";
        for (const auto& [k, v] : values_)
            if (k.compare(0, prefix.size(), prefix) == 0)
                kv.emplace_back(k.substr(prefix.size()), v);
        if (kv.empty())
            return;
        if (!first)
            out << "\n";
        first = false;
        out << "[" << sec << "]\n";
        for (const auto& [k, v] : kv)
            out << k << " = " << v << "\n";
    };
    std::vector<std::string> order;
    for (const auto& [sec, keys] : sections())
        order.push_back(sec);
    for (const auto& [k, v] : values_) {
        const std::string sec = k.substr(0, k.find('.'));
        if (std::find(order.begin(), order.end(), sec) == order.end())
            order.push_back(sec);
    }
    for (const auto& sec : order)
        emit_section(sec);
    return out.str();
}

std::string ExperimentConfig::where(const std::string& key) const
{
    auto it = lines_.find(key);
    return it == lines_.end() ? key : key + " (line " + std::to_string(it->second) + ")";
}

const std::string& ExperimentConfig::get(const std::string& key) const
{
    auto it = values_.find(key);
    if (it == values_.end())
        throw ParseError("missing required key " + key);
    return it->second;
}

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const
{
    return has(key) ? get(key) : fallback;
}

long long ExperimentConfig::get_int(const std::string& key) const
{
    const std::string& v = get(key);
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw ParseError(where(key) + ": expected an integer, got '" + v + "'");
    return x;
}

long long ExperimentConfig::get_int(const std::string& key, long long fallback) const
{
    return has(key) ? get_int(key) : fallback;
}

std::optional<long long> ExperimentConfig::get_int_opt(const std::string& key) const
{
    if (!has(key))
        return std::nullopt;
    return get_int(key);
}

double ExperimentConfig::get_double(const std::string& key) const
{
    const std::string& v = get(key);
    std::size_t used = 0;
    double x = 0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw ParseError(where(key) + ": expected a number, got '" + v + "'");
    return x;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

std::optional<double> ExperimentConfig::get_double_opt(const std::string& key) const
{
    if (!has(key))
        return std::nullopt;
    return get_double(key);
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const
{
    if (!has(key))
        return fallback;
    std::string v = get(key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "1" || v == "true" || v == "yes" || v == "on")
        return true;
    if (v == "0" || v == "false" || v == "no" || v == "off")
        return false;
    throw ParseError(where(key) + ": expected a boolean, got '" + get(key) + "'");
}

std::vector<long long> ExperimentConfig::get_int_list(const std::string& key, std::vector<long long> fallback) const
{
    if (!has(key))
        return fallback;
    std::string v = get(key);
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream in(v);
    std::vector<long long> out;
    for (std::string tok; in >> tok;) {
        std::size_t used = 0;
        long long x = 0;
        try {
            x = std::stoll(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size())
            throw ParseError(where(key) + ": expected integers, got '" + tok + "'");
        out.push_back(x);
    }
    if (out.empty())
        throw ParseError(where(key) + ": empty list");
    return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value)
{
    const auto dot = key.find('.');
    if (dot == std::string::npos || !is_name(key.substr(0, dot)) || !is_name(key.substr(dot + 1)))
        throw PreconditionError("config key must be section.key, got '" + key + "'");
    if (value.find('\n') != std::string::npos)
        throw PreconditionError("config value for " + key + " spans lines");
    const auto section = key.substr(0, dot), name = key.substr(dot + 1);
    if (!known(section, name)) {
        if (strict_)
            throw PreconditionError("unknown config key '" + key + "'");
        if (std::find(unknown_.begin(), unknown_.end(), key) == unknown_.end())
            unknown_.push_back(key);
    }
    values_[key] = trim(value);
    lines_.erase(key);
}

}  // namespace ffuniv
