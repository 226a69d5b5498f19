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

// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ffuniv/ffuniv.h"

namespace {

struct Config {
    ffu_config* c = nullptr;
    ~Config() { ffu_config_free(c); }
};

std::string get_or(const ffu_config* c, const char* key, const std::string& fallback)
{
    size_t need = 0;
    if (ffu_config_get(c, key, nullptr, 0, &need) != FFU_E_BUFFER)
        return fallback;
    std::string s(need, '\0');
    if (ffu_config_get(c, key, s.data(), s.size(), &need) != FFU_OK)
        return fallback;
    s.resize(need - 1);
    return s;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dirichlet L-functions over F_q[x]: checks and universality experiments"};
    app.set_version_flag("--version", std::string(ffu_version()));
    app.require_subcommand(1);

    std::string config, out;
    bool lenient = false;
    int workers = 0;
    long long seed = -1;
    std::vector<std::string> sets;

    auto* list = app.add_subcommand("commands", "List the experiment commands");
    for (size_t i = 0; const char* name = ffu_command_name(i); ++i) {
        auto* sub = app.add_subcommand(name, ffu_command_summary(i));
        sub->add_option("-c,--config", config, "Experiment config file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out, "Output directory (default: [run] out, else out/<command>)");
        sub->add_flag("--lenient", lenient, "Keep unknown config keys instead of rejecting them");
        sub->add_option("-w,--workers", workers, "Worker threads (overrides [run] workers)")->check(CLI::Range(1, 1024));
        sub->add_option("--seed", seed, "RNG seed (overrides [run] seed)")->check(CLI::NonNegativeNumber);
        sub->add_option("--set", sets, "Override a value, section.key=value (repeatable)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        for (size_t i = 0; const char* name = ffu_command_name(i); ++i)
            std::printf("%s\n", name);
        return 0;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    Config cfg;
    if (ffu_config_load(config.c_str(), lenient ? 0 : 1, &cfg.c) != FFU_OK) {
        std::fprintf(stderr, "ffuniv: %s\n", ffu_last_error());
        return 2;
    }
    auto set = [&](const std::string& key, const std::string& value) {
        if (ffu_config_set(cfg.c, key.c_str(), value.c_str()) != FFU_OK) {
            std::fprintf(stderr, "ffuniv: %s\n", ffu_last_error());
            return false;
        }
        return true;
    };
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "ffuniv: --set expects section.key=value, got '%s'\n", kv.c_str());
            return 2;
        }
        if (!set(kv.substr(0, eq), kv.substr(eq + 1)))
            return 2;
    }
    if (workers > 0 && !set("run.workers", std::to_string(workers)))
        return 2;
    if (seed >= 0 && !set("run.seed", std::to_string(seed)))
        return 2;
    if (out.empty())
        out = get_or(cfg.c, "run.out", "out/" + command);

    int exit_code = 0;
    if (ffu_run(cfg.c, command.c_str(), out.c_str(), &exit_code) != FFU_OK) {
        std::fprintf(stderr, "ffuniv: %s\n", ffu_last_error());
        return 1;
    }
    std::fprintf(exit_code == 0 ? stdout : stderr, "%s\n", ffu_last_message());
    return exit_code;
}
