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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ffuniv/config.hpp"
#include "ffuniv/error.hpp"
#include "ffuniv/runner.hpp"

using namespace ffuniv;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("ffuniv_config_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string parse_error(const std::string& text, bool strict = true)
{
    try {
        ExperimentConfig::parse(text, strict);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, ParseAndTypedGetters)
{
    const auto c = ExperimentConfig::parse("# top\n[field]\np = 5\n\n; note\n[params]\ndelta = 0.25\r\nKs = 1, 2 4\n"
                                           "compare = off\n[modulus]\nQ = 1 0 1\n");
    EXPECT_EQ(c.get_int("field.p"), 5);
    EXPECT_EQ(c.get_int("field.k", 1), 1);
    EXPECT_DOUBLE_EQ(c.get_double("params.delta"), 0.25);
    EXPECT_EQ(c.get_int_list("params.Ks", {}), (std::vector<long long>{1, 2, 4}));
    EXPECT_FALSE(c.get_bool("params.compare", true));
    EXPECT_EQ(c.get("modulus.Q"), "1 0 1");
    EXPECT_FALSE(c.get_int_opt("params.K").has_value());
}

TEST(Config, SerializeRoundTrip)
{
    const auto c = ExperimentConfig::parse("[params]\nrho = 2\nK = 9\n[field]\nk = 1\np = 7\n[target]\nspec = const 1\n");
    const auto text = c.serialize();
    EXPECT_EQ(text, "[field]\nk = 1\np = 7\n\n[params]\nK = 9\nrho = 2\n\n[target]\nspec = const 1\n");
    EXPECT_EQ(ExperimentConfig::parse(text), c);
    EXPECT_EQ(ExperimentConfig::parse(text).serialize(), text);
}

TEST(Config, StrictDiagnosticsCarryLineNumbers)
{
    EXPECT_NE(parse_error("[field]\np = 3\n[bogus]\n").find("line 3"), std::string::npos);
    EXPECT_NE(parse_error("[field]\nq = 3\n").find("unknown key 'q'"), std::string::npos);
    EXPECT_NE(parse_error("[field]\np = 3\np = 5\n").find("first on line 2"), std::string::npos);
    EXPECT_NE(parse_error("p = 3\n").find("outside any"), std::string::npos);
    EXPECT_NE(parse_error("[field]\np 3\n").find("line 2"), std::string::npos);
    EXPECT_NE(parse_error("[field\n").find("unterminated"), std::string::npos);
    EXPECT_EQ(parse_error("[field]\nq = 3\n[extra]\nz = 1\n", false), "");
    const auto c = ExperimentConfig::parse("[field]\nq = 3\n", false);
    EXPECT_EQ(c.unknown_keys(), std::vector<std::string>{"field.q"});
}

TEST(Config, BadValuesNameTheKeyAndLine)
{
    const auto c = ExperimentConfig::parse("[params]\nK = 12x\ndelta = abc\ncompare = maybe\n");
    try {
        c.get_int("params.K");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("params.K (line 2)"), std::string::npos);
    }
    EXPECT_THROW(c.get_double("params.delta"), ParseError);
    EXPECT_THROW(c.get_bool("params.compare", true), ParseError);
    EXPECT_THROW(c.get("params.rho"), ParseError);
}

TEST(Config, SetValidatesKeys)
{
    ExperimentConfig c;
    c.set("run.workers", " 4 ");
    EXPECT_EQ(c.get_int("run.workers"), 4);
    EXPECT_THROW(c.set("workers", "4"), PreconditionError);
    EXPECT_THROW(c.set("run.workers", "4\n5"), PreconditionError);
    EXPECT_THROW(c.set("params.bogus", "1"), PreconditionError);
    auto lenient = ExperimentConfig::parse("", false);
    lenient.set("params.bogus", "1");
    lenient.set("params.bogus", "2");
    EXPECT_EQ(lenient.unknown_keys(), std::vector<std::string>{"params.bogus"});
}

TEST(Config, SchemaListsEverySection)
{
    const auto& s = ExperimentConfig::schema();
    for (const char* k : {"field.p", "modulus.Q", "run.workers", "params.delta", "grid.kind", "target.spec",
                          "phases.file"})
        EXPECT_NE(std::find(s.begin(), s.end(), k), s.end()) << k;
}

TEST(Runner, UnknownCommandAndMissingKeysAreUsageErrors)
{
    const auto out = scratch("usage");
    auto r = run("nope", ExperimentConfig{}, out.string());
    EXPECT_EQ(r.exit_code, kExitUsage);
    r = run("phi", ExperimentConfig::parse("[field]\np = 3\n"), out.string());
    EXPECT_EQ(r.exit_code, kExitUsage);
    EXPECT_NE(r.message.find("modulus.Q"), std::string::npos);
    r = run("phi", ExperimentConfig::parse("[field]\np = 4\n[modulus]\nQ = 0 1\n"), out.string());
    EXPECT_EQ(r.exit_code, kExitUsage);
    r = run("phi", ExperimentConfig::parse("[modulus]\nQ = 0 2\n"), out.string());
    EXPECT_EQ(r.exit_code, kExitUsage);
    r = run("peak", ExperimentConfig::parse("[params]\nK = 8\ndelta = 0.7\n"), out.string());
    EXPECT_EQ(r.exit_code, kExitUsage);
    fs::remove_all(out);
}

TEST(Runner, CapacityIsUsageAndUncertifiablePeakIsViolation)
{
    const auto out = scratch("cap");
    auto r = run("lpoly", ExperimentConfig::parse("[field]\np = 3\n[modulus]\nQ = 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1\n"),
                 out.string());
    EXPECT_EQ(r.exit_code, kExitUsage) << r.message;
    r = run("peak", ExperimentConfig::parse("[params]\nK = 7\ndelta = 0.1\n"), out.string());
    EXPECT_EQ(r.exit_code, kExitViolation) << r.message;
    fs::remove_all(out);
}

TEST(Runner, OutputsAreDeterministicAndWorkerIndependent)
{
    const std::string base = "[field]\np = 3\n[modulus]\nQ = 0 0 0 0 1\n[params]\nK = 8\ndelta = 0.2\n";
    for (const char* cmd : {"lpoly", "hybrid", "mvh", "sieve", "search", "guided", "splitgb"}) {
        const auto a = scratch(std::string("a_") + cmd), b = scratch(std::string("b_") + cmd);
        auto ca = ExperimentConfig::parse(base), cb = ExperimentConfig::parse(base);
        cb.set("run.workers", "3");
        const auto ra = run(cmd, ca, a.string()), rb = run(cmd, cb, b.string());
        ASSERT_EQ(ra.exit_code, kExitOk) << cmd << ": " << ra.message;
        ASSERT_EQ(rb.exit_code, kExitOk) << cmd << ": " << rb.message;
        ASSERT_EQ(ra.files, rb.files);
        EXPECT_EQ(ra.files.back(), "meta.json");
        for (const auto& f : ra.files)
            if (f != "meta.json")
                EXPECT_EQ(slurp(a / f), slurp(b / f)) << cmd << "/" << f;
        fs::remove_all(a);
        fs::remove_all(b);
    }
}

TEST(Runner, SeedChangesRandomPhasesOnly)
{
    const std::string base = "[modulus]\nQ = 0 0 0 0 1\n[params]\nK = 8\ndelta = 0.2\n";
    auto c1 = ExperimentConfig::parse(base), c2 = ExperimentConfig::parse(base);
    c2.set("run.seed", "99");
    const auto a = scratch("s1"), b = scratch("s2");
    ASSERT_EQ(run("mvg", c1, a.string()).exit_code, kExitOk);
    ASSERT_EQ(run("mvg", c2, b.string()).exit_code, kExitOk);
    const auto ja = nlohmann::json::parse(slurp(a / "mvg.json")), jb = nlohmann::json::parse(slurp(b / "mvg.json"));
    EXPECT_NE(ja["phases"], jb["phases"]);
    EXPECT_EQ(ja["main"], jb["main"]);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Runner, PhasesFileResolvesAgainstConfigDir)
{
    const auto dir = scratch("phases");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "cfg.ini");
        f << "[modulus]\nQ = 0 0 0 0 1\n[params]\nK = 8\ndelta = 0.2\n";
    }
    const auto first = run("mvg", ExperimentConfig::load((dir / "cfg.ini").string()), (dir / "o1").string());
    ASSERT_EQ(first.exit_code, kExitOk);
    const auto phases = nlohmann::json::parse(slurp(dir / "o1" / "mvg.json"))["phases"].get<std::string>();
    {
        std::ofstream f(dir / "ph.txt");
        f << phases;
        std::ofstream g(dir / "cfg.ini", std::ios::app);
        g << "[phases]\nfile = ph.txt\n[run]\nseed = 7\n";
    }
    const auto second = run("mvg", ExperimentConfig::load((dir / "cfg.ini").string()), (dir / "o2").string());
    ASSERT_EQ(second.exit_code, kExitOk) << second.message;
    EXPECT_EQ(slurp(dir / "o1" / "mvg.json"), slurp(dir / "o2" / "mvg.json"));
    fs::remove_all(dir);
}

TEST(Runner, RhSweepSmallFieldIsClean)
{
    const auto out = scratch("rh");
    const auto r = run("rhsweep", ExperimentConfig::parse("[field]\np = 3\n[params]\ndegmax = 3\n"), out.string());
    ASSERT_EQ(r.exit_code, kExitOk) << r.message;
    const auto j = nlohmann::json::parse(slurp(out / "rhsweep.json"));
    EXPECT_EQ(j["violations"], 0);
    EXPECT_EQ(j["moduli"], 3 + 9 + 27);
    // every root is on |u| = q^{-1/2} or |u| = 1
    EXPECT_EQ(j["critical"].get<int>() + j["trivial"].get<int>(), j["roots"].get<int>());
    fs::remove_all(out);
}

TEST(Runner, CsvHasSchemaLineAndHeader)
{
    const auto out = scratch("csv");
    ASSERT_EQ(run("peak", ExperimentConfig::parse("[params]\nK = 32\ndelta = 0.1\n"), out.string()).exit_code,
              kExitOk);
    std::ifstream f(out / "peak.csv");
    std::string l1, l2;
    std::getline(f, l1);
    std::getline(f, l2);
    EXPECT_EQ(l1, "# ffuniv peak v1");
    EXPECT_EQ(l2, "k,c");
    const auto s = slurp(out / "peak.csv");
    EXPECT_EQ(s.find('\r'), std::string::npos);
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2 + 33);
    fs::remove_all(out);
}
