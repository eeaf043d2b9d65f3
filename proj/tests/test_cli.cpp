#include "heatwave/cli.hpp"
#include "heatwave/mesh.hpp"
#include "heatwave/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace heatwave;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "heatwave");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("heatwave_cli_" + name);
    std::filesystem::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("lemma42 subcommand writes a report")
{
    const auto dir = scratch("lemma42");
    const auto r = cli({"lemma42", "--gamma", "0.7853981633974483", "--count", "2000", "--seed", "1", "--output-dir",
                        dir.string()});
    CHECK(r.code == kExitOk);
    std::ifstream f(dir / "report.json");
    REQUIRE(f.good());
    const auto j = Json::parse(f);
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["experiment"] == "lemma42");
    CHECK(j["config"]["count"] == 2000);
    CHECK(std::filesystem::exists(dir / "tables.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("mesh subcommand round trip")
{
    const auto path = scratch("mesh.txt");
    const auto r = cli({"mesh", "--n", "2", "--out", path.string()});
    CHECK(r.code == kExitOk);
    CHECK(canonical_form(load_mesh(path)) == canonical_form(generate_unit_square(2)));
    std::filesystem::remove(path);
}

TEST_CASE("usage and config errors exit with 2")
{
    auto r = cli({"conv", "--config", "missing.cfg"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("missing.cfg") != std::string::npos);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"solve", "--q", "abc"}).code == kExitUsage);
    CHECK(cli({"solve", "--no-such-flag", "1"}).code == kExitUsage);

    const auto cfg = scratch("bad.cfg");
    {
        std::ofstream f(cfg);
        f << "[time]\nunknown_key = 1\n";
    }
    r = cli({"solve", "--config", cfg.string()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("unknown_key") != std::string::npos);
    std::filesystem::remove(cfg);
}

TEST_CASE("flags override the config file")
{
    const auto cfg = scratch("override.cfg");
    const auto dir = scratch("override_out");
    {
        std::ofstream f(cfg);
        f << "[study]\ncount = 10\nseed = 5\n";
    }
    const auto r = cli({"lemma42", "--config", cfg.string(), "--count", "20", "--output-dir", dir.string()});
    CHECK(r.code == kExitOk);
    std::ifstream f(dir / "report.json");
    const auto j = Json::parse(f);
    CHECK(j["config"]["count"] == 20);
    CHECK(j["config"]["seed"] == 5);
    std::filesystem::remove(cfg);
    std::filesystem::remove_all(dir);
}

TEST_CASE("failed acceptance window exits with 1")
{
    const auto dir = scratch("greens");
    const auto r = cli({"greens", "--n", "4,8", "--fine-levels", "0", "--window-tight", "-1", "--output-dir",
                        dir.string()});
    CHECK(r.code == kExitCheckFailed);
    CHECK(r.out.find("FAIL") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "plot.svg"));
    std::filesystem::remove_all(dir);
}
