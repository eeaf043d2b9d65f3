#include "heatwave/config.hpp"
#include "heatwave/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace heatwave;

TEST_CASE("config text with sections and comments")
{
    RunConfig cfg;
    apply_config_text(cfg, R"(
# ladder
experiment = conv
[mesh]
n = 8, 16 ,32
[time]
T = 2.5   # final time
q = 2
[weight]
x0 = 0.25, 0.75
k_list = 1, 2
[sector]
norms = L2, weighted_Hm1
)");
    CHECK(cfg.experiment == "conv");
    CHECK(cfg.n == std::vector<int>{8, 16, 32});
    CHECK(cfg.T == 2.5);
    CHECK(cfg.q == 2);
    REQUIRE(cfg.x0.has_value());
    CHECK(cfg.x0->x == 0.25);
    CHECK(cfg.x0->y == 0.75);
    CHECK(cfg.k_list == std::vector<double>{1.0, 2.0});
    CHECK(cfg.norms == std::vector<std::string>{"L2", "weighted_Hm1"});
}

TEST_CASE("config errors carry line numbers")
{
    RunConfig cfg;
    try {
        apply_config_text(cfg, "q = 1\nbogus = 3\n");
        FAIL("no throw");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(apply_config_text(cfg, "[time]\nn = 4\n"), ParseError);
    CHECK_THROWS_AS(apply_config_text(cfg, "[nowhere]\n"), ParseError);
    CHECK_THROWS_AS(apply_config_text(cfg, "q 1\n"), ParseError);
    CHECK_THROWS_AS(apply_config_text(cfg, "q = one\n"), ParseError);
    CHECK_THROWS_AS(apply_config_text(cfg, "partition = random\n"), ParseError);
    CHECK_THROWS_AS(apply_config_text(cfg, "x0 = 0.5\n"), ParseError);
    CHECK_THROWS_AS(apply_config_text(cfg, "[mesh\n"), ParseError);
}

TEST_CASE("missing config file names the path")
{
    RunConfig cfg;
    try {
        apply_config_file(cfg, "no/such/file.cfg");
        FAIL("no throw");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("no/such/file.cfg") != std::string::npos);
    }
}

TEST_CASE("config file round trip through echo")
{
    const auto path = std::filesystem::temp_directory_path() / "heatwave_test.cfg";
    {
        std::ofstream f(path);
        f << "[study]\nseed = 42\nsolution = kink\n[output]\noutput_dir = somewhere\n";
    }
    RunConfig cfg;
    apply_config_file(cfg, path);
    const auto j = echo(cfg);
    CHECK(j["seed"] == 42);
    CHECK(j["solution"] == "kink");
    CHECK(j["output_dir"] == "somewhere");
    CHECK(j["x0"].is_null());
    CHECK(j.size() == config_fields().size());
    std::filesystem::remove(path);
}

TEST_CASE("flag names and single values")
{
    CHECK(kebab("window_tight") == "window-tight");
    RunConfig cfg;
    set_config_value(cfg, "kink-amplitude", "3");
    CHECK(cfg.kink_amplitude == 3.0);
    set_config_value(cfg, "eig_method", "power");
    CHECK(cfg.eig_method == "power");
    CHECK_THROWS_AS(set_config_value(cfg, "nonsense", "1"), ValidationError);
    CHECK_THROWS_AS(set_config_value(cfg, "n", "0"), ValidationError);
    CHECK_THROWS_AS(set_config_value(cfg, "seed", "-1"), ValidationError);
    for (const auto& f : config_fields()) {
        CHECK(!f.section.empty());
        CHECK(!f.help.empty());
    }
}
