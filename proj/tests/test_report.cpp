#include "heatwave/errors.hpp"
#include "heatwave/report.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>

using namespace heatwave;

TEST_CASE("log model recovery")
{
    std::vector<std::pair<double, double>> pts;
    for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
        pts.emplace_back(h, 3.0 * std::sqrt(std::abs(std::log(h))));
    }
    const auto m = fit_log_constant(pts, ModelTag::ln_h_pow);
    CHECK(m.C == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(m.p == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.residual <= 1e-12);

    std::vector<std::pair<double, double>> flat{{0.1, 2.0}, {0.05, 2.0}, {0.025, 2.0}};
    const auto c = fit_log_constant(flat, ModelTag::ln_h_pow);
    CHECK(std::abs(c.p) <= 1e-12);
    CHECK(c.residual <= 1e-12);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> noise(-0.1, 0.1);
    std::vector<std::pair<double, double>> noisy;
    for (int i = 0; i < 40; ++i) {
        const double h = std::pow(2.0, -3.0 - i / 8.0);
        noisy.emplace_back(h, 2.0 * (1.0 + noise(rng)));
    }
    const auto nm = fit_log_constant(noisy, ModelTag::constant);
    CHECK(nm.residual <= 0.25);
    CHECK(nm.residual >= 0.05);

    std::vector<std::pair<double, double>> same{{0.1, 1.0}, {0.1, 2.0}, {0.1, 3.0}};
    CHECK_THROWS_AS(fit_log_constant(same, ModelTag::ln_h_pow), ValidationError);
    CHECK_THROWS_AS(fit_log_constant({{0.1, 1.0}}, ModelTag::ln_h_pow), ValidationError);
}

TEST_CASE("spread, growth, eoc")
{
    CHECK(spread({1.0, 1.2, 0.8}) == doctest::Approx(0.5));
    CHECK(growth({1.0, 0.8, 0.9}) == doctest::Approx(0.125));
    CHECK(growth({3.0, 2.0, 1.0}) == 0.0);
    CHECK(eoc(1.0, 0.25, 0.2, 0.1) == doctest::Approx(2.0));
}

namespace {

ExperimentReport sample_report()
{
    ExperimentReport r;
    r.experiment = "conv";
    r.config = {{"n", {8, 16}}, {"q", 1}};
    r.add_row(0.125, 0.125, 1, 1).set("E", 0.5).set("eoc", 1.0);
    r.add_row(0.0625, 0.0625, 1, 1).set("E", 0.25).set("other", 3.0);
    r.rows.back().flags.push_back(std::string(kExcluded) + " denominator below 1e-13");
    r.fits.push_back({"E", fit_log_constant({{0.1, 1.0}, {0.05, 1.1}}, ModelTag::constant)});
    r.check("spread", 0.1, 0.35);
    r.plot_metrics = {"E", "other"};
    r.code_version = code_version();
    r.timestamp = utc_timestamp();
    return r;
}

} // namespace

TEST_CASE("report json round trip and csv")
{
    const auto r = sample_report();
    const auto j = to_json(r);
    CHECK(j["schema_version"] == kSchemaVersion);
    const auto back = report_from_json(Json::parse(j.dump()));
    CHECK(to_json(back).dump() == j.dump());
    CHECK(r.column("E").size() == 1);
    CHECK(r.column("E", true).size() == 2);

    const auto csv = to_csv(r);
    CHECK(csv.rfind("h,k,q,r,E,eoc,other,flags\n", 0) == 0);
    CHECK(csv == to_csv(back));
    CHECK(csv.find("0.125,0.125,1,1,0.5,1,,") != std::string::npos);
}

TEST_CASE("svg has one polyline per series")
{
    const auto svg = to_svg(sample_report());
    const std::regex poly("<polyline class=\"series\"");
    const auto n = std::distance(std::sregex_iterator(svg.begin(), svg.end(), poly), std::sregex_iterator());
    CHECK(n == 2);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("emit writes files")
{
    const auto dir = std::filesystem::temp_directory_path() / "heatwave_emit_test";
    std::filesystem::remove_all(dir);
    emit(sample_report(), dir);
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "tables.csv"));
    CHECK(std::filesystem::exists(dir / "plot.svg"));
    std::filesystem::remove_all(dir);
}
