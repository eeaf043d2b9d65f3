#pragma once

#include "heatwave/stats.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace heatwave {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct ReportRow {
    double h = 0.0;
    double k = 0.0;
    int q = 0;
    int r = 0;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> flags; // exclusion reasons and notes

    ReportRow& set(const std::string& name, double v);
    [[nodiscard]] double get(const std::string& name) const; // NaN when absent
    [[nodiscard]] bool has(const std::string& name) const;
};

struct FitRecord {
    std::string name;
    LogModel model;
};

/// Acceptance window evaluated by a driver. `value` is compared against
/// `threshold` in the direction given by `upper` (value <= threshold).
struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    bool upper = true;
    std::string detail;
};

struct ExperimentReport {
    std::string experiment;
    Json config = Json::object();
    std::vector<ReportRow> rows;
    std::vector<FitRecord> fits;
    std::vector<Check> checks;
    std::vector<std::string> notes;
    /// Metrics drawn in plot.svg against h; empty for non-ladder experiments.
    std::vector<std::string> plot_metrics;
    std::string code_version;
    std::string timestamp;

    ReportRow& add_row(double h, double k, int q, int r);
    Check& check(const std::string& name, double value, double threshold, bool upper = true,
                 const std::string& detail = "");
    [[nodiscard]] bool all_passed() const;
    /// Column of a metric over rows that carry it and are not flagged excluded.
    [[nodiscard]] std::vector<double> column(const std::string& metric, bool include_excluded = false) const;
    [[nodiscard]] std::vector<double> h_column(const std::string& metric, bool include_excluded = false) const;
};

/// Flag prefix marking a row as excluded from fits.
inline constexpr const char* kExcluded = "excluded:";

std::string code_version();
std::string utc_timestamp();

Json to_json(const ExperimentReport& r, bool with_timestamp = true);
ExperimentReport report_from_json(const Json& j);
/// Header row then one record per row, 17 significant digits, stable column order.
std::string to_csv(const ExperimentReport& r);
/// Log-log plot of plot_metrics against h with dashed least-squares reference slopes.
std::string to_svg(const ExperimentReport& r);

/// Writes report.json, tables.csv and (for ladder studies) plot.svg. Throws Error on I/O failure.
void emit(const ExperimentReport& r, const std::filesystem::path& dir);

/// printf("%.17g").
std::string fmt17(double v);

} // namespace heatwave
