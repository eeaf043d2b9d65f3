#include "heatwave/report.hpp"

#include "heatwave/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

namespace heatwave {

ReportRow& ReportRow::set(const std::string& name, double v)
{
    for (auto& [n, x] : metrics) {
        if (n == name) {
            x = v;
            return *this;
        }
    }
    metrics.emplace_back(name, v);
    return *this;
}

double ReportRow::get(const std::string& name) const
{
    for (const auto& [n, x] : metrics) {
        if (n == name) {
            return x;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

bool ReportRow::has(const std::string& name) const
{
    return std::any_of(metrics.begin(), metrics.end(), [&](const auto& m) { return m.first == name; });
}

ReportRow& ExperimentReport::add_row(double h, double k, int q, int r)
{
    rows.push_back(ReportRow{h, k, q, r, {}, {}});
    return rows.back();
}

Check& ExperimentReport::check(const std::string& name, double value, double threshold, bool upper,
                               const std::string& detail)
{
    const bool ok = std::isfinite(value) && (upper ? value <= threshold : value >= threshold);
    checks.push_back(Check{name, ok, value, threshold, upper, detail});
    return checks.back();
}

bool ExperimentReport::all_passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

bool excluded(const ReportRow& r)
{
    return std::any_of(r.flags.begin(), r.flags.end(), [](const std::string& f) { return f.rfind(kExcluded, 0) == 0; });
}

} // namespace

std::vector<double> ExperimentReport::column(const std::string& metric, bool include_excluded) const
{
    std::vector<double> out;
    for (const auto& r : rows) {
        if (r.has(metric) && (include_excluded || !excluded(r))) {
            out.push_back(r.get(metric));
        }
    }
    return out;
}

std::vector<double> ExperimentReport::h_column(const std::string& metric, bool include_excluded) const
{
    std::vector<double> out;
    for (const auto& r : rows) {
        if (r.has(metric) && (include_excluded || !excluded(r))) {
            out.push_back(r.h);
        }
    }
    return out;
}

std::string code_version()
{
#ifdef HEATWAVE_VERSION
    return HEATWAVE_VERSION;
#else
    return "0.1.0";
#endif
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

// JSON has no NaN/inf; encode them as strings.
Json num(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    if (std::isnan(v)) {
        return "nan";
    }
    return v > 0 ? "inf" : "-inf";
}

double from_num(const Json& j)
{
    if (j.is_number()) {
        return j.get<double>();
    }
    const auto s = j.get<std::string>();
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

Json to_json(const ExperimentReport& r, bool with_timestamp)
{
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["experiment"] = r.experiment;
    j["config"] = r.config;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json jr;
        jr["h"] = num(row.h);
        jr["k"] = num(row.k);
        jr["q"] = row.q;
        jr["r"] = row.r;
        Json m = Json::object();
        for (const auto& [n, v] : row.metrics) {
            m[n] = num(v);
        }
        jr["metrics"] = m;
        jr["flags"] = row.flags;
        rows.push_back(jr);
    }
    j["rows"] = rows;
    Json fits = Json::array();
    for (const auto& f : r.fits) {
        fits.push_back({{"name", f.name},
                        {"model", to_string(f.model.tag)},
                        {"C", num(f.model.C)},
                        {"p", num(f.model.p)},
                        {"p_fixed", f.model.p_fixed},
                        {"residual", num(f.model.residual)}});
    }
    j["fits"] = fits;
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"value", num(c.value)},
                          {"threshold", num(c.threshold)},
                          {"direction", c.upper ? "<=" : ">="},
                          {"detail", c.detail}});
    }
    j["checks"] = checks;
    j["notes"] = r.notes;
    Json prov;
    prov["code_version"] = r.code_version;
    if (with_timestamp) {
        prov["timestamp"] = r.timestamp;
    }
    j["provenance"] = prov;
    return j;
}

ExperimentReport report_from_json(const Json& j)
{
    if (!j.contains("schema_version")) {
        throw ValidationError("report lacks schema_version");
    }
    if (j["schema_version"].get<int>() != kSchemaVersion) {
        throw ValidationError("unsupported report schema_version " + j["schema_version"].dump());
    }
    ExperimentReport r;
    r.experiment = j.at("experiment").get<std::string>();
    r.config = j.at("config");
    for (const auto& jr : j.at("rows")) {
        auto& row = r.add_row(from_num(jr.at("h")), from_num(jr.at("k")), jr.at("q").get<int>(), jr.at("r").get<int>());
        for (const auto& [n, v] : jr.at("metrics").items()) {
            row.metrics.emplace_back(n, from_num(v));
        }
        row.flags = jr.at("flags").get<std::vector<std::string>>();
    }
    for (const auto& jf : j.at("fits")) {
        LogModel m;
        m.tag = parse_model_tag(jf.at("model").get<std::string>());
        m.C = from_num(jf.at("C"));
        m.p = from_num(jf.at("p"));
        m.p_fixed = jf.value("p_fixed", false);
        m.residual = from_num(jf.at("residual"));
        r.fits.push_back({jf.at("name").get<std::string>(), m});
    }
    if (j.contains("checks")) {
        for (const auto& jc : j["checks"]) {
            r.checks.push_back(Check{jc.at("name").get<std::string>(), jc.at("passed").get<bool>(),
                                     from_num(jc.at("value")), from_num(jc.at("threshold")),
                                     jc.at("direction").get<std::string>() == "<=", jc.value("detail", "")});
        }
    }
    if (j.contains("notes")) {
        r.notes = j["notes"].get<std::vector<std::string>>();
    }
    if (j.contains("provenance")) {
        r.code_version = j["provenance"].value("code_version", "");
        r.timestamp = j["provenance"].value("timestamp", "");
    }
    return r;
}

std::string to_csv(const ExperimentReport& r)
{
    std::vector<std::string> cols;
    for (const auto& row : r.rows) {
        for (const auto& [n, v] : row.metrics) {
            if (std::find(cols.begin(), cols.end(), n) == cols.end()) {
                cols.push_back(n);
            }
        }
    }
    std::ostringstream os;
    os << "h,k,q,r";
    for (const auto& c : cols) {
        os << ',' << c;
    }
    os << ",flags\n";
    for (const auto& row : r.rows) {
        os << fmt17(row.h) << ',' << fmt17(row.k) << ',' << row.q << ',' << row.r;
        for (const auto& c : cols) {
            os << ',';
            if (row.has(c)) {
                os << fmt17(row.get(c));
            }
        }
        os << ',';
        for (std::size_t i = 0; i < row.flags.size(); ++i) {
            std::string f = row.flags[i];
            std::replace(f.begin(), f.end(), ',', ';');
            os << (i ? "|" : "") << f;
        }
        os << '\n';
    }
    return os.str();
}

std::string to_svg(const ExperimentReport& r)
{
    constexpr double W = 720, H = 480, L = 80, R = 200, T = 30, B = 60;
    struct Series {
        std::string name;
        std::vector<double> x, y;
    };
    std::vector<Series> series;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& m : r.plot_metrics) {
        Series s{m, {}, {}};
        for (const auto& row : r.rows) {
            const double v = row.get(m);
            if (row.h > 0.0 && std::isfinite(v) && v > 0.0) {
                s.x.push_back(std::log10(row.h));
                s.y.push_back(std::log10(v));
            }
        }
        if (s.x.empty()) {
            continue;
        }
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
        series.push_back(std::move(s));
    }
    if (series.empty()) {
        xmin = -2, xmax = 0, ymin = -2, ymax = 0;
    }
    xmin = std::floor(xmin * 10) / 10 - 0.05;
    xmax = std::ceil(xmax * 10) / 10 + 0.05;
    ymin = std::floor(ymin) - 0.1;
    ymax = std::ceil(ymax) + 0.1;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return T + (ymax - y) / (ymax - ymin) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<title>" << r.experiment << "</title>\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int e = static_cast<int>(std::ceil(ymin)); e <= static_cast<int>(std::floor(ymax)); ++e) {
        os << "<line x1=\"" << L << "\" y1=\"" << py(e) << "\" x2=\"" << W - R << "\" y2=\"" << py(e)
           << "\" stroke=\"#ddd\"/>\n";
        os << "<text x=\"" << L - 6 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    for (const auto& row : r.rows) {
        if (row.h > 0.0) {
            const double x = px(std::log10(row.h));
            os << "<text x=\"" << x << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << fmt17(row.h).substr(0, 6)
               << "</text>\n";
        }
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">h</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* c = colors[i % 7];
        os << "<polyline class=\"series\" data-name=\"" << s.name << "\" fill=\"none\" stroke=\"" << c
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < s.x.size(); ++j) {
            os << (j ? " " : "") << px(s.x[j]) << ',' << py(s.y[j]);
        }
        os << "\"/>\n";
        for (std::size_t j = 0; j < s.x.size(); ++j) {
            os << "<circle cx=\"" << px(s.x[j]) << "\" cy=\"" << py(s.y[j]) << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
        }
        if (s.x.size() >= 2) {
            // least-squares slope through the series, drawn dashed
            double mx = 0, my = 0;
            for (std::size_t j = 0; j < s.x.size(); ++j) {
                mx += s.x[j];
                my += s.y[j];
            }
            mx /= s.x.size();
            my /= s.x.size();
            double sxx = 0, sxy = 0;
            for (std::size_t j = 0; j < s.x.size(); ++j) {
                sxx += (s.x[j] - mx) * (s.x[j] - mx);
                sxy += (s.x[j] - mx) * (s.y[j] - my);
            }
            const double p = sxx > 0 ? sxy / sxx : 0.0;
            const double x0 = s.x.front(), x1 = s.x.back();
            os << "<line class=\"reference\" x1=\"" << px(x0) << "\" y1=\"" << py(my + p * (x0 - mx)) << "\" x2=\""
               << px(x1) << "\" y2=\"" << py(my + p * (x1 - mx)) << "\" stroke=\"" << c
               << "\" stroke-dasharray=\"5,4\" stroke-width=\"1\"/>\n";
            os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 14 + 28 * i << "\" fill=\"" << c << "\">" << s.name
               << "</text>\n";
            os << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 27 + 28 * i << "\" fill=\"" << c << "\">slope "
               << std::round(p * 100) / 100 << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream f(p, std::ios::binary);
    if (!f) {
        throw Error("cannot write " + p.string());
    }
    f << text;
    if (!f) {
        throw Error("write failed for " + p.string());
    }
}

} // namespace

void emit(const ExperimentReport& r, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    write_file(dir / "report.json", to_json(r).dump(2) + "\n");
    write_file(dir / "tables.csv", to_csv(r));
    if (!r.plot_metrics.empty()) {
        write_file(dir / "plot.svg", to_svg(r));
    }
}

} // namespace heatwave
