#include "heatwave/stats.hpp"

#include "heatwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heatwave {

std::string to_string(ModelTag t)
{
    switch (t) {
    case ModelTag::constant:
        return "const";
    case ModelTag::ln_h_pow:
        return "ln_h_pow";
    case ModelTag::ln_Tk:
        return "ln_Tk";
    case ModelTag::product:
        return "product";
    case ModelTag::power:
        return "power";
    }
    return "?";
}

ModelTag parse_model_tag(const std::string& s)
{
    for (const auto t : {ModelTag::constant, ModelTag::ln_h_pow, ModelTag::ln_Tk, ModelTag::product, ModelTag::power}) {
        if (to_string(t) == s) {
            return t;
        }
    }
    throw ValidationError("unknown model tag '" + s + "'");
}

namespace {

double regressor(ModelTag tag, double x)
{
    switch (tag) {
    case ModelTag::constant:
        return 1.0;
    case ModelTag::ln_h_pow:
        return std::abs(std::log(x));
    case ModelTag::ln_Tk:
        return std::log(x);
    case ModelTag::product:
    case ModelTag::power:
        return x;
    }
    return 1.0;
}

} // namespace

LogModel fit_log_constant(const std::vector<std::pair<double, double>>& points, ModelTag tag,
                          std::optional<double> fixed_p)
{
    LogModel m;
    m.tag = tag;
    if (tag == ModelTag::constant) {
        fixed_p = 0.0;
    }
    m.p_fixed = fixed_p.has_value();
    const std::size_t need = m.p_fixed ? 2 : 3;
    if (points.size() < need) {
        throw ValidationError("log fit needs at least " + std::to_string(need) + " points");
    }
    std::vector<double> lg, ly;
    for (const auto& [x, y] : points) {
        const double g = regressor(tag, x);
        if (!(y > 0.0) || !(g > 0.0) || !std::isfinite(y) || !std::isfinite(g)) {
            throw ValidationError("log fit needs positive finite data");
        }
        lg.push_back(std::log(g));
        ly.push_back(std::log(y));
    }
    const double n = static_cast<double>(lg.size());
    if (m.p_fixed) {
        m.p = *fixed_p;
        double s = 0.0;
        for (std::size_t i = 0; i < lg.size(); ++i) {
            s += ly[i] - m.p * lg[i];
        }
        m.C = std::exp(s / n);
    } else {
        double mg = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lg.size(); ++i) {
            mg += lg[i];
            my += ly[i];
        }
        mg /= n;
        my /= n;
        double sgg = 0.0, sgy = 0.0;
        for (std::size_t i = 0; i < lg.size(); ++i) {
            sgg += (lg[i] - mg) * (lg[i] - mg);
            sgy += (lg[i] - mg) * (ly[i] - my);
        }
        if (sgg <= 1e-24 * std::max(1.0, mg * mg)) {
            throw ValidationError("degenerate abscissa in log fit");
        }
        m.p = sgy / sgg;
        m.C = std::exp(my - m.p * mg);
    }
    for (std::size_t i = 0; i < lg.size(); ++i) {
        const double fit = m.C * std::exp(m.p * lg[i]);
        m.residual = std::max(m.residual, std::abs(std::exp(ly[i]) / fit - 1.0));
    }
    return m;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        pts.emplace_back(x[i], y[i]);
    }
    if (pts.size() == 2) {
        return std::log(y[1] / y[0]) / std::log(x[1] / x[0]);
    }
    return fit_log_constant(pts, ModelTag::power).p;
}

double spread(const std::vector<double>& v)
{
    if (v.empty()) {
        return 0.0;
    }
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo - 1.0;
}

double growth(const std::vector<double>& v)
{
    double g = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (const double x : v) {
        if (lo < std::numeric_limits<double>::infinity()) {
            g = std::max(g, x / lo - 1.0);
        }
        lo = std::min(lo, x);
    }
    return g;
}

double eoc(double e_coarse, double e_fine, double h_coarse, double h_fine)
{
    return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

} // namespace heatwave
