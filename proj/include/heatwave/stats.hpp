#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace heatwave {

/// y = C g(x)^p with g chosen by the tag:
///   constant  g = 1 (p = 0)
///   ln_h_pow  g = |ln x|, x = h
///   ln_Tk     g = ln x,   x = T/k
///   product   g = x,      x = l_k * l_h precomputed by the caller
///   power     g = x       (plain power law, p is the log-log slope)
enum class ModelTag { constant, ln_h_pow, ln_Tk, product, power };

std::string to_string(ModelTag t);
ModelTag parse_model_tag(const std::string& s);

struct LogModel {
    ModelTag tag = ModelTag::constant;
    double C = 0.0;
    double p = 0.0;
    double residual = 0.0; // max |y / fit - 1|
    bool p_fixed = false;
};

/// Least squares in the log domain. With fixed_p only C is fitted.
/// Throws ValidationError for fewer than 2 points (3 when p is free),
/// nonpositive data or a degenerate abscissa.
LogModel fit_log_constant(const std::vector<std::pair<double, double>>& points, ModelTag tag,
                          std::optional<double> fixed_p = std::nullopt);

/// Slope of log y against log x by least squares.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// max / min - 1 over positive values.
double spread(const std::vector<double>& v);

/// Largest increase along the sequence: max over i < j of v_j / v_i - 1, floored at 0.
double growth(const std::vector<double>& v);

/// Experimental order of convergence between two levels.
double eoc(double e_coarse, double e_fine, double h_coarse, double h_fine);

} // namespace heatwave
