#pragma once

#include "heatwave/mesh.hpp"

#include <Eigen/Core>

namespace heatwave {

/// Regularized distance sigma(x) = sqrt(|x - x0|^2 + K^2 h^2).
struct WeightSpec {
    Point2 x0;
    double K = 4.0;
    double h = 0.0;
    int N = 2;
};

/// Throws ValidationError unless K > 0 and h > 0.
WeightSpec make_weight(Point2 x0, double K, double h);

double sigma(const WeightSpec& w, Point2 p);
Eigen::Vector2d sigma_gradient(const WeightSpec& w, Point2 p);

/// Generic interior point of the unit square, (1/2 + 1/(2 pi), 1/2 + 1/(2 e)).
Point2 default_x0();

} // namespace heatwave
