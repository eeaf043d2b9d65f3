#pragma once

#include "heatwave/fem.hpp"
#include "heatwave/timestepping.hpp"
#include "heatwave/weight.hpp"

#include <Eigen/Core>

namespace heatwave {

enum class Direction { x, y };

Direction parse_direction(const std::string& s);

/// Degree-r polynomial on the host cell tau0 reproducing point values at x0:
/// (chi, delta)_{tau0} = chi(x0) for every chi of degree <= r on tau0.
/// Coefficients are taken in the local Lagrange basis of tau0.
struct SmoothedDelta {
    int cell = -1;
    Eigen::VectorXd local_coeffs;
    Point2 x0;
    int r = 1;
    std::array<Point2, 3> tri;
    double area = 0.0;

    /// Value and gradient at p; zero outside tau0.
    [[nodiscard]] double value(Point2 p) const;
    [[nodiscard]] Vec2 gradient(Point2 p) const;
    [[nodiscard]] bool contains(Point2 p) const;
};

/// Throws DomainError when x0 is outside the mesh.
SmoothedDelta build_smoothed_delta(const FeSpace& s, Point2 x0);

/// max over local basis chi of |(chi, delta) - chi(x0)|.
double moment_residual(const FeSpace& s, const SmoothedDelta& d);

/// delta as a cellwise function on mesh m. m must be the host mesh or a
/// refinement of it (cells of m either inside tau0 or outside it); throws
/// ValidationError otherwise.
Evaluable delta_evaluable(const SmoothedDelta& d, const Mesh& m);

/// Load vector l(chi) = -(delta, d chi/d dir)_{tau0} over interior basis functions.
Eigen::VectorXd delta_derivative_load(const FeSpace& s, const SmoothedDelta& d, Direction dir);

/// P_h(D delta).
NodalField delta_derivative_field(const SpacePtr& s, const SmoothedDelta& d, Direction dir);

/// g_h with -Delta_h g_h = P_h(D delta).
NodalField discrete_green(const SpacePtr& s, const SmoothedDelta& d, Direction dir);

/// Degree-q polynomial on one slab with (theta, phi)_{I_m} = phi(t~) for
/// every phi of degree <= q. Stored in the L2(I_m)-orthonormal Legendre basis.
struct TimeDelta {
    int slab = 0; // 1-based slab index m with t~ in (t_{m-1}, t_m]
    double t_tilde = 0.0;
    double t_left = 0.0;
    double k = 0.0;
    int q = 0;
    Eigen::VectorXd coeffs;

    [[nodiscard]] double value(double t) const;
    [[nodiscard]] double l1_norm() const;
};

/// Throws DomainError unless t~ lies in (0, T].
TimeDelta build_time_delta(const TimePartition& tp, int q, double t_tilde);

/// Orthonormal Legendre polynomials on [0,1]: sqrt(2i+1) P_i(2 tau - 1).
double legendre_unit(int i, double tau);

} // namespace heatwave
