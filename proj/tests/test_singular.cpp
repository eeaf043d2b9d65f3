#include "heatwave/errors.hpp"
#include "heatwave/singular.hpp"

#include <doctest.h>

#include <cmath>

using namespace heatwave;

namespace {

SpacePtr space(int n, int r) { return build_space(std::make_shared<const Mesh>(generate_unit_square(n)), r); }

} // namespace

TEST_CASE("sigma")
{
    const auto w = make_weight({0.5, 0.5}, 4.0, 0.25);
    CHECK(sigma(w, {0.5, 0.5}) == doctest::Approx(1.0));
    const auto w2 = make_weight({0.0, 0.0}, 4.0, 0.25);
    CHECK(sigma(w2, {3.0, 0.0}) == doctest::Approx(std::sqrt(10.0)));
    CHECK(sigma(w2, {1.0, 0.0}) < sigma(w2, {2.0, 0.0}));
    CHECK(sigma_gradient(w2, {0.3, 0.7}).norm() <= 1.0);
    CHECK_THROWS_AS(make_weight({0, 0}, 0.0, 0.1), ValidationError);
}

TEST_CASE("smoothed delta moments")
{
    for (int r : {1, 2}) {
        auto s = space(8, r);
        const Point2 x0 = default_x0();
        const auto d = build_smoothed_delta(*s, x0);
        CHECK(moment_residual(*s, d) <= 1e-12);
        const auto& m = s->mesh();
        // (1, delta) = 1 and (x, delta) = x0.x by quadrature on tau0
        double m0 = 0.0, mx = 0.0, my = 0.0;
        for (const auto& q : element_rule(r).points) {
            const Point2 p = m.point_at(d.cell, q.bary);
            const double v = d.value(p) * q.weight * d.area;
            m0 += v;
            mx += v * p.x;
            my += v * p.y;
        }
        CHECK(std::abs(m0 - 1.0) <= 1e-12);
        CHECK(std::abs(mx - x0.x) <= 1e-12);
        CHECK(std::abs(my - x0.y) <= 1e-12);
        CHECK(build_smoothed_delta(*s, x0).cell == d.cell);
        CHECK(d.value({0.01, 0.01}) == 0.0);
    }
    CHECK_THROWS_AS(build_smoothed_delta(*space(4, 1), {1.2, 0.5}), DomainError);
}

TEST_CASE("derivative load pairs with linear functions")
{
    auto s = space(8, 1);
    const auto d = build_smoothed_delta(*s, default_x0());
    const auto lx = delta_derivative_load(*s, d, Direction::x);
    const auto ly = delta_derivative_load(*s, d, Direction::y);
    // chi = sum of hat functions with coefficients a*x + b*y + c at the nodes; on tau0 it is linear
    const auto chi = project(s, from_global([](Point2 p) { return 2.0 * p.x - 3.0 * p.y + 0.5; }),
                             ProjectionKind::nodal);
    // l(chi) = -(delta, d chi) = -d chi(x0)
    CHECK(std::abs(lx.dot(chi.coeffs) + 2.0) <= 1e-11);
    CHECK(std::abs(ly.dot(chi.coeffs) - 3.0) <= 1e-11);
    // constant on tau0 (all interior dofs equal one; tau0 is interior)
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(s->n_interior());
    CHECK(std::abs(lx.dot(ones)) <= 1e-11);
}

TEST_CASE("discrete Green field")
{
    auto s = space(8, 1);
    const auto d = build_smoothed_delta(*s, {0.5, 0.5});
    const auto f = delta_derivative_field(s, d, Direction::x);
    const auto g = discrete_green(s, d, Direction::x);
    const Eigen::VectorXd res = s->stiffness().apply(g.coeffs) - s->mass().apply(f.coeffs);
    CHECK(res.cwiseAbs().maxCoeff() <= 1e-10 * s->mass().apply(f.coeffs).cwiseAbs().maxCoeff());

    SmoothedDelta zero = d;
    zero.local_coeffs.setZero();
    CHECK(discrete_green(s, zero, Direction::y).coeffs.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(parse_direction("z"), ValidationError);
}

TEST_CASE("delta on a refined mesh")
{
    auto coarse = space(4, 2);
    const auto d = build_smoothed_delta(*coarse, default_x0());
    const auto fine = refine_uniform(refine_uniform(coarse->mesh()));
    const auto e = delta_evaluable(d, fine);
    const double mass = integrate(fine, e.value, 4);
    CHECK(std::abs(mass - 1.0) <= 1e-12);
    const auto other = generate_unit_square(7);
    CHECK_THROWS_AS(delta_evaluable(d, other), ValidationError);
}

TEST_CASE("temporal delta")
{
    const auto tp = build_partition(1.0, 8);
    const auto d0 = build_time_delta(tp, 0, 0.3);
    CHECK(d0.value(0.3) == doctest::Approx(8.0));
    CHECK(d0.l1_norm() == doctest::Approx(1.0));
    for (int q : {1, 2}) {
        for (double tt : {0.3, 0.375, 0.26}) {
            const auto d = build_time_delta(tp, q, tt);
            const auto rule = gauss_legendre(4);
            for (int pw = 0; pw <= q; ++pw) {
                double pair = 0.0;
                for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
                    const double t = d.t_left + d.k * rule.nodes[g];
                    pair += d.k * rule.weights[g] * d.value(t) * std::pow(t, pw);
                }
                CHECK(std::abs(pair - std::pow(tt, pw)) <= 1e-13 * std::max(1.0, std::abs(d.value(tt)) * d.k));
            }
            // L1 norm against a fine composite midpoint sum
            double l1 = 0.0;
            const int N = 200000;
            for (int i = 0; i < N; ++i) {
                l1 += std::abs(d.value(d.t_left + d.k * (i + 0.5) / N)) * d.k / N;
            }
            CHECK(d.l1_norm() == doctest::Approx(l1).epsilon(1e-6));
        }
    }
    // q = 1 at the right endpoint: theta = (6 tau - 2) / k... check the known kernel 4 - 6(1 - tau) scaled
    const auto d1 = build_time_delta(tp, 1, 0.25);
    CHECK(d1.value(0.25) == doctest::Approx(4.0 * 8.0));
    CHECK_THROWS_AS(build_time_delta(tp, 1, 0.0), DomainError);
    CHECK_THROWS_AS(build_time_delta(tp, 1, 1.5), DomainError);
}
