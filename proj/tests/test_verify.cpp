#include "heatwave/errors.hpp"
#include "heatwave/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace heatwave;

TEST_CASE("sample times per slab")
{
    const auto t0 = sample_taus(0);
    CHECK(t0.size() == 9);
    CHECK(t0.back() == 1.0);
    const auto t2 = sample_taus(2);
    CHECK(std::is_sorted(t2.begin(), t2.end()));
    for (double n : temporal_basis(2).nodes) {
        CHECK(std::any_of(t2.begin(), t2.end(), [n](double t) { return std::abs(t - n) < 1e-14; }));
    }
}

TEST_CASE("manufactured solutions are consistent")
{
    const auto u = smooth_solution();
    auto s = build_space(unit_square(4), 1);
    const auto prob = u.problem(s);
    CHECK(manufactured_defect(prob, 1.0) <= 1e-12);

    const Point2 c{0.75, 0.75};
    const auto k = kink_solution(c, 5.0);
    const double eps = 1e-6;
    for (Point2 x : {Point2{0.7, 0.8}, Point2{0.3, 0.4}, Point2{0.81, 0.7}}) {
        const double t = 0.4;
        const Vec2 g = k.exact->gradient(t, x);
        const double dx = (k.exact->value(t, {x.x + eps, x.y}) - k.exact->value(t, {x.x - eps, x.y})) / (2 * eps);
        const double dy = (k.exact->value(t, {x.x, x.y + eps}) - k.exact->value(t, {x.x, x.y - eps})) / (2 * eps);
        CHECK(g[0] == doctest::Approx(dx).epsilon(1e-6));
        CHECK(g[1] == doctest::Approx(dy).epsilon(1e-6));
        const double dt = (k.exact->value(t + eps, x) - k.exact->value(t - eps, x)) / (2 * eps);
        CHECK(k.exact->time_derivative(t, x) == doctest::Approx(dt).epsilon(1e-6));
    }
    for (double a : {0.0, 0.3, 1.0}) {
        CHECK(std::abs(k.exact->value(0.2, {a, 1.0})) <= 1e-15);
        CHECK(std::abs(k.exact->value(0.2, {1.0, a})) <= 1e-15);
    }
    CHECK_THROWS_AS(kink_solution({1.0, 0.5}, 1.0), ValidationError);
}

TEST_CASE("space-time sampling serial and parallel agree")
{
    auto s = build_space(unit_square(4), 2);
    const auto tp = build_partition(1.0, 4);
    const auto u = smooth_solution();
    const auto sol = dg_solve(s, tp, 1, u.problem(s));
    const auto chi = interpolant(s, tp, 1, u);
    const auto a = spacetime_sup_errors({&sol, &chi}, u, 0, {}, Exec::serial);
    const auto b = spacetime_sup_errors({&sol, &chi}, u, 0, {}, Exec::parallel);
    CHECK(a[0].grad == b[0].grad);
    CHECK(a[1].value == b[1].value);
    const auto c = spacetime_l2_errors({&sol}, u, 0, Exec::serial);
    const auto d = spacetime_l2_errors({&sol}, u, 0, Exec::parallel);
    CHECK(c[0].grad == d[0].grad);
    // A ball sup never exceeds the global one.
    const auto ball = spacetime_sup_errors({&sol}, u, 2, Region{Point2{0.5, 0.5}, 0.2});
    CHECK(ball[0].grad <= a[0].grad);
}

TEST_CASE("interpolant matches the exact solution at Radau nodes")
{
    auto s = build_space(unit_square(4), 1);
    const auto tp = build_partition(1.0, 4);
    const auto u = smooth_solution();
    const auto chi = interpolant(s, tp, 1, u);
    const double t = tp.t[1] + temporal_basis(1).nodes[0] * tp.step(2);
    const Point2 x = s->dof_points()[s->interior_dofs()[0]];
    CHECK(eval_value(chi, t, x) == doctest::Approx(u.exact->value(t, x)).epsilon(1e-13));
    CHECK_THROWS_AS(interpolant(s, tp, 1, discrete_solution(s, 1)), ValidationError);
}

TEST_CASE("discrete solutions are reproduced and flagged")
{
    RunConfig cfg;
    cfg.solution = "discrete";
    cfg.n = {4};
    cfg.q = 1;
    const auto conv = conv_study(cfg);
    CHECK(conv.all_passed());
    CHECK(conv.rows.front().get("E_grad") <= 1e-10);
    cfg.n = {4, 8, 16};
    const auto ba = best_approx_ratio(cfg);
    REQUIRE(ba.rows.size() == 3);
    for (const auto& r : ba.rows) {
        REQUIRE(!r.flags.empty());
        CHECK(r.flags.front().rfind(kExcluded, 0) == 0);
    }
    CHECK(ba.checks.empty());
}

TEST_CASE("interior hypotheses are enforced")
{
    RunConfig cfg;
    cfg.n = {8};
    CHECK_THROWS_AS(interior_study(cfg), ValidationError); // d = 0.36 <= 4 sqrt(2)/8
    cfg.n = {16};
    cfg.d = 0.5;
    CHECK_THROWS_AS(interior_study(cfg), ValidationError); // ball leaves the domain
}

TEST_CASE("reports are deterministic apart from the timestamp")
{
    RunConfig cfg;
    cfg.count = 5000;
    CHECK(to_json(lemma42_study(cfg), false).dump() == to_json(lemma42_study(cfg), false).dump());
    RunConfig g;
    g.n = {4, 8};
    g.fine_levels = 1;
    CHECK(to_json(greens_norm_scan(g), false).dump() == to_json(greens_norm_scan(g), false).dump());
    CHECK_THROWS_AS(run_experiment("nope", cfg), ValidationError);
}

TEST_CASE("resolvent oracle on the coarse mesh")
{
    RunConfig cfg;
    const auto rep = resolvent_oracle(cfg);
    CHECK(rep.rows.size() == 24);
    CHECK(rep.all_passed());
}
