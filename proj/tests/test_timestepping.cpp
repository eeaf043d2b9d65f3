#include "heatwave/errors.hpp"
#include "heatwave/timestepping.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace heatwave;

namespace {

SparseSym scalar(double v)
{
    SparseMatrix a(1, 1);
    a.insert(0, 0) = v;
    return SparseSym(a);
}

SpacePtr space(int n, int r) { return build_space(std::make_shared<const Mesh>(generate_unit_square(n)), r); }

double pade11(double z) { return (1.0 - z / 3.0) / (1.0 + 2.0 * z / 3.0 + z * z / 6.0); }

const double kPi = std::numbers::pi;

} // namespace

TEST_CASE("partitions")
{
    const auto u = build_partition(1.0, 8);
    CHECK(u.k == doctest::Approx(0.125));
    CHECK(u.k_min == doctest::Approx(0.125));
    CHECK(u.kappa == 1.0);
    CHECK_THROWS_AS(build_partition(1.0, 2), ValidationError);
    const auto g = build_partition(1.0, 10, PartitionKind::geometric, 1.2);
    CHECK(g.kappa == doctest::Approx(1.2));
    CHECK(g.t.back() == 1.0);
    CHECK(u.slab_of(0.125) == 1);
    CHECK(u.slab_of(0.126) == 2);
    CHECK(u.slab_of(1.0) == 8);
    CHECK_THROWS_AS(u.slab_of(0.0), DomainError);
}

TEST_CASE("temporal basis")
{
    for (int q : {0, 1, 2}) {
        const auto& b = temporal_basis(q);
        for (int j = 0; j <= q; ++j) {
            for (int i = 0; i <= q; ++i) {
                CHECK(b.value(j, b.nodes[i]) == doctest::Approx(i == j ? 1.0 : 0.0));
            }
        }
        CHECK(b.S.sum() == doctest::Approx(1.0));
        // summation by parts: D + D^T = l(1) l(1)^T - l(0) l(0)^T
        const Eigen::MatrixXd sbp = b.D + b.D.transpose() - (b.at1 * b.at1.transpose() - b.at0 * b.at0.transpose());
        CHECK(sbp.cwiseAbs().maxCoeff() <= 1e-14);
    }
    CHECK_THROWS_AS(temporal_basis(3), ValidationError);
}

TEST_CASE("scalar oracle")
{
    const double lambda = 1.0;
    const auto M = scalar(1.0), A = scalar(lambda);
    const Eigen::VectorXd u0 = Eigen::VectorXd::Ones(1);
    {
        const auto tp = build_partition(1.0, 10);
        const auto b = dg_solve_algebraic(M, A, tp, 0, {}, u0);
        CHECK(std::abs(b[0](0, 0) - 1.0 / 1.1) <= 1e-15);
        CHECK(std::abs(b.back()(0, 0) - std::pow(1.1, -10)) <= 1e-12);
    }
    for (auto method : {BlockSolve::diagonalized, BlockSolve::block}) {
        const auto tp = build_partition(2.0, 16);
        const double z = tp.k * lambda;
        const auto b = dg_solve_algebraic(M, A, tp, 1, {}, u0, {method});
        for (int m = 1; m <= 16; ++m) {
            CHECK(std::abs(b[m - 1](0, 1) - std::pow(pade11(z), m)) <= 1e-10);
        }
    }
}

TEST_CASE("scalar superconvergence at nodes")
{
    const auto M = scalar(1.0), A = scalar(1.0);
    const Eigen::VectorXd u0 = Eigen::VectorXd::Ones(1);
    for (int q : {0, 1}) {
        std::vector<double> ks, es;
        for (int Mn : {8, 16, 32, 64}) {
            const auto tp = build_partition(1.0, Mn);
            const auto b = dg_solve_algebraic(M, A, tp, q, {}, u0);
            ks.push_back(tp.k);
            es.push_back(std::abs(b.back()(0, q) - std::exp(-1.0)));
        }
        const double slope = std::log(es.front() / es.back()) / std::log(ks.front() / ks.back());
        CHECK(std::abs(slope - (2 * q + 1)) <= 0.3);
    }
}

TEST_CASE("diagonalized and block paths agree")
{
    auto s = space(4, 2);
    const auto tp = build_partition(1.0, 6, PartitionKind::geometric, 1.1);
    ProblemSpec prob;
    prob.u0 = from_global([](Point2 p) { return p.x * (1 - p.x) * p.y * (1 - p.y); });
    prob.f = [](double t, const CellPoint& p) { return std::cos(3 * t) * p.x.x * p.x.y; };
    for (int q : {0, 1, 2}) {
        const auto a = dg_solve(s, tp, q, prob, {BlockSolve::diagonalized});
        const auto b = dg_solve(s, tp, q, prob, {BlockSolve::block});
        for (int m = 0; m < tp.M(); ++m) {
            CHECK((a.blocks[m] - b.blocks[m]).cwiseAbs().maxCoeff() <= 1e-12);
        }
        const auto rep = dg_residual(a, prob);
        CHECK(rep.primal <= 1e-9);
        CHECK(rep.dual <= 1e-9);
        CHECK(rep.agreement <= 1e-11);
    }
}

TEST_CASE("residual detects perturbation and forms agree on random fields")
{
    auto s = space(4, 1);
    const auto tp = build_partition(1.0, 8);
    ProblemSpec prob;
    prob.u0 = from_global([](Point2 p) { return std::sin(kPi * p.x) * std::sin(kPi * p.y); });
    prob.f = [](double, const CellPoint&) { return 1.0; };
    auto u = dg_solve(s, tp, 1, prob);
    CHECK(dg_residual(u, prob).primal <= 1e-9);
    u.blocks[3](2, 0) += 1e-3;
    CHECK(dg_residual(u, prob).primal > 1e-6);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (auto& b : u.blocks) {
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            b.data()[i] = nd(rng);
        }
    }
    CHECK(dg_residual(u, prob).agreement <= 1e-11);
}

TEST_CASE("discrete invariance")
{
    for (int r : {1, 2}) {
        for (int q : {0, 1, 2}) {
            auto s = space(4, r);
            const auto tp = build_partition(1.0, 5);
            std::mt19937_64 rng(11);
            std::normal_distribution<double> nd;
            Eigen::VectorXd v(s->n_interior());
            for (auto& x : v) {
                x = nd(rng);
            }
            // u = phi(t) v with phi of degree q
            auto phi = [q](double t) { return q == 0 ? 1.5 : (q == 1 ? 1.0 + 2.0 * t : 1.0 - t + 3.0 * t * t); };
            auto dphi = [q](double t) { return q == 0 ? 0.0 : (q == 1 ? 2.0 : -1.0 + 6.0 * t); };
            const Eigen::VectorXd Mv = s->mass().apply(v), Av = s->stiffness().apply(v);
            ProblemSpec prob;
            prob.u0 = as_evaluable(NodalField{s, phi(0.0) * v});
            prob.load = [=](double t) { return Eigen::VectorXd(dphi(t) * Mv + phi(t) * Av); };
            const auto u = dg_solve(s, tp, q, prob);
            double err = 0.0;
            for (int m = 1; m <= tp.M(); ++m) {
                for (double tau : {0.0, 0.3, 1.0}) {
                    const double t = tp.t[m - 1] + tau * tp.step(m);
                    err = std::max(err, (u.on_slab(m, tau) - phi(t) * v).cwiseAbs().maxCoeff());
                }
            }
            CHECK(err <= 1e-9);
        }
    }
}

TEST_CASE("energy decay, causality and limits")
{
    auto s = space(8, 1);
    const auto tp = build_partition(1.0, 16);
    ProblemSpec prob;
    prob.u0 = from_global([](Point2 p) { return p.x < 0.5 ? 1.0 : -0.5; });
    const auto u = dg_solve(s, tp, 2, prob);
    double prev = norm(NodalField{s, u.left_limit(0)}, NormKind::l2());
    for (int m = 1; m <= tp.M(); ++m) {
        const double cur = norm(NodalField{s, u.left_limit(m)}, NormKind::l2());
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    // jumps and limits
    for (int m = 1; m < tp.M(); ++m) {
        const Eigen::VectorXd j = right_limit_field(u, tp.t[m]).coeffs - left_limit_field(u, tp.t[m]).coeffs;
        CHECK((j - u.jump(m)).cwiseAbs().maxCoeff() <= 1e-13);
        CHECK((u.at(tp.t[m]) - u.left_limit(m)).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(left_limit_field(u, 0.3), DomainError);
    CHECK_THROWS_AS(u.at(1.5), DomainError);

    ProblemSpec forced = prob;
    forced.f = [](double t, const CellPoint& p) { return std::sin(5 * t) + p.x.y; };
    ProblemSpec truncated = forced;
    const double cut = tp.t[6];
    truncated.f = [cut](double t, const CellPoint& p) { return t <= cut ? std::sin(5 * t) + p.x.y : 0.0; };
    const auto a = dg_solve(s, tp, 1, forced);
    const auto b = dg_solve(s, tp, 1, truncated);
    for (int m = 0; m < 6; ++m) {
        CHECK((a.blocks[m] - b.blocks[m]).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK((a.blocks[7] - b.blocks[7]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("q=0 field is constant in time on each slab")
{
    auto s = space(4, 1);
    const auto tp = build_partition(1.0, 4);
    ProblemSpec prob;
    prob.u0 = from_global([](Point2 p) { return p.x * p.y; });
    const auto u = dg_solve(s, tp, 0, prob);
    CHECK(eval_value(u, 0.3, {0.4, 0.6}) == eval_value(u, 0.45, {0.4, 0.6}));
}
