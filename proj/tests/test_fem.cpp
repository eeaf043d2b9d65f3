#include "heatwave/errors.hpp"
#include "heatwave/fem.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace heatwave;

namespace {

MeshPtr square(int n) { return std::make_shared<const Mesh>(generate_unit_square(n)); }

MeshPtr reference_triangle()
{
    return std::make_shared<const Mesh>(make_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {1, 1, 1}));
}

double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

const double kPi = std::numbers::pi;

} // namespace

TEST_CASE("dof counts")
{
    auto s11 = build_space(square(1), 1);
    CHECK(s11->n_dofs() == 4);
    CHECK(s11->n_interior() == 0);
    auto s21 = build_space(square(2), 1);
    CHECK(s21->n_dofs() == 9);
    CHECK(s21->n_interior() == 1);
    auto s22 = build_space(square(2), 2);
    CHECK(s22->n_dofs() == 25);
    CHECK(s22->n_interior() == 9);
    CHECK_THROWS_AS(build_space(square(2), 3), ValidationError);
}

TEST_CASE("interior mask agrees with geometry")
{
    auto s = build_space(square(4), 2);
    for (int d = 0; d < s->n_dofs(); ++d) {
        const auto p = s->dof_points()[d];
        const bool on_boundary = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
        CHECK(static_cast<bool>(s->interior_mask()[d]) == !on_boundary);
    }
}

TEST_CASE("reference element matrices are exact")
{
    auto s = build_space(reference_triangle(), 1);
    Eigen::Matrix3d mass_ref;
    mass_ref << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    mass_ref *= 0.5 / 12.0;
    Eigen::Matrix3d stiff_ref;
    stiff_ref << 2, -1, -1, -1, 1, 0, -1, 0, 1;
    stiff_ref *= 0.5;
    CHECK(max_abs(element_matrix(*s, 0, FormKind::mass()) - mass_ref) <= 1e-14);
    CHECK(max_abs(element_matrix(*s, 0, FormKind::stiffness()) - stiff_ref) <= 1e-14);
    const auto w = make_weight({0.3, 0.2}, 4.0, 1.0);
    CHECK(max_abs(element_matrix(*s, 0, FormKind::weighted_stiffness(w, 0.0)) - stiff_ref) <= 1e-14);
}

TEST_CASE("P2 reference mass sums to the area and is exact")
{
    auto s = build_space(reference_triangle(), 2);
    const Eigen::MatrixXd m = element_matrix(*s, 0, FormKind::mass());
    CHECK(std::abs(m.sum() - 0.5) <= 1e-15);
    // vertex-vertex diagonal 6/360 * 2|T| ... = |T|/30, edge-edge diagonal 8|T|/45
    CHECK(std::abs(m(0, 0) - 0.5 / 30.0) <= 1e-15);
    CHECK(std::abs(m(3, 3) - 8.0 * 0.5 / 45.0) <= 1e-15);
    const Eigen::MatrixXd k = element_matrix(*s, 0, FormKind::stiffness());
    CHECK(std::abs(k.rowwise().sum().cwiseAbs().maxCoeff()) <= 1e-14);
}

TEST_CASE("serial and parallel assembly agree bitwise")
{
    auto s = build_space(square(8), 2);
    const auto w = make_weight(default_x0(), 4.0, s->mesh().h);
    for (const auto& kind : {FormKind::mass(), FormKind::stiffness(), FormKind::weighted_mass(w, 2.0),
                             FormKind::weighted_stiffness(w, 2.0)}) {
        const auto a = assemble(*s, kind, Exec::serial);
        const auto b = assemble(*s, kind, Exec::parallel);
        CHECK((Eigen::MatrixXd(a.matrix()) - Eigen::MatrixXd(b.matrix())).cwiseAbs().maxCoeff() == 0.0);
        CHECK(symmetry_defect(a.matrix()) == 0.0);
    }
}

TEST_CASE("mass rows sum to cell-area shares")
{
    for (int r : {1, 2}) {
        auto s = build_space(square(4), r);
        for (int c = 0; c < s->mesh().n_cells(); ++c) {
            const Eigen::VectorXd rows = element_matrix(*s, c, FormKind::mass()).rowwise().sum();
            const double a = s->mesh().cell_area(c);
            for (int i = 0; i < rows.size(); ++i) {
                const double share = r == 1 ? a / 3.0 : (i < 3 ? 0.0 : a / 3.0);
                CHECK(std::abs(rows[i] - share) <= 1e-13);
            }
        }
    }
}

TEST_CASE("projections are the identity on V_h")
{
    for (int r : {1, 2}) {
        auto s = build_space(square(4), r);
        std::mt19937_64 rng(7);
        std::normal_distribution<double> nd;
        Eigen::VectorXd c(s->n_interior());
        for (auto& x : c) {
            x = nd(rng);
        }
        const NodalField v{s, c};
        const auto ev = as_evaluable(v);
        for (auto kind : {ProjectionKind::l2, ProjectionKind::ritz, ProjectionKind::nodal}) {
            const auto p = project(s, ev, kind);
            CHECK((p.coeffs - c).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("nodal interpolation and Galerkin orthogonality")
{
    auto s = build_space(square(8), 2);
    const auto v = from_global([](Point2 p) { return std::sin(kPi * p.x) * std::sin(kPi * p.y); },
                               [](Point2 p) {
                                   return Vec2(kPi * std::cos(kPi * p.x) * std::sin(kPi * p.y),
                                               kPi * std::sin(kPi * p.x) * std::cos(kPi * p.y));
                               });
    const auto iv = project(s, v, ProjectionKind::nodal);
    CHECK(evaluate_value(iv, {0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-15));

    const auto pv = project(s, v, ProjectionKind::l2);
    const Eigen::VectorXd resid = load_vector(*s, v.value) - s->mass().apply(pv.coeffs);
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> pick(0, s->n_interior() - 1);
    for (int i = 0; i < 20; ++i) {
        CHECK(std::abs(resid[pick(rng)]) <= 1e-10);
    }

    const auto rv = project(s, v, ProjectionKind::ritz);
    const Eigen::VectorXd g = gradient_load_vector(*s, v.gradient) - s->stiffness().apply(rv.coeffs);
    const double grad_v = kPi / std::sqrt(2.0) * std::sqrt(2.0); // ||grad v||_{L2} = pi / sqrt(2)
    const Eigen::VectorXd diagA = s->stiffness().matrix().diagonal();
    for (int i = 0; i < g.size(); ++i) {
        CHECK(std::abs(g[i]) <= 1e-10 * grad_v * std::sqrt(diagA[i]));
    }
}

TEST_CASE("evaluation on the reference triangle")
{
    // single interior dof requires a bigger mesh; use the n=2 square whose
    // centre vertex is the only interior dof
    auto s = build_space(square(2), 1);
    NodalField u{s, Eigen::VectorXd::Ones(1)};
    CHECK(evaluate_value(u, {0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(evaluate_value(u, {0.25, 0.5}) == doctest::Approx(0.5));
    const auto g = evaluate_gradient(u, {0.3, 0.45});
    CHECK(std::isfinite(g.norm()));
    CHECK_THROWS_AS(evaluate_value(u, {-0.1, 0.5}), DomainError);

    auto s2 = build_space(square(4), 1);
    const auto lin = project(s2, from_global([](Point2 p) { return p.x + p.y; }), ProjectionKind::nodal);
    // interior dofs only: inside cells away from the boundary the gradient is exact
    const auto g2 = evaluate_gradient(lin, {0.4, 0.6});
    CHECK(g2[0] == doctest::Approx(1.0));
    CHECK(g2[1] == doctest::Approx(1.0));
}

TEST_CASE("inverse Laplacian")
{
    auto s = build_space(square(4), 1);
    const auto zero = inv_laplacian(zero_field(s));
    CHECK(zero.coeffs.cwiseAbs().maxCoeff() == 0.0);

    const Eigen::MatrixXd A = Eigen::MatrixXd(s->stiffness().matrix());
    const Eigen::MatrixXd M = Eigen::MatrixXd(s->mass().matrix());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
    const Eigen::VectorXd v = es.eigenvectors().col(2);
    const double lambda = es.eigenvalues()[2];
    const auto w = inv_laplacian(NodalField{s, v});
    CHECK((w.coeffs - v / lambda).cwiseAbs().maxCoeff() <= 1e-10 * v.cwiseAbs().maxCoeff() / lambda);
    const auto back = discrete_laplacian(w);
    CHECK((back.coeffs + v).cwiseAbs().maxCoeff() <= 1e-10 * v.cwiseAbs().maxCoeff());
}

TEST_CASE("norms")
{
    auto s = build_space(square(8), 2);
    const auto w = make_weight(default_x0(), 4.0, s->mesh().h);
    const auto z = zero_field(s);
    for (const auto& k : {NormKind::l2(), NormKind::l1_sampled(), NormKind::linf_sampled(), NormKind::w1inf_sampled(),
                          NormKind::weighted_l2(w, 2.0), NormKind::weighted_hm1(w)}) {
        CHECK(norm(z, k) == 0.0);
    }
    const auto v = project(s, from_global([](Point2 p) { return std::sin(kPi * p.x) * std::sin(kPi * p.y); }),
                           ProjectionKind::nodal);
    const double l2 = norm(v, NormKind::l2());
    const double direct = l2_norm_of(s->mesh(), [&](const CellPoint& p) {
        return local_value(*s, v.coeffs, p.cell, p.bary);
    }, 6);
    CHECK(std::abs(l2 - direct) <= 1e-12);
    CHECK(std::abs(norm(v, NormKind::weighted_l2(w, 0.0)) - l2) <= 1e-10);
    CHECK(norm(v, NormKind::linf_sampled()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(v, NormKind::l1_sampled()) == doctest::Approx(4.0 / (kPi * kPi)).epsilon(2e-3));
    const auto wrong = make_weight(default_x0(), 4.0, 0.3);
    CHECK_THROWS_AS(norm(v, NormKind::weighted_l2(wrong, 2.0)), ValidationError);
    for (const auto& k : {NormKind::l1_sampled(), NormKind::linf_sampled(), NormKind::w1inf_sampled(),
                          NormKind::weighted_hm1(w)}) {
        CHECK(norm(v, k, Exec::serial) == norm(v, k, Exec::parallel));
    }
}
