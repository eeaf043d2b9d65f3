// One PASS/FAIL line per acceptance criterion. Runtime budgets count.

#include "heatwave/fem.hpp"
#include "heatwave/timestepping.hpp"
#include "heatwave/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace heatwave;

namespace {

struct Outcome {
    bool passed = true;
    std::vector<std::string> details;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            passed = false;
            details.push_back(what);
        }
    }
    void absorb(const ExperimentReport& rep)
    {
        for (const auto& c : rep.checks) {
            std::ostringstream os;
            os << rep.experiment << "/" << c.name << " = " << fmt17(c.value) << (c.upper ? " <= " : " >= ")
               << fmt17(c.threshold);
            if (!c.detail.empty()) {
                os << " (" << c.detail << ")";
            }
            if (!c.passed) {
                passed = false;
                details.push_back(os.str());
            }
        }
    }
};

SparseSym scalar(double v)
{
    SparseMatrix a(1, 1);
    a.insert(0, 0) = v;
    return SparseSym(a);
}

Outcome dg_oracle()
{
    Outcome o;
    const double lambda = 3.0;
    const int M = 10;
    const auto tp = build_partition(1.0, M);
    const double k = tp.k;
    const LoadFn zero = [](double) { return Eigen::VectorXd::Zero(1); };
    const Eigen::VectorXd u0 = Eigen::VectorXd::Ones(1);
    for (const auto method : {BlockSolve::diagonalized, BlockSolve::block}) {
        DgOptions opt;
        opt.method = method;
        const auto b0 = dg_solve_algebraic(scalar(1.0), scalar(lambda), tp, 0, zero, u0, opt);
        const auto b1 = dg_solve_algebraic(scalar(1.0), scalar(lambda), tp, 1, zero, u0, opt);
        const double z = k * lambda;
        const double R = (1.0 - z / 3.0) / (1.0 + 2.0 * z / 3.0 + z * z / 6.0);
        double e0 = 0.0, e1 = 0.0;
        for (int m = 1; m <= M; ++m) {
            e0 = std::max(e0, std::abs(b0[m - 1](0, 0) - std::pow(1.0 + z, -m)));
            e1 = std::max(e1, std::abs(b1[m - 1](0, 1) - std::pow(R, m)));
        }
        o.require(e0 <= 1e-12, "q=0 error " + fmt17(e0));
        o.require(e1 <= 1e-10, "q=1 error " + fmt17(e1));
    }
    return o;
}

Outcome discrete_invariance()
{
    Outcome o;
    for (int r : {1, 2}) {
        for (int q : {0, 1, 2}) {
            RunConfig cfg;
            cfg.solution = "discrete";
            cfg.n = {4, 8};
            cfg.r = r;
            cfg.q = q;
            o.absorb(conv_study(cfg));
        }
    }
    return o;
}

Outcome run_default(const std::function<ExperimentReport(const RunConfig&)>& f,
                    const std::function<void(RunConfig&)>& tweak = nullptr)
{
    RunConfig cfg;
    if (tweak) {
        tweak(cfg);
    }
    Outcome o;
    o.absorb(f(cfg));
    return o;
}

Outcome maxreg_both()
{
    Outcome o;
    for (const char* forcing : {"smooth", "delta"}) {
        RunConfig cfg;
        cfg.forcing = forcing;
        o.absorb(maxreg_check(cfg));
    }
    return o;
}

Outcome elliptic_constants()
{
    Outcome o;
    RunConfig cfg;
    o.absorb(lemma_suite(cfg));
    o.absorb(greens_norm_scan(cfg));
    return o;
}

Outcome algebraic_identities()
{
    Outcome o;
    constexpr double pi = std::numbers::pi;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;

    // Reference element matrices.
    {
        auto tri = std::make_shared<const Mesh>(make_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {1, 1, 1}));
        auto s = build_space(tri, 1);
        Eigen::Matrix3d mref, kref;
        mref << 2, 1, 1, 1, 2, 1, 1, 1, 2;
        mref *= 0.5 / 12.0;
        kref << 2, -1, -1, -1, 1, 0, -1, 0, 1;
        kref *= 0.5;
        const double em = (element_matrix(*s, 0, FormKind::mass()) - mref).cwiseAbs().maxCoeff();
        const double ek = (element_matrix(*s, 0, FormKind::stiffness()) - kref).cwiseAbs().maxCoeff();
        o.require(em <= 1e-14, "reference mass error " + fmt17(em));
        o.require(ek <= 1e-14, "reference stiffness error " + fmt17(ek));
    }

    for (int r : {1, 2}) {
        auto s = build_space(unit_square(4), r);
        // Projection idempotence.
        NodalField v{s, Eigen::VectorXd(s->n_interior())};
        for (Eigen::Index i = 0; i < v.coeffs.size(); ++i) {
            v.coeffs[i] = nd(rng);
        }
        for (const auto kind : {ProjectionKind::l2, ProjectionKind::ritz, ProjectionKind::nodal}) {
            const double e = (project(s, as_evaluable(v), kind).coeffs - v.coeffs).cwiseAbs().maxCoeff();
            o.require(e <= 1e-12, "projection idempotence error " + fmt17(e));
        }
        // Galerkin orthogonality of the Ritz projection.
        Evaluable f;
        f.value = [](const CellPoint& p) { return std::sin(pi * p.x.x) * std::sin(pi * p.x.y) * (1.0 + p.x.x); };
        f.gradient = [](const CellPoint& p) -> Vec2 {
            const double sx = std::sin(pi * p.x.x), sy = std::sin(pi * p.x.y);
            const double cx = std::cos(pi * p.x.x), cy = std::cos(pi * p.x.y);
            return {(pi * cx * (1.0 + p.x.x) + sx) * sy, pi * sx * cy * (1.0 + p.x.x)};
        };
        const NodalField rh = project(s, f, ProjectionKind::ritz);
        const Eigen::VectorXd defect = gradient_load_vector(*s, f.gradient) - s->stiffness().apply(rh.coeffs);
        const double grad_norm = l2_norm_of(s->mesh(), [&](const CellPoint& p) { return f.gradient(p).norm(); }, 6);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < defect.size(); ++i) {
            const double chi = std::sqrt(s->stiffness().matrix().coeff(i, i));
            worst = std::max(worst, std::abs(defect[i]) / (grad_norm * chi));
        }
        o.require(worst <= 1e-10, "Galerkin orthogonality defect " + fmt17(worst));
    }

    // Primal and dual forms of B agree; energy decays without forcing.
    for (int q : {0, 1, 2}) {
        auto s = build_space(unit_square(8), 1);
        const auto tp = build_partition(1.0, 8);
        const auto u = smooth_solution();
        const auto prob = u.problem(s);
        const auto sol = dg_solve(s, tp, q, prob);
        const auto res = dg_residual(sol, prob);
        o.require(res.agreement <= 1e-11, "primal/dual agreement " + fmt17(res.agreement));

        ProblemSpec free;
        free.u0 = from_global([](Point2 x) { return x.x * (1 - x.x) * x.y * (1 - x.y) * std::exp(3 * x.x); });
        free.load = [n = s->n_interior()](double) { return Eigen::VectorXd::Zero(n); };
        const auto decay = dg_solve(s, tp, q, free);
        double prev = std::sqrt(s->mass().quad(decay.left_limit(0)));
        for (int m = 1; m <= tp.M(); ++m) {
            const double e = std::sqrt(s->mass().quad(decay.left_limit(m)));
            o.require(e <= prev * (1.0 + 1e-12), "energy increased at slab " + std::to_string(m));
            prev = e;
        }
    }
    return o;
}

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "dG scalar oracle (q=0, q=1)", 1.0, dg_oracle},
        {2, "discrete invariance", 10.0, discrete_invariance},
        {3, "gradient convergence EOC in [0.85, 1.15]", 300.0, [] { return run_default(conv_study); }},
        {4, "global best-approximation ratio", 300.0, [] { return run_default(best_approx_ratio); }},
        {5, "interior separation with a remote kink", 300.0, [] { return run_default(interior_study); }},
        {6, "complex inequality, 1e5 samples", 5.0, [] { return run_default(lemma42_study); }},
        {7, "resolvent spectral oracle on n=4", 10.0, [] { return run_default(resolvent_oracle); }},
        {8, "weighted resolvent trends", 600.0, [] { return run_default(resolvent_study); }},
        {9, "discrete maximal regularity", 600.0, maxreg_both},
        {10, "elliptic lemma constants and Green norms", 300.0, elliptic_constants},
        {11, "algebraic identities", 30.0, algebraic_identities},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.details.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s) {
            o.passed = false;
            o.details.push_back("runtime " + fmt17(secs) + " s exceeds " + fmt17(c.budget_s) + " s");
        }
        char line[256];
        std::snprintf(line, sizeof line, "%s criterion %d: %s (%.2f s)", o.passed ? "PASS" : "FAIL", c.id,
                      c.name.c_str(), secs);
        std::cout << line << "\n";
        for (const auto& d : o.details) {
            std::cout << "    " << d << "\n";
        }
        std::cout.flush();
        failed += o.passed ? 0 : 1;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
