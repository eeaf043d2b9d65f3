#include "heatwave/verify.hpp"

#include "heatwave/errors.hpp"
#include "verify_common.hpp"

#include <algorithm>
#include <numbers>

namespace heatwave {

namespace detail {

ExperimentReport start_report(const std::string& name, const RunConfig& cfg)
{
    ExperimentReport rep;
    rep.experiment = name;
    rep.config = echo(cfg);
    rep.config["experiment"] = name;
    rep.config["lattice_divisions_r1"] = lattice_divisions(1);
    rep.config["lattice_divisions_r2"] = lattice_divisions(2);
    rep.code_version = code_version();
    rep.timestamp = utc_timestamp();
    return rep;
}

TimePartition level_partition(const RunConfig& cfg, std::size_t level, int n)
{
    int M = n;
    if (!cfg.m.empty()) {
        if (level >= cfg.m.size()) {
            throw ValidationError("m ladder is shorter than the n ladder");
        }
        M = cfg.m[level];
    }
    const auto kind = cfg.partition == "geometric" ? PartitionKind::geometric : PartitionKind::uniform;
    return build_partition(cfg.T, M, kind, kind == PartitionKind::geometric ? cfg.ratio : 1.0);
}

SpacePtr level_space(int n, int r) { return build_space(unit_square(n), r); }

Check& growth_check(ExperimentReport& rep, const std::string& name, const std::vector<double>& v, double window)
{
    const double g = v.size() >= 2 ? growth(v) : std::numeric_limits<double>::quiet_NaN();
    const double sp = v.size() >= 2 ? spread(v) : std::numeric_limits<double>::quiet_NaN();
    return rep.check(name, g, window, true, "growth; two-sided spread " + fmt17(sp));
}

double slope(const std::vector<double>& x, const std::vector<double>& v)
{
    if (x.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return loglog_slope(x, v);
}

} // namespace detail

MeshPtr unit_square(int n) { return std::make_shared<const Mesh>(generate_unit_square(n)); }

std::vector<int> ladder_or(const RunConfig& cfg, std::vector<int> fallback)
{
    return cfg.n.empty() ? fallback : cfg.n;
}

// ---------------------------------------------------------------------------
// Manufactured solutions

namespace {

constexpr double pi = std::numbers::pi;

double s_val(Point2 x) { return std::sin(pi * x.x) * std::sin(pi * x.y); }
Vec2 s_grad(Point2 x)
{
    return {pi * std::cos(pi * x.x) * std::sin(pi * x.y), pi * std::sin(pi * x.x) * std::cos(pi * x.y)};
}

Manufactured from_exact(std::string name, ExactSolution ex, std::function<ProblemSpec(const SpacePtr&)> problem)
{
    Manufactured u;
    u.name = std::move(name);
    u.value = [f = ex.value](double t, const CellPoint& p) { return f(t, p.x); };
    u.gradient = [g = ex.gradient](double t, const CellPoint& p) { return g(t, p.x); };
    u.problem = std::move(problem);
    u.exact = std::move(ex);
    return u;
}

} // namespace

Manufactured smooth_solution()
{
    ExactSolution ex;
    ex.value = [](double t, Point2 x) { return s_val(x) * std::exp(-t); };
    ex.gradient = [](double t, Point2 x) -> Vec2 { return s_grad(x) * std::exp(-t); };
    ex.time_derivative = [](double t, Point2 x) { return -s_val(x) * std::exp(-t); };
    ex.laplacian = [](double t, Point2 x) { return -2.0 * pi * pi * s_val(x) * std::exp(-t); };
    auto problem = [ex](const SpacePtr&) {
        ProblemSpec p;
        p.f = [](double t, const CellPoint& c) { return (2.0 * pi * pi - 1.0) * s_val(c.x) * std::exp(-t); };
        p.u0 = from_global([](Point2 x) { return s_val(x); });
        p.exact = ex;
        return p;
    };
    return from_exact("smooth", ex, problem);
}

Manufactured kink_solution(Point2 c, double amplitude)
{
    const double A = amplitude;
    const double R = std::min({c.x, 1.0 - c.x, c.y, 1.0 - c.y});
    if (R <= 0.0) {
        throw ValidationError("kink center must lie inside the unit square");
    }
    // w = |x - c|^{3/2} (1 - |x - c|^2 / R^2)^3 on B_R(c), zero outside
    auto w_val = [c, R](Point2 x) {
        const double rho = distance(x, c);
        if (rho >= R) {
            return 0.0;
        }
        return std::pow(rho, 1.5) * std::pow(1.0 - rho * rho / (R * R), 3);
    };
    auto w_grad = [c, R](Point2 x) -> Vec2 {
        const double rho = distance(x, c);
        if (rho >= R || rho == 0.0) {
            return Vec2::Zero();
        }
        const double b = 1.0 - rho * rho / (R * R);
        const double dr = 1.5 * std::sqrt(rho) * b * b * b - 6.0 * std::pow(rho, 2.5) * b * b / (R * R);
        return dr * Vec2(x.x - c.x, x.y - c.y) / rho;
    };
    ExactSolution ex;
    ex.value = [=](double t, Point2 x) { return s_val(x) * std::exp(-t) + A * w_val(x) * std::cos(t); };
    ex.gradient = [=](double t, Point2 x) -> Vec2 {
        return s_grad(x) * std::exp(-t) + A * w_grad(x) * std::cos(t);
    };
    ex.time_derivative = [=](double t, Point2 x) {
        return -s_val(x) * std::exp(-t) - A * w_val(x) * std::sin(t);
    };
    auto problem = [=](const SpacePtr& s) {
        ProblemSpec p;
        p.u0 = from_global([=](Point2 x) { return s_val(x) + A * w_val(x); });
        p.exact = ex;
        p.load = weak_form_load(s, ex);
        return p;
    };
    return from_exact("kink", ex, problem);
}

Manufactured discrete_solution(const SpacePtr& s, int q)
{
    const NodalField v = project(s, from_global([](Point2 x) { return s_val(x) * (1.0 + x.x); }), ProjectionKind::nodal);
    auto p = [q](double t) {
        double acc = 0.0, term = 1.0;
        for (int j = 0; j <= q; ++j) {
            acc += term;
            term *= t / (j + 1);
        }
        return acc;
    };
    auto dp = [q](double t) {
        double acc = 0.0, term = 1.0;
        for (int j = 0; j < q; ++j) {
            acc += term;
            term *= t / (j + 1);
        }
        return acc;
    };
    Manufactured u;
    u.name = "discrete";
    u.value = [v, p](double t, const CellPoint& c) {
        return p(t) * local_value(*v.space, v.coeffs, c.cell, c.bary);
    };
    u.gradient = [v, p](double t, const CellPoint& c) -> Vec2 {
        return p(t) * local_gradient(*v.space, v.coeffs, c.cell, c.bary);
    };
    u.problem = [v, p, dp](const SpacePtr& sp) {
        if (sp != v.space) {
            throw ValidationError("discrete solution belongs to another space");
        }
        const Eigen::VectorXd Mv = sp->mass().apply(v.coeffs);
        const Eigen::VectorXd Av = sp->stiffness().apply(v.coeffs);
        ProblemSpec prob;
        prob.u0 = as_evaluable(v);
        prob.load = [Mv, Av, p, dp](double t) -> Eigen::VectorXd { return dp(t) * Mv + p(t) * Av; };
        return prob;
    };
    return u;
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<double> sample_taus(int q)
{
    std::vector<double> taus = temporal_basis(q).nodes;
    for (int j = 1; j <= 8; ++j) {
        taus.push_back(j / 9.0);
    }
    taus.push_back(1.0);
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               taus.end());
    return taus;
}

namespace {

void check_fields(const std::vector<const SpaceTimeField*>& fields)
{
    if (fields.empty()) {
        throw ValidationError("no fields to sample");
    }
    for (const auto* f : fields) {
        if (f->space != fields[0]->space || f->partition.t != fields[0]->partition.t) {
            throw ValidationError("sampled fields must share space and partition");
        }
    }
}

} // namespace

std::vector<SupErrors> spacetime_sup_errors(const std::vector<const SpaceTimeField*>& fields,
                                            const Manufactured& u, int m_last, const Region& region, Exec exec)
{
    check_fields(fields);
    const auto& f0 = *fields[0];
    const FeSpace& s = *f0.space;
    const Mesh& mesh = s.mesh();
    const int M = m_last > 0 ? m_last : f0.partition.M();
    int q = 0;
    for (const auto* f : fields) {
        q = std::max(q, f->q);
    }
    const auto taus = sample_taus(q);
    const LocalTables tab(s.degree(), sample_lattice(lattice_divisions(s.degree()), s.degree()));
    const std::size_t nf = fields.size();
    const int nc = mesh.n_cells();

    std::vector<SupErrors> out(nf);
    std::vector<SupErrors> part(static_cast<std::size_t>(nc) * nf);
    std::vector<Eigen::VectorXd> coeffs(nf);
    for (int m = 1; m <= M; ++m) {
        const double t0 = f0.partition.t[m - 1];
        const double k = f0.partition.step(m);
        for (const double tau : taus) {
            const double t = t0 + tau * k;
            for (std::size_t i = 0; i < nf; ++i) {
                coeffs[i] = fields[i]->on_slab(m, tau);
            }
            for_each_cell(nc, exec, [&](int c) {
                SupErrors* mine = &part[static_cast<std::size_t>(c) * nf];
                for (std::size_t i = 0; i < nf; ++i) {
                    mine[i] = {};
                }
                for (int a = 0; a < tab.size(); ++a) {
                    const CellPoint cp{c, mesh.point_at(c, tab.point(a)), tab.point(a)};
                    if (region.center && distance(cp.x, *region.center) > region.radius) {
                        continue;
                    }
                    const double uv = u.value(t, cp);
                    const Vec2 ug = u.gradient(t, cp);
                    for (std::size_t i = 0; i < nf; ++i) {
                        const double ev = std::abs(uv - tab.value(s, coeffs[i], c, a));
                        const double eg = (ug - tab.gradient(s, coeffs[i], c, a)).norm();
                        mine[i].value = std::max(mine[i].value, ev);
                        mine[i].grad = std::max(mine[i].grad, eg);
                    }
                }
            });
            for (int c = 0; c < nc; ++c) {
                for (std::size_t i = 0; i < nf; ++i) {
                    const auto& p = part[static_cast<std::size_t>(c) * nf + i];
                    out[i].value = std::max(out[i].value, p.value);
                    out[i].grad = std::max(out[i].grad, p.grad);
                }
            }
        }
    }
    return out;
}

std::vector<SupErrors> spacetime_l2_errors(const std::vector<const SpaceTimeField*>& fields, const Manufactured& u,
                                           int m_last, Exec exec)
{
    check_fields(fields);
    const auto& f0 = *fields[0];
    const FeSpace& s = *f0.space;
    const Mesh& mesh = s.mesh();
    const int M = m_last > 0 ? m_last : f0.partition.M();
    int q = 0;
    for (const auto* f : fields) {
        q = std::max(q, f->q);
    }
    const auto taus = sample_taus(q);
    const auto& rule = triangle_rule(6);
    std::vector<Barycentric> pts;
    for (const auto& p : rule.points) {
        pts.push_back(p.bary);
    }
    const LocalTables tab(s.degree(), pts);
    const std::size_t nf = fields.size();
    const int nc = mesh.n_cells();

    std::vector<SupErrors> out(nf);
    std::vector<SupErrors> part(static_cast<std::size_t>(nc) * nf);
    std::vector<Eigen::VectorXd> coeffs(nf);
    for (int m = 1; m <= M; ++m) {
        const double t0 = f0.partition.t[m - 1];
        const double k = f0.partition.step(m);
        for (const double tau : taus) {
            const double t = t0 + tau * k;
            for (std::size_t i = 0; i < nf; ++i) {
                coeffs[i] = fields[i]->on_slab(m, tau);
            }
            for_each_cell(nc, exec, [&](int c) {
                SupErrors* mine = &part[static_cast<std::size_t>(c) * nf];
                for (std::size_t i = 0; i < nf; ++i) {
                    mine[i] = {};
                }
                const double area = mesh.cell_area(c);
                for (int a = 0; a < tab.size(); ++a) {
                    const CellPoint cp{c, mesh.point_at(c, tab.point(a)), tab.point(a)};
                    const double w = area * rule.points[a].weight;
                    const double uv = u.value(t, cp);
                    const Vec2 ug = u.gradient(t, cp);
                    for (std::size_t i = 0; i < nf; ++i) {
                        const double ev = uv - tab.value(s, coeffs[i], c, a);
                        const Vec2 eg = ug - tab.gradient(s, coeffs[i], c, a);
                        mine[i].value += w * ev * ev;
                        mine[i].grad += w * eg.squaredNorm();
                    }
                }
            });
            std::vector<SupErrors> sum(nf);
            for (int c = 0; c < nc; ++c) {
                for (std::size_t i = 0; i < nf; ++i) {
                    const auto& p = part[static_cast<std::size_t>(c) * nf + i];
                    sum[i].value += p.value;
                    sum[i].grad += p.grad;
                }
            }
            for (std::size_t i = 0; i < nf; ++i) {
                out[i].value = std::max(out[i].value, std::sqrt(sum[i].value));
                out[i].grad = std::max(out[i].grad, std::sqrt(sum[i].grad));
            }
        }
    }
    return out;
}

SpaceTimeField interpolant(const SpacePtr& s, const TimePartition& tp, int q, const Manufactured& u)
{
    if (!u.exact) {
        throw ValidationError("interpolant needs a point-based exact solution");
    }
    const auto& ex = *u.exact;
    auto at = [&](double t) {
        return project(s, from_global([&](Point2 x) { return ex.value(t, x); }), ProjectionKind::nodal).coeffs;
    };
    SpaceTimeField chi;
    chi.space = s;
    chi.partition = tp;
    chi.q = q;
    chi.initial = at(0.0);
    const auto& tb = temporal_basis(q);
    for (int m = 1; m <= tp.M(); ++m) {
        Eigen::MatrixXd b(s->n_interior(), q + 1);
        for (int j = 0; j <= q; ++j) {
            b.col(j) = at(tp.t[m - 1] + tb.nodes[j] * tp.step(m));
        }
        chi.blocks.push_back(std::move(b));
    }
    return chi;
}

// ---------------------------------------------------------------------------
// Dispatch

ExperimentReport run_experiment(const std::string& name, const RunConfig& cfg)
{
    if (name == "solve") {
        return solve_study(cfg);
    }
    if (name == "conv") {
        return conv_study(cfg);
    }
    if (name == "best-approx") {
        return best_approx_ratio(cfg);
    }
    if (name == "interior") {
        return interior_study(cfg);
    }
    if (name == "maxreg") {
        return maxreg_check(cfg);
    }
    if (name == "greens") {
        return greens_norm_scan(cfg);
    }
    if (name == "lemmas") {
        return lemma_suite(cfg);
    }
    if (name == "resolvent") {
        return resolvent_study(cfg);
    }
    if (name == "resolvent-oracle") {
        return resolvent_oracle(cfg);
    }
    if (name == "lemma42") {
        return lemma42_study(cfg);
    }
    throw ValidationError("unknown experiment '" + name + "'");
}

} // namespace heatwave
