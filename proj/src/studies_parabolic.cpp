#include "heatwave/errors.hpp"
#include "heatwave/verify.hpp"
#include "verify_common.hpp"

#include <numbers>

namespace heatwave {

using detail::growth_check;
using detail::level_partition;
using detail::level_space;
using detail::ln_h;

namespace {

Manufactured pick_solution(const RunConfig& cfg, const std::string& fallback, const SpacePtr& s)
{
    const std::string name = cfg.solution.empty() ? fallback : cfg.solution;
    if (name == "smooth") {
        return smooth_solution();
    }
    if (name == "kink") {
        return kink_solution(cfg.kink_center, cfg.kink_amplitude);
    }
    return discrete_solution(s, cfg.q);
}

DgOptions dg_options(const RunConfig& cfg)
{
    DgOptions o;
    o.method = cfg.block_solve == "block" ? BlockSolve::block : BlockSolve::diagonalized;
    return o;
}

std::string solution_name(const RunConfig& cfg, const std::string& fallback)
{
    return cfg.solution.empty() ? fallback : cfg.solution;
}

} // namespace

// ---------------------------------------------------------------------------

ExperimentReport solve_study(const RunConfig& cfg)
{
    auto rep = detail::start_report("solve", cfg);
    const int n = ladder_or(cfg, {16}).front();
    rep.config["n"] = std::vector<int>{n};
    rep.config["solution"] = solution_name(cfg, "smooth");
    const auto s = level_space(n, cfg.r);
    const auto tp = level_partition(cfg, 0, n);
    const auto u = pick_solution(cfg, "smooth", s);
    const auto prob = u.problem(s);
    const auto sol = dg_solve(s, tp, cfg.q, prob, dg_options(cfg));
    const auto sup = spacetime_sup_errors({&sol}, u).front();
    const auto l2 = spacetime_l2_errors({&sol}, u).front();
    const auto res = dg_residual(sol, prob);

    auto& row = rep.add_row(s->mesh().h, tp.k, cfg.q, cfg.r);
    row.set("n", n).set("M", tp.M()).set("dofs", s->n_interior());
    row.set("E_grad", sup.grad).set("E_value", sup.value).set("E_grad_l2", l2.grad).set("E_value_l2", l2.value);
    row.set("residual_primal", res.primal).set("residual_dual", res.dual).set("form_agreement", res.agreement);
    row.set("k_min", tp.k_min).set("kappa", tp.kappa).set("k_min_over_k_beta", tp.min_step_ratio(cfg.beta));
    rep.check("residual_primal", res.primal, 1e-10);
    rep.check("form_agreement", res.agreement, 1e-11);
    return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport conv_study(const RunConfig& cfg)
{
    auto rep = detail::start_report("conv", cfg);
    const std::string sol_name = solution_name(cfg, "smooth");
    rep.config["solution"] = sol_name;
    rep.plot_metrics = {"E_grad", "E_value"};
    const bool k_only = cfg.mode == "k_only";

    std::vector<int> ns, ms;
    if (k_only) {
        const int n = ladder_or(cfg, {32}).front();
        ms = cfg.m.empty() ? std::vector<int>{4, 8, 16, 32, 64, 128} : cfg.m;
        ns.assign(ms.size(), n);
        rep.plot_metrics.clear();
    } else {
        ns = ladder_or(cfg, {8, 16, 32, 64});
        for (std::size_t i = 0; i < ns.size(); ++i) {
            ms.push_back(cfg.m.empty() ? ns[i] : level_partition(cfg, i, ns[i]).M());
        }
    }
    rep.config["n"] = ns;
    rep.config["m"] = ms;

    std::vector<double> es, hs, ks;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto s = level_space(ns[i], cfg.r);
        const auto kind = cfg.partition == "geometric" ? PartitionKind::geometric : PartitionKind::uniform;
        const auto tp = build_partition(cfg.T, ms[i], kind, kind == PartitionKind::geometric ? cfg.ratio : 1.0);
        const auto u = pick_solution(cfg, "smooth", s);
        const auto sol = dg_solve(s, tp, cfg.q, u.problem(s), dg_options(cfg));
        const auto e = spacetime_sup_errors({&sol}, u).front();
        auto& row = rep.add_row(s->mesh().h, tp.k, cfg.q, cfg.r);
        row.set("n", ns[i]).set("M", tp.M()).set("E_grad", e.grad).set("E_value", e.value);
        if (!es.empty()) {
            row.set("eoc", k_only ? eoc(es.back(), e.grad, ks.back(), tp.k) : eoc(es.back(), e.grad, hs.back(), s->mesh().h));
            row.set("decrease", es.back() / e.grad);
        }
        es.push_back(e.grad);
        hs.push_back(s->mesh().h);
        ks.push_back(tp.k);
    }

    if (sol_name == "discrete") {
        double worst = 0.0;
        for (double e : es) {
            worst = std::max(worst, e);
        }
        rep.check("discrete_invariance", worst, 1e-8);
        return rep;
    }
    if (k_only) {
        // The first halvings of k reduce the error; once the spatial error
        // dominates the decrease factor approaches one.
        if (es.size() >= 3) {
            rep.check("initial_decrease", es[0] / es[1], 1.1, false);
            rep.check("plateau_decrease", es[es.size() - 2] / es.back(), 1.1);
        }
        return rep;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 1; i < es.size(); ++i) {
        const double r = eoc(es[i - 1], es[i], hs[i - 1], hs[i]);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (es.size() < 2) {
        lo = hi = std::numeric_limits<double>::quiet_NaN();
    }
    rep.check("eoc_min", lo, 0.85, false);
    rep.check("eoc_max", hi, 1.15);
    if (es.size() >= 3) {
        rep.fits.push_back({"E_grad_vs_h", fit_log_constant([&] {
                                std::vector<std::pair<double, double>> pts;
                                for (std::size_t i = 0; i < es.size(); ++i) {
                                    pts.emplace_back(hs[i], es[i]);
                                }
                                return pts;
                            }(),
                                                            ModelTag::power)});
    }
    return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport best_approx_ratio(const RunConfig& cfg)
{
    auto rep = detail::start_report("best-approx", cfg);
    const auto ns = ladder_or(cfg, {8, 16, 32, 64});
    rep.config["n"] = ns;
    rep.config["solution"] = solution_name(cfg, "smooth");
    rep.plot_metrics = {"E_grad", "interp_grad", "rho"};
    rep.notes.push_back("inf over the discrete space replaced by the space-time interpolant chi* "
                        "(nodal in space, Lagrange at the Radau nodes in time); inf <= interpolant error");
    rep.notes.push_back("l_h = |ln h|^{3/2}, l_k = ln(T/k)");

    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto s = level_space(ns[i], cfg.r);
        const auto tp = level_partition(cfg, i, ns[i]);
        const auto u = pick_solution(cfg, "smooth", s);
        if (!u.exact) {
            // Discrete solutions are their own interpolant.
            auto& row = rep.add_row(s->mesh().h, tp.k, cfg.q, cfg.r);
            row.flags.push_back(std::string(kExcluded) + " exact-representable solution, interpolant error is zero");
            continue;
        }
        const auto sol = dg_solve(s, tp, cfg.q, u.problem(s), dg_options(cfg));
        const auto chi = interpolant(s, tp, cfg.q, u);
        const auto e = spacetime_sup_errors({&sol, &chi}, u);
        const double h = s->mesh().h;
        const double lk = std::log(cfg.T / tp.k);
        const double lh = std::pow(ln_h(h), 1.5);
        auto& row = rep.add_row(h, tp.k, cfg.q, cfg.r);
        row.set("n", ns[i]).set("M", tp.M()).set("E_grad", e[0].grad).set("interp_grad", e[1].grad);
        row.set("l_k", lk).set("l_h", lh);
        if (e[1].grad < 1e-13) {
            row.flags.push_back(std::string(kExcluded) + " interpolant error below 1e-13");
            continue;
        }
        const double rho = e[0].grad / e[1].grad;
        row.set("rho", rho).set("rho_normalized", rho / (lk * lh));
    }

    const auto rho = rep.column("rho");
    const auto hs = rep.h_column("rho");
    if (rho.size() < 3) {
        rep.notes.push_back("fewer than three unflagged rows; no ratio checks");
        return rep;
    }
    const auto norm = rep.column("rho_normalized");
    const auto lklh = [&] {
        std::vector<std::pair<double, double>> pts;
        for (const auto& row : rep.rows) {
            if (row.has("rho")) {
                pts.emplace_back(row.get("l_k") * row.get("l_h"), row.get("rho"));
            }
        }
        return pts;
    }();
    rep.fits.push_back({"rho_vs_lk_lh", fit_log_constant(lklh, ModelTag::product)});
    const std::vector<double> last3(norm.end() - 3, norm.end());
    growth_check(rep, "rho_normalized_last3", last3, cfg.window_mid);
    rep.check("rho_slope_vs_h", detail::slope(hs, rho), -0.1, false, "slope of log rho against log h");
    return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport interior_study(const RunConfig& cfg)
{
    auto rep = detail::start_report("interior", cfg);
    const auto ns = ladder_or(cfg, {16, 32, 64});
    const Point2 x0 = cfg.x0.value_or(Point2{0.375, 0.375});
    const double d = cfg.d;
    const std::string sol_name = solution_name(cfg, "kink");
    rep.config["n"] = ns;
    rep.config["x0"] = Json::array({x0.x, x0.y});
    rep.config["solution"] = sol_name;
    rep.plot_metrics = {"local_error", "global_error", "rhs"};
    rep.notes.push_back("right-hand side uses the interpolant chi* in place of the infimum");

    if (sol_name == "discrete") {
        throw ValidationError("interior study needs a point-based exact solution (smooth or kink)");
    }
    if (x0.x - d <= 0.0 || x0.x + d >= 1.0 || x0.y - d <= 0.0 || x0.y + d >= 1.0) {
        throw ValidationError("ball B_d(x0) is not compactly contained in the domain");
    }
    const double t_tilde = cfg.t_tilde * cfg.T;

    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto s = level_space(ns[i], cfg.r);
        const double h = s->mesh().h;
        if (d <= 4.0 * h) {
            throw ValidationError("interior study requires d > 4h (d = " + fmt17(d) + ", h = " + fmt17(h) + ")");
        }
        const auto tp = level_partition(cfg, i, ns[i]);
        const auto u = pick_solution(cfg, "kink", s);
        const auto sol = dg_solve(s, tp, cfg.q, u.problem(s), dg_options(cfg));
        const auto chi = interpolant(s, tp, cfg.q, u);
        const int m_tilde = tp.slab_of(t_tilde);

        const double local = (u.exact->gradient(t_tilde, x0) - eval_gradient(sol, t_tilde, x0)).norm();
        const double global = spacetime_sup_errors({&sol}, u).front().grad;
        const auto ball = spacetime_sup_errors({&chi}, u, m_tilde, Region{x0, d}).front();
        const auto l2 = spacetime_l2_errors({&chi}, u, m_tilde).front();
        const double lk = std::log(cfg.T / tp.k);
        const double lh = std::pow(ln_h(h), 1.5);
        const double rhs = lk * lh * (ball.grad + ball.value / d + (l2.grad + l2.value / d) / d);

        auto& row = rep.add_row(h, tp.k, cfg.q, cfg.r);
        row.set("n", ns[i]).set("M", tp.M()).set("local_error", local).set("global_error", global);
        row.set("ball_interp_grad", ball.grad).set("ball_interp_value", ball.value);
        row.set("l2_interp_grad", l2.grad).set("l2_interp_value", l2.value);
        row.set("rhs", rhs).set("local_over_rhs", local / rhs);
    }
    const auto hs = rep.h_column("local_error");
    const double eoc_local = detail::slope(hs, rep.column("local_error"));
    const double eoc_global = detail::slope(hs, rep.column("global_error"));
    rep.notes.push_back("EOCs are least-squares slopes of log error against log h");
    if (sol_name == "kink") {
        rep.check("local_eoc", eoc_local, 0.8, false);
        rep.check("global_eoc", eoc_global, 0.7);
    } else {
        rep.check("eoc_agreement", std::abs(eoc_local - eoc_global), 0.2);
    }
    growth_check(rep, "local_over_rhs", rep.column("local_over_rhs"), cfg.window_loose);
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct NormOp {
    std::string name;
    double mh_power = 0.0; // normalization |ln h|^{mh_power}
    std::function<double(const Eigen::VectorXd&)> eval;
};

std::vector<NormOp> norm_ops(const SpacePtr& s, const WeightSpec& w, const std::vector<std::string>& names)
{
    std::vector<NormOp> ops;
    const SparseSym& M = s->mass();
    const SparseSym& A = s->stiffness();
    for (const auto& name : names) {
        if (name == "L2") {
            ops.push_back({name, 0.0, [&M](const Eigen::VectorXd& v) { return std::sqrt(std::max(0.0, M.quad(v))); }});
        } else if (name == "weighted_L2") {
            auto W = std::make_shared<SparseSym>(assemble(*s, FormKind::weighted_mass(w, 2.0)));
            ops.push_back({name, 1.0, [W](const Eigen::VectorXd& v) { return std::sqrt(std::max(0.0, W->quad(v))); }});
        } else {
            auto As = std::make_shared<SparseSym>(assemble(*s, FormKind::weighted_stiffness(w, 2.0)));
            ops.push_back({name, 0.5, [&M, &A, As](const Eigen::VectorXd& v) {
                               const Eigen::VectorXd y = A.solve(M.apply(v));
                               return std::sqrt(std::max(0.0, As->quad(y)));
                           }});
        }
    }
    return ops;
}

} // namespace

ExperimentReport maxreg_check(const RunConfig& cfg)
{
    auto rep = detail::start_report("maxreg", cfg);
    const auto ns = ladder_or(cfg, {8, 16, 32, 64});
    const std::string forcing = cfg.forcing.empty() ? "smooth" : cfg.forcing;
    const auto names = cfg.norms.empty() ? std::vector<std::string>{"L2", "weighted_L2", "weighted_Hm1"} : cfg.norms;
    const Point2 x0 = cfg.x0.value_or(default_x0());
    rep.config["n"] = ns;
    rep.config["forcing"] = forcing;
    rep.config["norms"] = names;
    rep.config["x0"] = Json::array({x0.x, x0.y});
    rep.notes.push_back("u0 = 0; [u]_0 = u_0^+; smooth forcing (1 + y) cos(4t + 3x)");
    rep.notes.push_back("normalized ratio = LHS / RHS / M_h with M_h = 1, |ln h|, |ln h|^{1/2} for L2, weighted_L2, "
                        "weighted_Hm1; RHS carries ln(T/k)");
    if (forcing == "delta") {
        rep.notes.push_back("temporal delta is a degree-q polynomial on its slab, not a smooth bump");
    }
    const auto& gl = gauss_legendre(4);

    for (std::size_t i = 0; i < ns.size(); ++i) {
        const auto s = level_space(ns[i], cfg.r);
        const double h = s->mesh().h;
        const auto tp = level_partition(cfg, i, ns[i]);
        const auto w = make_weight(x0, cfg.K, h);
        const SparseSym& M = s->mass();
        const SparseSym& A = s->stiffness();

        LoadFn load;
        std::function<Eigen::VectorXd(double)> phf;
        std::optional<TimeDelta> theta;
        Eigen::VectorXd phd;
        if (forcing == "smooth") {
            load = forcing_load(s, [](double t, const CellPoint& c) { return (1.0 + c.x.y) * std::cos(4.0 * t + 3.0 * c.x.x); });
            phf = [load, &M](double t) { return M.solve(load(t)); };
        } else {
            const auto delta = build_smoothed_delta(*s, x0);
            const Eigen::VectorXd ell = delta_derivative_load(*s, delta, parse_direction(cfg.direction));
            theta = build_time_delta(tp, cfg.q, cfg.t_tilde * cfg.T);
            phd = M.solve(ell);
            load = [ell, th = *theta](double t) -> Eigen::VectorXd { return th.value(t) * ell; };
            phf = [phd, th = *theta](double t) -> Eigen::VectorXd { return th.value(t) * phd; };
        }
        SpaceTimeField u;
        u.space = s;
        u.partition = tp;
        u.q = cfg.q;
        u.initial = Eigen::VectorXd::Zero(s->n_interior());
        u.blocks = dg_solve_algebraic(M, A, tp, cfg.q, load, u.initial, dg_options(cfg));

        const auto ops = norm_ops(s, w, names);
        const auto taus = sample_taus(cfg.q);
        const double lk = std::log(cfg.T / tp.k);
        auto& row = rep.add_row(h, tp.k, cfg.q, cfg.r);
        row.set("n", ns[i]).set("M", tp.M()).set("l_k", lk);
        for (const auto& op : ops) {
            double dt_inf = 0, lap_inf = 0, jump_inf = 0, f_inf = 0;
            double dt_1 = 0, lap_1 = 0, jump_1 = 0, f_1 = 0;
            for (int m = 1; m <= tp.M(); ++m) {
                const double k = tp.step(m);
                const double t0 = tp.t[m - 1];
                for (const double tau : taus) {
                    dt_inf = std::max(dt_inf, op.eval(u.time_derivative(m, tau)));
                    lap_inf = std::max(lap_inf, op.eval(M.solve(A.apply(u.on_slab(m, tau)))));
                    f_inf = std::max(f_inf, op.eval(phf(t0 + tau * k)));
                }
                for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
                    const double tau = gl.nodes[g];
                    dt_1 += k * gl.weights[g] * op.eval(u.time_derivative(m, tau));
                    lap_1 += k * gl.weights[g] * op.eval(M.solve(A.apply(u.on_slab(m, tau))));
                    if (!theta) {
                        f_1 += k * gl.weights[g] * op.eval(phf(t0 + tau * k));
                    }
                }
                const double jn = op.eval(u.jump(m - 1));
                jump_inf = std::max(jump_inf, jn / k);
                jump_1 += jn;
            }
            if (theta) {
                f_1 = theta->l1_norm() * op.eval(phd);
            }
            const double mh = std::pow(ln_h(h), op.mh_power);
            const double lhs_inf = dt_inf + lap_inf + jump_inf;
            const double lhs_1 = dt_1 + lap_1 + jump_1;
            const double rhs_inf = lk * f_inf;
            const double rhs_1 = lk * f_1;
            row.set(op.name + "_sinf_lhs", lhs_inf).set(op.name + "_sinf_rhs", rhs_inf);
            row.set(op.name + "_sinf_ratio", lhs_inf / rhs_inf).set(op.name + "_sinf_normalized", lhs_inf / rhs_inf / mh);
            row.set(op.name + "_s1_lhs", lhs_1).set(op.name + "_s1_rhs", rhs_1);
            row.set(op.name + "_s1_ratio", lhs_1 / rhs_1).set(op.name + "_s1_normalized", lhs_1 / rhs_1 / mh);
        }
    }
    const double window = forcing == "smooth" ? cfg.window_mid : cfg.window_loose;
    for (const auto& name : names) {
        for (const char* sname : {"_sinf", "_s1"}) {
            const std::string metric = name + sname + "_normalized";
            growth_check(rep, metric, rep.column(metric), window);
            rep.plot_metrics.push_back(metric);
        }
    }
    return rep;
}

} // namespace heatwave
