#include "heatwave/errors.hpp"
#include "heatwave/verify.hpp"
#include "verify_common.hpp"

#include <numbers>
#include <random>

namespace heatwave {

using detail::growth_check;
using detail::level_space;
using detail::ln_h;

namespace {

constexpr double pi = std::numbers::pi;

/// Nodal interpolation of a coarse field on a nested finer space.
Eigen::VectorXd prolong(const NodalField& coarse, const FeSpace& fine)
{
    const PointLocator loc(coarse.space->mesh());
    Eigen::VectorXd out(fine.n_interior());
    for (int i = 0; i < fine.n_interior(); ++i) {
        const Point2 p = fine.dof_points()[fine.interior_dofs()[i]];
        const Location l = loc.locate(p);
        out[i] = local_value(*coarse.space, coarse.coeffs, l.cell, l.bary);
    }
    return out;
}

/// g with -Delta g = P(D delta) on a space whose mesh refines the host cell of delta.
Eigen::VectorXd green_on(const FeSpace& s, const SmoothedDelta& d, Direction dir)
{
    const int axis = dir == Direction::x ? 0 : 1;
    const auto e = delta_evaluable(d, s.mesh());
    const Eigen::VectorXd ell = gradient_load_vector(s, [&](const CellPoint& p) {
        Vec2 g = Vec2::Zero();
        g[axis] = -e.value(p);
        return g;
    });
    return s.stiffness().solve(ell);
}

MeshPtr refine_times(MeshPtr m, int levels)
{
    for (int i = 0; i < levels; ++i) {
        m = std::make_shared<const Mesh>(refine_uniform(*m));
    }
    return m;
}

std::string k_label(double K)
{
    std::string s = fmt17(K);
    return "K" + s;
}

double consecutive_growth(const std::vector<double>& v)
{
    double g = v.size() >= 2 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 1; i < v.size(); ++i) {
        g = std::max(g, v[i] / v[i - 1] - 1.0);
    }
    return g;
}

} // namespace

// ---------------------------------------------------------------------------

ExperimentReport greens_norm_scan(const RunConfig& cfg)
{
    auto rep = detail::start_report("greens", cfg);
    const auto ns = ladder_or(cfg, {8, 16, 32, 64});
    const Point2 x0 = cfg.x0.value_or(Point2{0.5, 0.5});
    const Direction dir = parse_direction(cfg.direction);
    rep.config["n"] = ns;
    rep.config["x0"] = Json::array({x0.x, x0.y});
    rep.notes.push_back("reference g_ref solves the same problem on a mesh refined fine_levels times, with the "
                        "coarse smoothed delta; norms normalized by |ln h|^{1/2}");

    std::vector<double> Ks = cfg.k_list;
    if (std::find(Ks.begin(), Ks.end(), cfg.K) == Ks.end()) {
        Ks.push_back(cfg.K);
    }
    const std::string main_metric = "sigma_grad_g_" + k_label(cfg.K) + "_normalized";
    rep.plot_metrics = {main_metric};

    for (const int n : ns) {
        const auto s = level_space(n, cfg.r);
        const double h = s->mesh().h;
        const double lh = std::sqrt(ln_h(h));
        const auto delta = build_smoothed_delta(*s, x0);
        const NodalField g = discrete_green(s, delta, dir);
        auto& row = rep.add_row(h, 0.0, 0, cfg.r);
        row.set("n", n);
        for (const double K : Ks) {
            const auto w = make_weight(x0, K, h);
            const double v = std::sqrt(std::max(0.0, assemble(*s, FormKind::weighted_stiffness(w, 2.0)).quad(g.coeffs)));
            row.set("sigma_grad_g_" + k_label(K), v).set("sigma_grad_g_" + k_label(K) + "_normalized", v / lh);
        }
        if (cfg.fine_levels > 0) {
            const auto fine = build_space(refine_times(s->mesh_ptr(), cfg.fine_levels), cfg.r);
            const auto half = build_space(refine_times(s->mesh_ptr(), 1), cfg.r);
            const Eigen::VectorXd gref = green_on(*fine, delta, dir);
            const NodalField ghalf{half, green_on(*half, delta, dir)};
            const auto wf = make_weight(x0, cfg.K, h);
            const double ref_l2 = std::sqrt(fine->mass().quad(gref));
            const double ref_w = std::sqrt(assemble(*fine, FormKind::weighted_stiffness(wf, 2.0)).quad(gref));
            const Eigen::VectorXd eh = prolong(g, *fine) - gref;
            const Eigen::VectorXd eh2 = (cfg.fine_levels > 1 ? prolong(ghalf, *fine) : ghalf.coeffs) - gref;
            const double err_h = std::sqrt(fine->stiffness().quad(eh));
            const double err_h2 = std::sqrt(fine->stiffness().quad(eh2));
            row.set("g_ref_l2_normalized", ref_l2 / lh).set("sigma_grad_g_ref_normalized", ref_w / lh);
            row.set("grad_err_h", err_h).set("grad_err_h2", err_h2);
        }
    }
    growth_check(rep, main_metric, rep.column(main_metric), cfg.window_tight);
    std::string mono = "constants per K at the finest level:";
    for (const double K : Ks) {
        mono += " " + k_label(K) + "=" + fmt17(rep.rows.back().get("sigma_grad_g_" + k_label(K) + "_normalized"));
    }
    rep.notes.push_back(mono);
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct DeltaTerms {
    double a1 = 0, b1 = 0, c1 = 0; // ||sigma d||, ||sigma^2 grad d||, h ||sigma grad d||
    double a2 = 0, b2 = 0, c2 = 0; // same with P_h d and P_h grad d
    double l2h = 0;                // h ||d||
};

DeltaTerms delta_terms(const SpacePtr& s, Point2 x0, double K)
{
    const Mesh& mesh = s->mesh();
    const double h = mesh.h;
    const auto w = make_weight(x0, K, h);
    const auto delta = build_smoothed_delta(*s, x0);
    const auto de = delta_evaluable(delta, mesh);
    auto wint = [&](double p, bool grad) {
        return std::sqrt(integrate(mesh, [&](const CellPoint& c) {
            if (c.cell != delta.cell) {
                return 0.0;
            }
            const double f = grad ? de.gradient(c).squaredNorm() : std::pow(de.value(c), 2);
            return std::pow(sigma(w, c.x), p) * f;
        }, 6, Exec::serial));
    };
    DeltaTerms t;
    t.a1 = wint(2.0, false);
    t.b1 = wint(4.0, true);
    t.c1 = h * wint(2.0, true);
    t.l2h = h * wint(0.0, false);
    const SparseSym& M = s->mass();
    const Eigen::VectorXd pd = M.solve(load_vector(*s, de.value));
    const Eigen::VectorXd pdx = M.solve(load_vector(*s, [&](const CellPoint& c) { return de.gradient(c)[0]; }));
    const Eigen::VectorXd pdy = M.solve(load_vector(*s, [&](const CellPoint& c) { return de.gradient(c)[1]; }));
    const SparseSym W2 = assemble(*s, FormKind::weighted_mass(w, 2.0));
    const SparseSym W4 = assemble(*s, FormKind::weighted_mass(w, 4.0));
    t.a2 = std::sqrt(W2.quad(pd));
    t.b2 = std::sqrt(W4.quad(pdx) + W4.quad(pdy));
    t.c2 = h * std::sqrt(W2.quad(pdx) + W2.quad(pdy));
    return t;
}

/// Points at offsets (a/6, b/6), a, b = 1..5, of the mesh square of the
/// structured n-mesh containing x0. The same relative positions at every level.
std::vector<Point2> offset_cloud(int n, Point2 x0)
{
    const double i = std::floor(x0.x * n), j = std::floor(x0.y * n);
    std::vector<Point2> pts;
    for (int a = 1; a <= 5; ++a) {
        for (int b = 1; b <= 5; ++b) {
            pts.push_back({(i + a / 6.0) / n, (j + b / 6.0) / n});
        }
    }
    return pts;
}

Eigen::VectorXd random_field(const SpacePtr& s, std::mt19937_64& rng, bool smooth)
{
    std::normal_distribution<double> nd;
    if (!smooth) {
        Eigen::VectorXd v(s->n_interior());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            v[i] = nd(rng);
        }
        return v;
    }
    std::array<double, 16> c{};
    for (double& x : c) {
        x = nd(rng);
    }
    return project(s, from_global([c](Point2 x) {
                       double acc = 0.0;
                       for (int a = 0; a < 4; ++a) {
                           for (int b = 0; b < 4; ++b) {
                               acc += c[4 * a + b] * std::sin((a + 1) * pi * x.x) * std::sin((b + 1) * pi * x.y);
                           }
                       }
                       return acc;
                   }),
                   ProjectionKind::nodal)
        .coeffs;
}

/// ||sigma^a (I - P_h)(sigma^b v)|| + h ||sigma^a grad (I - P_h)(sigma^b v)|| over h ||v||.
double superapprox_ratio(const FeSpace& s, const WeightSpec& w, double a, double b, const Eigen::VectorXd& v)
{
    const Mesh& mesh = s.mesh();
    const Eigen::VectorXd pv = s.mass().solve(load_vector(s, [&](const CellPoint& p) {
        return std::pow(sigma(w, p.x), b) * local_value(s, v, p.cell, p.bary);
    }));
    const auto& rule = triangle_rule(6);
    std::vector<Barycentric> pts;
    for (const auto& p : rule.points) {
        pts.push_back(p.bary);
    }
    const LocalTables tab(s.degree(), pts);
    std::vector<double> e0(mesh.n_cells()), e1(mesh.n_cells());
    for_each_cell(mesh.n_cells(), Exec::parallel, [&](int c) {
        double s0 = 0.0, s1 = 0.0;
        const double area = mesh.cell_area(c);
        for (int i = 0; i < tab.size(); ++i) {
            const Point2 x = mesh.point_at(c, tab.point(i));
            const double sg = sigma(w, x);
            const Vec2 dsg = sigma_gradient(w, x);
            const double vv = tab.value(s, v, c, i);
            const Vec2 vg = tab.gradient(s, v, c, i);
            const double e = std::pow(sg, b) * vv - tab.value(s, pv, c, i);
            const Vec2 eg = b * std::pow(sg, b - 1.0) * vv * dsg + std::pow(sg, b) * vg - tab.gradient(s, pv, c, i);
            const double wt = area * rule.points[i].weight * std::pow(sg, 2.0 * a);
            s0 += wt * e * e;
            s1 += wt * eg.squaredNorm();
        }
        e0[c] = s0;
        e1[c] = s1;
    });
    double t0 = 0.0, t1 = 0.0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
        t0 += e0[c];
        t1 += e1[c];
    }
    const double h = mesh.h;
    const double rhs = h * std::sqrt(s.mass().quad(v));
    return (std::sqrt(t0) + h * std::sqrt(t1)) / rhs;
}

} // namespace

ExperimentReport lemma_suite(const RunConfig& cfg)
{
    auto rep = detail::start_report("lemmas", cfg);
    const auto ns = ladder_or(cfg, {8, 16, 32, 64});
    const Point2 x0 = cfg.x0.value_or(default_x0());
    rep.config["n"] = ns;
    rep.config["x0"] = Json::array({x0.x, x0.y});
    rep.plot_metrics = {"ritz_sup_normalized", "sigma_inv_l2_normalized", "delta_weighted_sum", "delta_projected_sum"};
    rep.notes.push_back("temporal delta is a degree-q polynomial on its slab, not a smooth bump");
    rep.notes.push_back("delta constants are sups over 25 points x0 at fixed offsets inside the mesh square holding "
                        "the configured x0; *_at_x0 columns hold the single-point values");
    const std::vector<double> alphas{0.0, 0.5, 1.0};
    const std::vector<std::pair<double, double>> supers{{-1.0, 2.0}, {0.0, 1.0}};

    for (std::size_t lvl = 0; lvl < ns.size(); ++lvl) {
        const int n = ns[lvl];
        const auto s = level_space(n, cfg.r);
        const Mesh& mesh = s->mesh();
        const double h = mesh.h;
        const int r = cfg.r;
        const auto w = make_weight(x0, cfg.K, h);
        auto& row = rep.add_row(h, 0.0, 0, r);
        row.set("n", n);

        // Ritz projection in the sup norm.
        Evaluable v;
        v.value = [](const CellPoint& p) { return std::sin(pi * p.x.x) * std::sin(pi * p.x.y); };
        v.gradient = [](const CellPoint& p) -> Vec2 {
            return {pi * std::cos(pi * p.x.x) * std::sin(pi * p.x.y), pi * std::sin(pi * p.x.x) * std::cos(pi * p.x.y)};
        };
        const NodalField rh = project(s, v, ProjectionKind::ritz);
        const double ritz_err = sampled_sup(mesh, r, [&](const CellPoint& p) {
            return v.value(p) - local_value(*s, rh.coeffs, p.cell, p.bary);
        });
        const double grad_sup = sampled_sup(mesh, r, [&](const CellPoint& p) { return v.gradient(p).norm(); });
        row.set("ritz_sup_error", ritz_err).set("ritz_sup_normalized", ritz_err / (h * ln_h(h) * grad_sup));

        // Weight properties.
        const double sig_inv = l2_norm_of(mesh, [&](const CellPoint& p) { return 1.0 / sigma(w, p.x); }, 6);
        row.set("sigma_inv_l2", sig_inv).set("sigma_inv_l2_normalized", sig_inv / std::sqrt(ln_h(h)));
        row.set("grad_sigma_max", sampled_sup(mesh, r, [&](const CellPoint& p) { return sigma_gradient(w, p.x).norm(); }));
        {
            const auto lat = sample_lattice(lattice_divisions(r), r);
            const double ratio = cell_max(mesh.n_cells(), Exec::parallel, [&](int c) {
                double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
                for (const auto& b : lat) {
                    const double sg = sigma(w, mesh.point_at(c, b));
                    lo = std::min(lo, sg);
                    hi = std::max(hi, sg);
                }
                return hi / lo;
            });
            row.set("sigma_cell_ratio", ratio);
        }

        // Smoothed delta and its weighted norms: at x0, and as a sup over x0
        // on a fixed lattice of offsets inside the mesh square holding x0.
        const SparseSym& M = s->mass();
        const auto at_x0 = delta_terms(s, x0, cfg.K);
        row.set("sigma_delta", at_x0.a1).set("sigma2_grad_delta", at_x0.b1).set("h_sigma_grad_delta", at_x0.c1);
        row.set("sigma_Ph_delta", at_x0.a2).set("sigma2_Ph_grad_delta", at_x0.b2).set("h_sigma_Ph_grad_delta", at_x0.c2);
        row.set("delta_weighted_sum_at_x0", at_x0.a1 + at_x0.b1 + at_x0.c1);
        row.set("delta_projected_sum_at_x0", at_x0.a2 + at_x0.b2 + at_x0.c2);
        row.set("delta_l2_times_h_at_x0", at_x0.l2h);
        double sup1 = 0.0, sup2 = 0.0, supl2 = 0.0;
        for (const Point2 y : offset_cloud(n, x0)) {
            const auto t = delta_terms(s, y, cfg.K);
            sup1 = std::max(sup1, t.a1 + t.b1 + t.c1);
            sup2 = std::max(sup2, t.a2 + t.b2 + t.c2);
            supl2 = std::max(supl2, t.l2h);
        }
        row.set("delta_weighted_sum", sup1).set("delta_projected_sum", sup2).set("delta_l2_times_h", supl2);
        const auto delta = build_smoothed_delta(*s, x0);
        row.set("delta_moment_residual", moment_residual(*s, delta));
        const NodalField pdd = delta_derivative_field(s, delta, parse_direction(cfg.direction));
        row.set("Ph_D_delta_l1_times_h", h * norm(pdd, NormKind::l1_sampled()));
        for (int q = 0; q <= 2; ++q) {
            const auto tp = build_partition(cfg.T, std::max(4, n));
            row.set("theta_l1_q" + std::to_string(q), build_time_delta(tp, q, cfg.t_tilde * cfg.T).l1_norm());
        }

        // sigma^alpha grad v_h against sigma^{alpha+1} Delta_h v_h and sigma^{alpha-1} v_h.
        std::mt19937_64 rng(cfg.seed + 7919 * lvl);
        const SparseSym& A = s->stiffness();
        std::vector<Eigen::VectorXd> fields;
        for (int i = 0; i < cfg.samples; ++i) {
            fields.push_back(random_field(s, rng, i % 2 == 1));
        }
        for (const double al : alphas) {
            const SparseSym Sa = assemble(*s, FormKind::weighted_stiffness(w, 2.0 * al));
            const SparseSym Wp = assemble(*s, FormKind::weighted_mass(w, 2.0 * al + 2.0));
            const SparseSym Wm = assemble(*s, FormKind::weighted_mass(w, 2.0 * al - 2.0));
            double worst = 0.0;
            for (const auto& f : fields) {
                const Eigen::VectorXd lap = M.solve(A.apply(f));
                const double num = std::sqrt(Sa.quad(f));
                const double den = std::sqrt(Wp.quad(lap)) + std::sqrt(Wm.quad(f));
                worst = std::max(worst, num / den);
            }
            row.set("sigma_alpha_ratio_a" + fmt17(al), worst);
        }

        // Superapproximation.
        const int nsup = std::min(cfg.samples, 6);
        for (const auto& [al, be] : supers) {
            double worst = 0.0;
            for (int i = 0; i < nsup; ++i) {
                worst = std::max(worst, superapprox_ratio(*s, w, al, be, fields[i]));
            }
            row.set("superapprox_a" + fmt17(al) + "_b" + fmt17(be), worst);
        }
    }

    growth_check(rep, "ritz_sup_normalized", rep.column("ritz_sup_normalized"), cfg.window_mid);
    growth_check(rep, "sigma_inv_l2_normalized", rep.column("sigma_inv_l2_normalized"), cfg.window_tight);
    double gmax = 0.0;
    for (double g : rep.column("grad_sigma_max")) {
        gmax = std::max(gmax, g);
    }
    rep.check("grad_sigma_max", gmax, 1.0 + 1e-12);
    growth_check(rep, "sigma_cell_ratio", rep.column("sigma_cell_ratio"), cfg.window_tight);
    growth_check(rep, "delta_weighted_sum", rep.column("delta_weighted_sum"), cfg.window_tight);
    growth_check(rep, "delta_projected_sum", rep.column("delta_projected_sum"), cfg.window_tight);
    growth_check(rep, "delta_l2_times_h", rep.column("delta_l2_times_h"), cfg.window_tight);
    growth_check(rep, "Ph_D_delta_l1_times_h", rep.column("Ph_D_delta_l1_times_h"), cfg.window_mid);
    for (const double al : alphas) {
        const std::string m = "sigma_alpha_ratio_a" + fmt17(al);
        rep.check(m, consecutive_growth(rep.column(m)), cfg.window_loose, true, "largest growth under one refinement");
    }
    for (const auto& [al, be] : supers) {
        const std::string m = "superapprox_a" + fmt17(al) + "_b" + fmt17(be);
        growth_check(rep, m, rep.column(m), cfg.window_loose);
    }
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

SectorSpec sector_from(const RunConfig& cfg)
{
    SectorSpec spec = default_sector(cfg.gamma);
    if (!cfg.rays.empty()) {
        spec.rays = cfg.rays;
    }
    if (!cfg.radii.empty()) {
        spec.radii = cfg.radii;
    }
    return spec;
}

OpNormOptions opnorm_options(const RunConfig& cfg)
{
    OpNormOptions o;
    o.method = cfg.eig_method == "power" ? EigenMethod::power : EigenMethod::lanczos;
    o.tol = cfg.tol;
    o.max_iter = cfg.max_iter;
    o.seed = cfg.seed;
    return o;
}

Json sector_json(const SectorSpec& s)
{
    return Json{{"gamma", s.gamma}, {"rays", s.rays}, {"radii", s.radii}};
}

} // namespace

ExperimentReport resolvent_study(const RunConfig& cfg)
{
    auto rep = detail::start_report("resolvent", cfg);
    const auto ns = ladder_or(cfg, {8, 16, 32, 64});
    const auto names = cfg.norms.empty() ? std::vector<std::string>{"L2", "weighted_L2", "weighted_Hm1"} : cfg.norms;
    const Point2 x0 = cfg.x0.value_or(default_x0());
    const SectorSpec spec = sector_from(cfg);
    const auto opt = opnorm_options(cfg);
    rep.config["n"] = ns;
    rep.config["norms"] = names;
    rep.config["x0"] = Json::array({x0.x, x0.y});
    rep.config["sector"] = sector_json(spec);
    rep.notes.push_back("S(h) = sup over the scan of |z| * operator norm; normalized by 1, |ln h|, |ln h|^{1/2} "
                        "for L2, weighted_L2, weighted_Hm1");

    auto pow_for = [](const std::string& k) { return k == "L2" ? 0.0 : (k == "weighted_L2" ? 1.0 : 0.5); };
    int failed = 0;
    std::vector<ReportRow> scan_rows;
    for (const int n : ns) {
        const auto s = level_space(n, cfg.r);
        const double h = s->mesh().h;
        const auto w = make_weight(x0, cfg.K, h);
        std::vector<NormKind> kinds;
        for (const auto& k : names) {
            kinds.push_back(k == "L2" ? NormKind::l2()
                                      : (k == "weighted_L2" ? NormKind::weighted_l2(w, 2.0) : NormKind::weighted_hm1(w)));
        }
        const auto rows = sector_scan(s, spec, kinds, opt);
        auto& row = rep.add_row(h, 0.0, 0, cfg.r);
        row.set("n", n).set("dofs", s->n_interior());
        for (std::size_t j = 0; j < names.size(); ++j) {
            double S = 0.0;
            int bad = 0;
            for (const auto& sr : rows) {
                if (sr.norm_kind != kinds[j].name()) {
                    continue;
                }
                if (!sr.error.empty()) {
                    ++bad;
                    continue;
                }
                S = std::max(S, sr.scaled);
            }
            failed += bad;
            row.set("S_" + names[j], S).set("S_" + names[j] + "_normalized", S / std::pow(ln_h(h), pow_for(names[j])));
            row.set("failed_" + names[j], bad);
        }
        for (const auto& sr : rows) {
            ReportRow r;
            r.h = h;
            r.r = cfg.r;
            r.set("z_re", sr.z.real()).set("z_im", sr.z.imag()).set("opnorm", sr.opnorm).set("scaled", sr.scaled);
            r.set("iterations", sr.iterations);
            r.flags.push_back("scan:" + sr.norm_kind);
            if (!sr.error.empty()) {
                r.flags.push_back(std::string(kExcluded) + " " + sr.error);
            }
            scan_rows.push_back(std::move(r));
        }
    }
    rep.rows.insert(rep.rows.end(), scan_rows.begin(), scan_rows.end());
    rep.check("failed_rows", failed, 0.0);

    for (const auto& k : names) {
        const auto S = rep.column("S_" + k);
        const auto hs = rep.h_column("S_" + k);
        rep.plot_metrics.push_back("S_" + k + "_normalized");
        if (k == "weighted_Hm1") {
            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = 0; i < S.size(); ++i) {
                pts.emplace_back(hs[i], S[i]);
            }
            if (pts.size() >= 3) {
                const auto fit = fit_log_constant(pts, ModelTag::ln_h_pow);
                rep.fits.push_back({"S_weighted_Hm1", fit});
                rep.check("hm1_log_exponent", fit.p, 0.75);
            }
            growth_check(rep, "S_weighted_Hm1_normalized", rep.column("S_weighted_Hm1_normalized"), cfg.window_mid);
        } else if (k == "weighted_L2") {
            growth_check(rep, "S_weighted_L2_normalized", rep.column("S_weighted_L2_normalized"), cfg.window_mid);
        } else {
            rep.check("S_L2_spread", S.size() >= 2 ? spread(S) : std::numeric_limits<double>::quiet_NaN(),
                      cfg.window_const, true, "two-sided spread max/min - 1");
        }
    }
    return rep;
}

ExperimentReport resolvent_oracle(const RunConfig& cfg)
{
    auto rep = detail::start_report("resolvent-oracle", cfg);
    const int n = ladder_or(cfg, {4}).front();
    const SectorSpec spec = sector_from(cfg);
    rep.config["n"] = std::vector<int>{n};
    rep.config["sector"] = sector_json(spec);
    const auto s = level_space(n, cfg.r);
    const auto lambdas = dense_spectrum(*s);
    const auto opt = opnorm_options(cfg);
    double worst = 0.0;
    for (const Complex z : sector_points(spec)) {
        const auto res = weighted_operator_norm(s, z, NormKind::l2(), ResolventMap::resolvent, opt);
        const double ref = spectral_resolvent_norm(lambdas, z);
        const double rel = std::abs(res.value - ref) / ref;
        worst = std::max(worst, rel);
        auto& row = rep.add_row(s->mesh().h, 0.0, 0, cfg.r);
        row.set("z_re", z.real()).set("z_im", z.imag()).set("opnorm", res.value).set("spectral", ref);
        row.set("relative_difference", rel).set("iterations", res.iterations);
    }
    rep.check("spectral_agreement", worst, 1e-6, true, "max relative difference over the sector samples");
    return rep;
}

ExperimentReport lemma42_study(const RunConfig& cfg)
{
    auto rep = detail::start_report("lemma42", cfg);
    const auto res = complex_lemma_sample(cfg.gamma, cfg.count, cfg.seed);
    auto& row = rep.add_row(0.0, 0.0, 0, 0);
    row.set("count", static_cast<double>(res.count)).set("violations", static_cast<double>(res.violations));
    row.set("max_ratio", res.max_ratio).set("c_gamma", res.c_gamma);
    rep.check("violations", static_cast<double>(res.violations), 0.0);
    rep.notes.push_back("violation means ratio > C_gamma (1 + 1e-12)");
    return rep;
}

} // namespace heatwave
