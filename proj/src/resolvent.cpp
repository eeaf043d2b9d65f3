#include "heatwave/resolvent.hpp"

#include "heatwave/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace heatwave {

SectorSpec default_sector(double gamma)
{
    SectorSpec s;
    s.gamma = gamma;
    s.rays = {0.75 * std::numbers::pi, std::numbers::pi};
    for (int i = 0; i < 12; ++i) {
        s.radii.push_back(std::pow(10.0, -1.0 + 5.0 * i / 11.0));
    }
    return s;
}

std::vector<Complex> sector_points(const SectorSpec& spec)
{
    if (!(spec.gamma > 0.0) || !(spec.gamma < 0.5 * std::numbers::pi)) {
        throw ValidationError("gamma must lie in (0, pi/2)");
    }
    std::vector<Complex> out;
    for (const double th : spec.rays) {
        if (std::abs(th) < spec.gamma - 1e-15 || std::abs(th) > std::numbers::pi + 1e-15) {
            throw ValidationError("ray argument " + std::to_string(th) + " is inside the sector |arg z| <= gamma");
        }
        for (const double r : spec.radii) {
            if (!(r > 0.0)) {
                throw ValidationError("sector radii must be positive");
            }
            out.push_back(std::polar(r, th));
        }
    }
    return out;
}

namespace {

using CSparse = Eigen::SparseMatrix<Complex>;
using CVec = Eigen::VectorXcd;

class Shifted {
public:
    Shifted(const FeSpace& s, Complex z) : M_(s.mass())
    {
        CSparse sys = z * s.mass().matrix().cast<Complex>() - s.stiffness().matrix().cast<Complex>();
        sys.makeCompressed();
        lu_.compute(sys);
        if (lu_.info() != Eigen::Success) {
            std::ostringstream os;
            os << "shifted system singular at z = " << z;
            throw SolverError(os.str());
        }
        sys_ = std::move(sys);
    }
    /// (zM - A)^{-1} b
    [[nodiscard]] CVec solve(const CVec& b) const
    {
        CVec x = lu_.solve(b);
        // one step of refinement
        x += lu_.solve(CVec(b - sys_ * x));
        return x;
    }
    /// (conj(z) M - A)^{-1} b
    [[nodiscard]] CVec solve_conj(const CVec& b) const { return solve(b.conjugate()).conjugate(); }
    /// T x = (zM - A)^{-1} M x
    [[nodiscard]] CVec T(const CVec& x) const { return solve(M_.apply(x)); }
    /// T^H y = M (conj(z) M - A)^{-1} y
    [[nodiscard]] CVec TH(const CVec& y) const { return M_.apply(solve_conj(y)); }

private:
    const SparseSym& M_;
    Eigen::SparseLU<CSparse> lu_;
    CSparse sys_;
};

/// SPD Gram form of a norm with its inverse.
struct Gram {
    std::function<CVec(const CVec&)> apply;
    std::function<CVec(const CVec&)> inverse;
};

Gram make_gram(const SpacePtr& s, const NormKind& kind, ResolventMap map)
{
    const SparseSym& M = s->mass();
    const SparseSym& A = s->stiffness();
    if (map == ResolventMap::hm1_conjugated_resolvent && kind.tag != NormTag::weighted_hm1) {
        throw ValidationError("the conjugated map needs the weighted_Hm1 norm");
    }
    switch (kind.tag) {
    case NormTag::l2:
        return {[&M](const CVec& x) { return M.apply(x); }, [&M](const CVec& x) { return M.solve(x); }};
    case NormTag::weighted_l2: {
        if (std::abs(kind.weight->h - s->mesh().h) > 1e-12 * s->mesh().h) {
            throw ValidationError("weight h does not match the mesh");
        }
        auto W = std::make_shared<SparseSym>(assemble(*s, FormKind::weighted_mass(*kind.weight, kind.power)));
        return {[W](const CVec& x) { return W->apply(x); }, [W](const CVec& x) { return W->solve(x); }};
    }
    case NormTag::weighted_hm1: {
        if (std::abs(kind.weight->h - s->mesh().h) > 1e-12 * s->mesh().h) {
            throw ValidationError("weight h does not match the mesh");
        }
        auto As =
            std::make_shared<SparseSym>(assemble(*s, FormKind::weighted_stiffness(*kind.weight, kind.weight->N)));
        if (map == ResolventMap::hm1_conjugated_resolvent) {
            return {[As](const CVec& x) { return As->apply(x); }, [As](const CVec& x) { return As->solve(x); }};
        }
        // W = M A^{-1} A_sigma A^{-1} M
        return {[As, &M, &A](const CVec& x) { return M.apply(A.solve(As->apply(A.solve(M.apply(x))))); },
                [As, &M, &A](const CVec& x) { return M.solve(A.apply(As->solve(A.apply(M.solve(x))))); }};
    }
    default:
        throw ValidationError("operator norms support L2, weighted_L2 and weighted_Hm1, not " + kind.name());
    }
}

double wdot_re(const CVec& a, const CVec& Wb) { return a.dot(Wb).real(); }

CVec random_vector(Eigen::Index n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    CVec x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = nd(rng);
        const double im = nd(rng);
        x[i] = Complex(re, im);
    }
    return x;
}

OpNormResult run_lanczos(const std::function<CVec(const CVec&)>& B, const Gram& W, Eigen::Index n,
                         const OpNormOptions& opt)
{
    OpNormResult res;
    std::vector<CVec> Q, WQ;
    std::vector<double> alpha, beta;
    CVec q = random_vector(n, opt.seed);
    CVec Wq = W.apply(q);
    double nq = std::sqrt(wdot_re(q, Wq));
    q /= nq;
    Wq /= nq;
    const int cap = static_cast<int>(std::min<Eigen::Index>(opt.max_iter, n));
    double theta = 0.0;
    for (int j = 0; j < cap; ++j) {
        Q.push_back(q);
        WQ.push_back(Wq);
        CVec v = B(q);
        alpha.push_back(WQ.back().dot(v).real());
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < Q.size(); ++i) {
                v -= WQ[i].dot(v) * Q[i];
            }
        }
        CVec Wv = W.apply(v);
        const double b = std::sqrt(std::max(0.0, wdot_re(v, Wv)));
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd Tm = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            Tm(i, i) = alpha[i];
            if (i + 1 < m) {
                Tm(i, i + 1) = Tm(i + 1, i) = beta[i];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tm);
        theta = es.eigenvalues()[m - 1];
        const double resid = b * std::abs(es.eigenvectors()(m - 1, m - 1));
        res.iterations = j + 1;
        res.achieved_tol = theta > 0.0 ? resid / theta : resid;
        if (res.achieved_tol <= opt.tol || b <= 1e-14 * std::max(theta, 1e-300) || j + 1 == n) {
            res.converged = true;
            if (j + 1 == n && res.achieved_tol > opt.tol) {
                res.achieved_tol = 0.0; // Krylov space exhausted: Ritz values are exact
            }
            break;
        }
        beta.push_back(b);
        q = v / b;
        Wq = Wv / b;
    }
    res.value = std::sqrt(std::max(0.0, theta));
    return res;
}

OpNormResult run_power(const std::function<CVec(const CVec&)>& B, const Gram& W, Eigen::Index n,
                       const OpNormOptions& opt)
{
    OpNormResult res;
    CVec x = random_vector(n, opt.seed);
    x /= std::sqrt(wdot_re(x, W.apply(x)));
    double mu_prev = 0.0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        const CVec y = B(x);
        const CVec Wy = W.apply(y);
        const double mu = wdot_re(x, W.apply(y));
        const double ny = std::sqrt(wdot_re(y, Wy));
        res.iterations = it;
        res.achieved_tol = std::abs(mu - mu_prev) / std::max(std::abs(mu), 1e-300);
        if (ny == 0.0) {
            res.converged = true;
            mu_prev = 0.0;
            break;
        }
        x = y / ny;
        if (it > 1 && res.achieved_tol <= opt.tol) {
            res.converged = true;
            mu_prev = mu;
            break;
        }
        mu_prev = mu;
    }
    res.value = std::sqrt(std::max(0.0, mu_prev));
    return res;
}

OpNormResult opnorm_with(const FeSpace& s, const Shifted* sh, const Gram& W, ResolventMap map,
                         const OpNormOptions& opt)
{
    const Eigen::Index n = s.n_interior();
    if (n == 0) {
        return {0.0, 0, 0.0, true};
    }
    std::function<CVec(const CVec&)> B;
    if (map == ResolventMap::identity) {
        B = [](const CVec& x) { return x; };
    } else {
        B = [sh, &W](const CVec& x) { return W.inverse(sh->TH(W.apply(sh->T(x)))); };
    }
    OpNormResult r = opt.method == EigenMethod::lanczos ? run_lanczos(B, W, n, opt) : run_power(B, W, n, opt);
    if (!r.converged) {
        std::ostringstream os;
        os << "operator norm iteration did not converge in " << r.iterations << " steps (achieved "
           << r.achieved_tol << ", requested " << opt.tol << ")";
        throw SolverError(os.str());
    }
    return r;
}

void check_threshold(const FeSpace& s, const OpNormOptions& opt)
{
    if (s.n_interior() > opt.dense_threshold) {
        throw ValidationError("space has " + std::to_string(s.n_interior()) + " interior dofs, above the threshold " +
                              std::to_string(opt.dense_threshold));
    }
}

} // namespace

ComplexField shifted_solve(const SpacePtr& s, Complex z, const ComplexField& x)
{
    const Shifted sh(*s, z);
    return {s, sh.T(x.coeffs)};
}

OpNormResult weighted_operator_norm(const SpacePtr& s, Complex z, const NormKind& kind, ResolventMap map,
                                    const OpNormOptions& opt)
{
    check_threshold(*s, opt);
    const Gram W = make_gram(s, kind, map);
    if (map == ResolventMap::identity) {
        return opnorm_with(*s, nullptr, W, map, opt);
    }
    const Shifted sh(*s, z);
    return opnorm_with(*s, &sh, W, map, opt);
}

std::vector<ScanRow> sector_scan(const SpacePtr& s, const SectorSpec& spec, const std::vector<NormKind>& kinds,
                                 const OpNormOptions& opt)
{
    check_threshold(*s, opt);
    const auto zs = sector_points(spec);
    std::vector<Gram> grams;
    for (const auto& k : kinds) {
        grams.push_back(make_gram(s, k, ResolventMap::resolvent));
    }
    // factor the shared real forms before going parallel
    (void)s->mass().solve(Eigen::VectorXd(Eigen::VectorXd::Ones(s->n_interior())));
    (void)s->stiffness().solve(Eigen::VectorXd(Eigen::VectorXd::Ones(s->n_interior())));
    std::vector<ScanRow> rows(zs.size() * kinds.size());
    for_each_cell(static_cast<int>(zs.size()), Exec::parallel, [&](int iz) {
        const Complex z = zs[iz];
        std::unique_ptr<Shifted> sh;
        std::string fail;
        try {
            sh = std::make_unique<Shifted>(*s, z);
        } catch (const std::exception& e) {
            fail = e.what();
        }
        for (std::size_t ik = 0; ik < kinds.size(); ++ik) {
            ScanRow& row = rows[iz * kinds.size() + ik];
            row.h = s->mesh().h;
            row.z = z;
            row.norm_kind = kinds[ik].name();
            if (!sh) {
                row.error = fail;
                continue;
            }
            try {
                const auto r = opnorm_with(*s, sh.get(), grams[ik], ResolventMap::resolvent, opt);
                row.opnorm = r.value;
                row.scaled = std::abs(z) * r.value;
                row.iterations = r.iterations;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    });
    return rows;
}

std::vector<double> dense_spectrum(const FeSpace& s)
{
    if (s.n_interior() > 2000) {
        throw ValidationError("dense spectrum limited to 2000 interior dofs");
    }
    const Eigen::MatrixXd A = Eigen::MatrixXd(s.stiffness().matrix());
    const Eigen::MatrixXd M = Eigen::MatrixXd(s.mass().matrix());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
    if (es.info() != Eigen::Success) {
        throw SolverError("dense generalized eigensolve failed");
    }
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

double spectral_resolvent_norm(const std::vector<double>& lambdas, Complex z)
{
    double m = 0.0;
    for (const double l : lambdas) {
        m = std::max(m, 1.0 / std::abs(z - l));
    }
    return m;
}

double lemma42_ratio(Complex z, double alpha, double beta)
{
    const double a2 = alpha * alpha, b2 = beta * beta;
    return (std::abs(z) * a2 + b2) / std::abs(-z * a2 + b2);
}

Lemma42Result complex_lemma_sample(double gamma, long count, std::uint64_t seed)
{
    if (!(gamma > 0.0) || !(gamma < 0.5 * std::numbers::pi)) {
        throw ValidationError("gamma must lie in (0, pi/2)");
    }
    Lemma42Result r;
    r.count = count;
    r.c_gamma = 1.0 / std::sin(0.5 * gamma);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> expo(-6.0, 6.0);
    std::uniform_real_distribution<double> arg(gamma, std::numbers::pi);
    std::bernoulli_distribution sign(0.5);
    for (long i = 0; i < count; ++i) {
        const double mod = std::pow(10.0, expo(rng));
        double th = arg(rng);
        if (sign(rng)) {
            th = -th;
        }
        const double alpha = std::pow(10.0, expo(rng));
        const double beta = std::pow(10.0, expo(rng));
        const double ratio = lemma42_ratio(std::polar(mod, th), alpha, beta);
        r.max_ratio = std::max(r.max_ratio, ratio);
        // the bound is attained on the sector boundary, so allow rounding
        if (ratio > r.c_gamma * (1.0 + 1e-12)) {
            ++r.violations;
        }
    }
    return r;
}

} // namespace heatwave
