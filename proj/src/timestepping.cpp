#include "heatwave/timestepping.hpp"

#include "heatwave/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

namespace heatwave {

// ---------------------------------------------------------------------------
// Partitions

int TimePartition::slab_of(double time) const
{
    if (!(time > t.front()) || time > t.back()) {
        throw DomainError("time " + std::to_string(time) + " outside (0, " + std::to_string(T) + "]");
    }
    // first breakpoint >= time
    const auto it = std::lower_bound(t.begin() + 1, t.end(), time);
    return static_cast<int>(it - t.begin());
}

TimePartition build_partition(double T, int M, PartitionKind kind, double ratio)
{
    if (!(T > 0.0) || M < 1) {
        throw ValidationError("partition needs T > 0 and M >= 1");
    }
    if (kind == PartitionKind::geometric && !(ratio > 0.0)) {
        throw ValidationError("geometric partition needs ratio > 0");
    }
    TimePartition tp;
    tp.T = T;
    tp.t.resize(M + 1);
    tp.t[0] = 0.0;
    if (kind == PartitionKind::uniform || ratio == 1.0) {
        for (int m = 1; m <= M; ++m) {
            tp.t[m] = T * m / M;
        }
    } else {
        double sum = 0.0, step = 1.0;
        std::vector<double> steps(M);
        for (int m = 0; m < M; ++m) {
            steps[m] = step;
            sum += step;
            step *= ratio;
        }
        double acc = 0.0;
        for (int m = 1; m <= M; ++m) {
            acc += steps[m - 1];
            tp.t[m] = T * acc / sum;
        }
    }
    tp.t[M] = T;
    tp.k = 0.0;
    tp.k_min = T;
    tp.kappa = 1.0;
    for (int m = 1; m <= M; ++m) {
        tp.k = std::max(tp.k, tp.step(m));
        tp.k_min = std::min(tp.k_min, tp.step(m));
        if (m > 1) {
            const double q = tp.step(m) / tp.step(m - 1);
            tp.kappa = std::max(tp.kappa, std::max(q, 1.0 / q));
        }
    }
    if (tp.k > T / 4.0 * (1.0 + 1e-14)) {
        throw ValidationError("time step k = " + std::to_string(tp.k) + " exceeds T/4");
    }
    return tp;
}

// ---------------------------------------------------------------------------
// Temporal basis

namespace {

std::vector<double> radau_nodes(int q)
{
    switch (q) {
    case 0:
        return {1.0};
    case 1:
        return {1.0 / 3.0, 1.0};
    case 2:
        return {(4.0 - std::sqrt(6.0)) / 10.0, (4.0 + std::sqrt(6.0)) / 10.0, 1.0};
    default:
        throw ValidationError("temporal degree must be 0, 1 or 2, got " + std::to_string(q));
    }
}

TemporalBasis make_basis(int q)
{
    TemporalBasis b;
    b.q = q;
    b.nodes = radau_nodes(q);
    const int n = q + 1;
    b.T = Eigen::MatrixXd::Zero(n, n);
    b.S = Eigen::MatrixXd::Zero(n, n);
    b.D = Eigen::MatrixXd::Zero(n, n);
    b.at0 = b.values(0.0);
    b.at1 = b.values(1.0);
    const auto rule = gauss_legendre(q + 2);
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
        const auto v = b.values(rule.nodes[g]);
        const auto d = b.derivatives(rule.nodes[g]);
        const double w = rule.weights[g];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                b.S(i, j) += w * v[j] * v[i];
                b.D(i, j) += w * v[j] * d[i];
                b.T(i, j) += w * d[j] * v[i];
            }
        }
    }
    b.T += b.at0 * b.at0.transpose();
    return b;
}

} // namespace

double TemporalBasis::value(int j, double tau) const
{
    double v = 1.0;
    for (int i = 0; i <= q; ++i) {
        if (i != j) {
            v *= (tau - nodes[i]) / (nodes[j] - nodes[i]);
        }
    }
    return v;
}

double TemporalBasis::derivative(int j, double tau) const
{
    double sum = 0.0;
    for (int l = 0; l <= q; ++l) {
        if (l == j) {
            continue;
        }
        double p = 1.0 / (nodes[j] - nodes[l]);
        for (int i = 0; i <= q; ++i) {
            if (i != j && i != l) {
                p *= (tau - nodes[i]) / (nodes[j] - nodes[i]);
            }
        }
        sum += p;
    }
    return sum;
}

Eigen::VectorXd TemporalBasis::values(double tau) const
{
    Eigen::VectorXd v(q + 1);
    for (int j = 0; j <= q; ++j) {
        v[j] = value(j, tau);
    }
    return v;
}

Eigen::VectorXd TemporalBasis::derivatives(double tau) const
{
    Eigen::VectorXd v(q + 1);
    for (int j = 0; j <= q; ++j) {
        v[j] = derivative(j, tau);
    }
    return v;
}

const TemporalBasis& temporal_basis(int q)
{
    static const TemporalBasis b0 = make_basis(0);
    static const TemporalBasis b1 = make_basis(1);
    static const TemporalBasis b2 = make_basis(2);
    switch (q) {
    case 0:
        return b0;
    case 1:
        return b1;
    case 2:
        return b2;
    default:
        throw ValidationError("temporal degree must be 0, 1 or 2, got " + std::to_string(q));
    }
}

// ---------------------------------------------------------------------------
// Space-time fields

Eigen::VectorXd SpaceTimeField::on_slab(int m, double tau) const { return blocks[m - 1] * basis().values(tau); }

Eigen::VectorXd SpaceTimeField::time_derivative(int m, double tau) const
{
    return blocks[m - 1] * basis().derivatives(tau) / partition.step(m);
}

Eigen::VectorXd SpaceTimeField::at(double time) const
{
    const int m = partition.slab_of(time);
    return on_slab(m, (time - partition.t[m - 1]) / partition.step(m));
}

Eigen::VectorXd SpaceTimeField::left_limit(int m) const
{
    if (m == 0) {
        return initial;
    }
    return blocks[m - 1].col(q);
}

Eigen::VectorXd SpaceTimeField::right_limit(int m) const { return on_slab(m + 1, 0.0); }

Eigen::VectorXd SpaceTimeField::jump(int m) const { return right_limit(m) - left_limit(m); }

double eval_value(const SpaceTimeField& u, double time, Point2 p)
{
    return evaluate_value(NodalField{u.space, u.at(time)}, p);
}

Vec2 eval_gradient(const SpaceTimeField& u, double time, Point2 p)
{
    return evaluate_gradient(NodalField{u.space, u.at(time)}, p);
}

namespace {

int breakpoint_index(const TimePartition& tp, double time)
{
    for (int m = 0; m <= tp.M(); ++m) {
        if (std::abs(tp.t[m] - time) <= 1e-14 * std::max(1.0, tp.T)) {
            return m;
        }
    }
    throw DomainError("time " + std::to_string(time) + " is not a breakpoint");
}

} // namespace

NodalField left_limit_field(const SpaceTimeField& u, double time)
{
    return {u.space, u.left_limit(breakpoint_index(u.partition, time))};
}

NodalField right_limit_field(const SpaceTimeField& u, double time)
{
    const int m = breakpoint_index(u.partition, time);
    if (m == u.partition.M()) {
        throw DomainError("no right limit at the final time");
    }
    return {u.space, u.right_limit(m)};
}

// ---------------------------------------------------------------------------
// Loads

LoadFn forcing_load(const SpacePtr& s, std::function<double(double, const CellPoint&)> f)
{
    return [s, f = std::move(f)](double t) {
        return load_vector(*s, [&](const CellPoint& p) { return f(t, p); });
    };
}

LoadFn weak_form_load(const SpacePtr& s, const ExactSolution& exact)
{
    return [s, exact](double t) {
        Eigen::VectorXd b = load_vector(*s, [&](const CellPoint& p) { return exact.time_derivative(t, p.x); });
        b += gradient_load_vector(*s, [&](const CellPoint& p) { return exact.gradient(t, p.x); });
        return b;
    };
}

double manufactured_defect(const ProblemSpec& prob, double T, int samples)
{
    if (!prob.exact || !prob.exact->laplacian || !prob.f) {
        throw ValidationError("manufactured check needs an exact solution with Laplacian and a forcing");
    }
    const auto& ex = *prob.exact;
    double worst = 0.0;
    for (int a = 1; a <= samples; ++a) {
        for (int b = 1; b <= samples; ++b) {
            const Point2 x{(a - 0.5) / samples, (b - 0.5) / samples};
            for (int c = 1; c <= 4; ++c) {
                const double t = T * c / 4.0;
                const double f = prob.f(t, CellPoint{-1, x, {}});
                const double d = ex.time_derivative(t, x) - ex.laplacian(t, x) - f;
                worst = std::max(worst, std::abs(d) / std::max(1.0, std::abs(f)));
            }
        }
    }
    return worst;
}

Eigen::MatrixXd slab_load(const LoadFn& load, double t0, double k, int q)
{
    const auto rule = gauss_legendre(q + 2);
    const auto& tb = temporal_basis(q);
    Eigen::MatrixXd F;
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
        const Eigen::VectorXd b = load(t0 + k * rule.nodes[g]);
        if (g == 0) {
            F = Eigen::MatrixXd::Zero(b.size(), q + 1);
        }
        const auto v = tb.values(rule.nodes[g]);
        for (int i = 0; i <= q; ++i) {
            F.col(i) += k * rule.weights[g] * v[i] * b;
        }
    }
    return F;
}

// ---------------------------------------------------------------------------
// Slab solver

namespace {

using CSparse = Eigen::SparseMatrix<std::complex<double>>;

/// Temporal diagonalization of C = (S^{-1} T)^T, reused for every slab.
struct Diagonalization {
    Eigen::VectorXcd d;
    Eigen::MatrixXcd V, Vinv, SinvT_V; // S^{-T} V
};

const Diagonalization& diagonalization(int q)
{
    static const auto make = [](int qq) {
        const auto& tb = temporal_basis(qq);
        const Eigen::MatrixXd C = tb.S.lu().solve(tb.T).transpose();
        Eigen::EigenSolver<Eigen::MatrixXd> es(C);
        Diagonalization dg;
        dg.d = es.eigenvalues();
        dg.V = es.eigenvectors();
        dg.Vinv = dg.V.inverse();
        dg.SinvT_V = tb.S.transpose().cast<std::complex<double>>().lu().solve(dg.V);
        return dg;
    };
    static const Diagonalization d0 = make(0), d1 = make(1), d2 = make(2);
    return q == 0 ? d0 : (q == 1 ? d1 : d2);
}

class SlabSolver {
public:
    SlabSolver(const SparseSym& M, const SparseSym& A, int q, BlockSolve method)
        : M_(M), A_(A), q_(q), method_(method)
    {
    }

    Eigen::MatrixXd solve(double k, const Eigen::MatrixXd& G)
    {
        return method_ == BlockSolve::diagonalized ? solve_diag(k, G) : solve_block(k, G);
    }

private:
    using CLU = Eigen::SparseLU<CSparse>;
    using RLU = Eigen::SparseLU<SparseMatrix>;

    Eigen::MatrixXd solve_diag(double k, const Eigen::MatrixXd& G)
    {
        const auto& dg = diagonalization(q_);
        auto& facs = diag_cache_[k];
        if (facs.empty()) {
            const CSparse Mc = M_.matrix().cast<std::complex<double>>();
            const CSparse Ac = A_.matrix().cast<std::complex<double>>();
            for (int j = 0; j <= q_; ++j) {
                CSparse sys = dg.d[j] * Mc + std::complex<double>(k) * Ac;
                sys.makeCompressed();
                auto lu = std::make_unique<CLU>();
                lu->compute(sys);
                if (lu->info() != Eigen::Success) {
                    throw SolverError("slab system factorization failed");
                }
                facs.push_back(std::move(lu));
            }
        }
        const Eigen::MatrixXcd rhs = G.cast<std::complex<double>>() * dg.SinvT_V;
        Eigen::MatrixXcd W(G.rows(), q_ + 1);
        for (int j = 0; j <= q_; ++j) {
            W.col(j) = facs[j]->solve(rhs.col(j));
        }
        return (W * dg.Vinv).real();
    }

    Eigen::MatrixXd solve_block(double k, const Eigen::MatrixXd& G)
    {
        const auto& tb = temporal_basis(q_);
        const Eigen::Index n = G.rows();
        auto& lu = block_cache_[k];
        if (!lu) {
            std::vector<Eigen::Triplet<double>> trip;
            for (int i = 0; i <= q_; ++i) {
                for (int j = 0; j <= q_; ++j) {
                    for (const auto* mat : {&M_.matrix(), &A_.matrix()}) {
                        const double s = mat == &M_.matrix() ? tb.T(i, j) : k * tb.S(i, j);
                        if (s == 0.0) {
                            continue;
                        }
                        for (int c = 0; c < mat->outerSize(); ++c) {
                            for (SparseMatrix::InnerIterator it(*mat, c); it; ++it) {
                                trip.emplace_back(i * n + it.row(), j * n + it.col(), s * it.value());
                            }
                        }
                    }
                }
            }
            SparseMatrix big((q_ + 1) * n, (q_ + 1) * n);
            big.setFromTriplets(trip.begin(), trip.end());
            big.makeCompressed();
            lu = std::make_unique<RLU>();
            lu->compute(big);
            if (lu->info() != Eigen::Success) {
                throw SolverError("block slab system factorization failed");
            }
        }
        const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(G.data(), G.size());
        const Eigen::VectorXd x = lu->solve(rhs);
        return Eigen::Map<const Eigen::MatrixXd>(x.data(), n, q_ + 1);
    }

    const SparseSym& M_;
    const SparseSym& A_;
    int q_;
    BlockSolve method_;
    std::map<double, std::vector<std::unique_ptr<CLU>>> diag_cache_;
    std::map<double, std::unique_ptr<RLU>> block_cache_;
};

/// Columns: residual of block row i on one slab (primal form).
Eigen::MatrixXd primal_apply(const SparseSym& M, const SparseSym& A, const TemporalBasis& tb, double k,
                             const Eigen::MatrixXd& U, const Eigen::VectorXd& prev)
{
    const Eigen::MatrixXd MU = M.matrix() * U;
    const Eigen::MatrixXd AU = A.matrix() * U;
    Eigen::MatrixXd out = MU * tb.T.transpose() + k * AU * tb.S.transpose();
    const Eigen::VectorXd Mprev = M.matrix() * prev;
    for (int i = 0; i <= tb.q; ++i) {
        out.col(i) -= tb.at0[i] * Mprev;
    }
    return out;
}

/// Dual form: -sum_j (int l_j l_i') M U_j + k S A U + l_i(1) M u_m^- - [m >= 2] l_i(0) M u_{m-1}^-.
Eigen::MatrixXd dual_apply(const SparseSym& M, const SparseSym& A, const TemporalBasis& tb, double k,
                           const Eigen::MatrixXd& U, const Eigen::VectorXd& prev, bool first)
{
    const Eigen::MatrixXd MU = M.matrix() * U;
    const Eigen::MatrixXd AU = A.matrix() * U;
    Eigen::MatrixXd out = -MU * tb.D.transpose() + k * AU * tb.S.transpose();
    const Eigen::VectorXd Mlast = MU.col(tb.q);
    const Eigen::VectorXd Mprev = M.matrix() * prev;
    for (int i = 0; i <= tb.q; ++i) {
        out.col(i) += tb.at1[i] * Mlast;
        if (!first) {
            out.col(i) -= tb.at0[i] * Mprev;
        }
    }
    return out;
}

} // namespace

std::vector<Eigen::MatrixXd> dg_solve_algebraic(const SparseSym& M, const SparseSym& A, const TimePartition& tp,
                                                int q, const LoadFn& load, const Eigen::VectorXd& initial,
                                                const DgOptions& opt)
{
    const auto& tb = temporal_basis(q);
    const Eigen::Index n = M.size();
    if (A.size() != n || initial.size() != n) {
        throw ValidationError("dimension mismatch in dG system");
    }
    SlabSolver solver(M, A, q, opt.method);
    std::vector<Eigen::MatrixXd> blocks;
    blocks.reserve(tp.M());
    Eigen::VectorXd prev = initial;
    for (int m = 1; m <= tp.M(); ++m) {
        const double k = tp.step(m);
        Eigen::MatrixXd F = load ? slab_load(load, tp.t[m - 1], k, q) : Eigen::MatrixXd::Zero(n, q + 1);
        Eigen::MatrixXd G = F;
        const Eigen::VectorXd Mprev = M.matrix() * prev;
        for (int i = 0; i <= q; ++i) {
            G.col(i) += tb.at0[i] * Mprev;
        }
        Eigen::MatrixXd U = solver.solve(k, G);
        const double scale = std::max(G.cwiseAbs().maxCoeff(), 1e-300);
        Eigen::MatrixXd R = F - primal_apply(M, A, tb, k, U, prev);
        if (R.cwiseAbs().maxCoeff() > 1e-13 * scale) {
            U += solver.solve(k, R);
            R = F - primal_apply(M, A, tb, k, U, prev);
        }
        if (R.cwiseAbs().maxCoeff() > 1e-10 * scale) {
            throw SolverError("slab " + std::to_string(m) + " residual above 1e-10");
        }
        prev = U.col(q);
        blocks.push_back(std::move(U));
    }
    return blocks;
}

SpaceTimeField dg_solve(const SpacePtr& s, const TimePartition& tp, int q, const ProblemSpec& prob,
                        const DgOptions& opt)
{
    if (!prob.u0.value) {
        throw ValidationError("problem has no initial datum");
    }
    SpaceTimeField u;
    u.space = s;
    u.partition = tp;
    u.q = q;
    u.initial = project(s, prob.u0, ProjectionKind::l2).coeffs;
    const LoadFn load = prob.load ? prob.load : (prob.f ? forcing_load(s, prob.f) : LoadFn{});
    u.blocks = dg_solve_algebraic(s->mass(), s->stiffness(), tp, q, load, u.initial, opt);
    return u;
}

ResidualReport dg_residual_algebraic(const SparseSym& M, const SparseSym& A, const TimePartition& tp, int q,
                                     const LoadFn& load, const Eigen::VectorXd& initial,
                                     const std::vector<Eigen::MatrixXd>& blocks)
{
    const auto& tb = temporal_basis(q);
    const Eigen::Index n = M.size();
    ResidualReport rep;
    double max_primal = 0.0, max_dual = 0.0, max_agree = 0.0, scale = 0.0;
    for (int m = 1; m <= tp.M(); ++m) {
        const double k = tp.step(m);
        const Eigen::MatrixXd F = load ? slab_load(load, tp.t[m - 1], k, q) : Eigen::MatrixXd::Zero(n, q + 1);
        const Eigen::VectorXd prev = m == 1 ? initial : Eigen::VectorXd(blocks[m - 2].col(q));
        const auto& U = blocks[m - 1];
        // right-hand side (f, phi) + [m = 1] (u0, phi_0^+)
        Eigen::MatrixXd rhs = F;
        if (m == 1) {
            const Eigen::VectorXd Mu0 = M.matrix() * initial;
            for (int i = 0; i <= q; ++i) {
                rhs.col(i) += tb.at0[i] * Mu0;
            }
        }
        // primal B(u, phi): jump term with u_0^- := 0 on the first slab, since (u_0^+, phi_0^+) is part of B
        const Eigen::MatrixXd Bp = primal_apply(M, A, tb, k, U, m == 1 ? Eigen::VectorXd::Zero(n) : prev);
        const Eigen::MatrixXd Bd = dual_apply(M, A, tb, k, U, prev, m == 1);
        max_primal = std::max(max_primal, (Bp - rhs).cwiseAbs().maxCoeff());
        max_dual = std::max(max_dual, (Bd - rhs).cwiseAbs().maxCoeff());
        max_agree = std::max(max_agree, (Bp - Bd).cwiseAbs().maxCoeff());
        scale = std::max({scale, rhs.cwiseAbs().maxCoeff(), Bp.cwiseAbs().maxCoeff()});
    }
    scale = std::max(scale, 1e-300);
    rep.primal = max_primal / scale;
    rep.dual = max_dual / scale;
    rep.agreement = max_agree / scale;
    rep.scale = scale;
    return rep;
}

ResidualReport dg_residual(const SpaceTimeField& u, const ProblemSpec& prob)
{
    const LoadFn load = prob.load ? prob.load : (prob.f ? forcing_load(u.space, prob.f) : LoadFn{});
    return dg_residual_algebraic(u.space->mass(), u.space->stiffness(), u.partition, u.q, load, u.initial, u.blocks);
}

} // namespace heatwave
