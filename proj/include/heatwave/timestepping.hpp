#pragma once

#include "heatwave/fem.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace heatwave {

// ---------------------------------------------------------------------------
// Time partitions

enum class PartitionKind { uniform, geometric };

/// Breakpoints 0 = t_0 < ... < t_M = T. Slabs are I_m = (t_{m-1}, t_m], m = 1..M.
struct TimePartition {
    std::vector<double> t;
    double T = 0.0;
    double k = 0.0;     // max step
    double k_min = 0.0; // min step
    double kappa = 1.0; // max ratio of adjacent steps

    [[nodiscard]] int M() const { return static_cast<int>(t.size()) - 1; }
    [[nodiscard]] double step(int m) const { return t[m] - t[m - 1]; }
    /// Slab m with t in (t_{m-1}, t_m]. Throws DomainError outside (0, T].
    [[nodiscard]] int slab_of(double time) const;
    /// k_min / k^beta, recorded against the lower step-size condition.
    [[nodiscard]] double min_step_ratio(double beta) const { return k_min / std::pow(k, beta); }
};

/// Geometric partitions grow steps by `ratio` from slab to slab. Throws
/// ValidationError when k > T/4 or the arguments are malformed.
TimePartition build_partition(double T, int M, PartitionKind kind = PartitionKind::uniform, double ratio = 1.0);

// ---------------------------------------------------------------------------
// Temporal reference basis

/// Lagrange basis of degree q on [0,1] at the right Gauss-Radau points.
/// The last node is 1, so the left limit u_m^- is the last coefficient.
struct TemporalBasis {
    int q = 0;
    std::vector<double> nodes;
    Eigen::MatrixXd T;     // T_ij = int l_j' l_i + l_j(0) l_i(0)
    Eigen::MatrixXd S;     // S_ij = int l_j l_i
    Eigen::MatrixXd D;     // D_ij = int l_j l_i'
    Eigen::VectorXd at0;   // l_i(0)
    Eigen::VectorXd at1;   // l_i(1)

    [[nodiscard]] int size() const { return q + 1; }
    [[nodiscard]] double value(int j, double tau) const;
    [[nodiscard]] double derivative(int j, double tau) const;
    [[nodiscard]] Eigen::VectorXd values(double tau) const;
    [[nodiscard]] Eigen::VectorXd derivatives(double tau) const;
};

/// Throws ValidationError unless q is 0, 1 or 2.
const TemporalBasis& temporal_basis(int q);

// ---------------------------------------------------------------------------
// Space-time fields

/// dG(q)cG(r) function: per slab an n x (q+1) matrix whose column j holds the
/// spatial coefficients at temporal node j. `initial` is u_0^- = P_h u0.
struct SpaceTimeField {
    SpacePtr space;
    TimePartition partition;
    int q = 0;
    Eigen::VectorXd initial;
    std::vector<Eigen::MatrixXd> blocks;

    [[nodiscard]] const TemporalBasis& basis() const { return temporal_basis(q); }
    /// Spatial coefficients inside slab m (1-based) at local time tau in [0,1].
    [[nodiscard]] Eigen::VectorXd on_slab(int m, double tau) const;
    /// d/dt on slab m at local time tau.
    [[nodiscard]] Eigen::VectorXd time_derivative(int m, double tau) const;
    /// Left-continuous evaluation; throws DomainError outside (0, T].
    [[nodiscard]] Eigen::VectorXd at(double time) const;
    /// u_m^-, m = 0..M (m = 0 gives the initial datum).
    [[nodiscard]] Eigen::VectorXd left_limit(int m) const;
    /// u_m^+, m = 0..M-1.
    [[nodiscard]] Eigen::VectorXd right_limit(int m) const;
    /// [u]_m = u_m^+ - u_m^-, m = 0..M-1.
    [[nodiscard]] Eigen::VectorXd jump(int m) const;
};

enum class EvalMode { value, gradient };

double eval_value(const SpaceTimeField& u, double time, Point2 p);
Vec2 eval_gradient(const SpaceTimeField& u, double time, Point2 p);
/// Fields u_m^- and u_m^+ at a breakpoint t_m; throws DomainError when time is not a breakpoint.
NodalField left_limit_field(const SpaceTimeField& u, double time);
NodalField right_limit_field(const SpaceTimeField& u, double time);

// ---------------------------------------------------------------------------
// Problems and the slab solver

struct ExactSolution {
    std::function<double(double, Point2)> value;
    std::function<Vec2(double, Point2)> gradient;
    std::function<double(double, Point2)> time_derivative;
    std::function<double(double, Point2)> laplacian; // optional
};

/// Spatial load vector b(t)_i = (f(t), chi_i) over interior basis functions.
using LoadFn = std::function<Eigen::VectorXd(double)>;

struct ProblemSpec {
    std::function<double(double, const CellPoint&)> f;
    Evaluable u0;
    std::optional<ExactSolution> exact;
    /// Replaces the quadrature of f when set.
    LoadFn load;
};

/// b(t) from a forcing f through element quadrature.
LoadFn forcing_load(const SpacePtr& s, std::function<double(double, const CellPoint&)> f);
/// b(t)_i = (u_t, chi_i) + (grad u, grad chi_i) for an exact solution: the
/// weak form of u_t - Delta u, usable when Delta u is singular.
LoadFn weak_form_load(const SpacePtr& s, const ExactSolution& exact);

/// Max over sample points of |u_t - Delta u - f| / max(1, |f|); needs exact.laplacian.
double manufactured_defect(const ProblemSpec& prob, double T, int samples = 16);

enum class BlockSolve { diagonalized, block };

struct DgOptions {
    BlockSolve method = BlockSolve::diagonalized;
};

/// Coefficient blocks of the dG(q) scheme for the algebraic system with
/// mass M and stiffness A: slab m solves (T (x) M + k_m S (x) A) U = F + l(0) (x) M u_{m-1}^-.
/// Throws SolverError when a slab residual exceeds 1e-10 (relative).
std::vector<Eigen::MatrixXd> dg_solve_algebraic(const SparseSym& M, const SparseSym& A, const TimePartition& tp,
                                                int q, const LoadFn& load, const Eigen::VectorXd& initial,
                                                const DgOptions& opt = {});

SpaceTimeField dg_solve(const SpacePtr& s, const TimePartition& tp, int q, const ProblemSpec& prob,
                        const DgOptions& opt = {});

/// Residual of the scheme against every space-time test basis function,
/// evaluated with the primal form and with the dual (integrated by parts) form.
struct ResidualReport {
    double primal = 0.0;       // max |B(u, phi) - (f, phi) - (u0, phi_0^+)| / scale
    double dual = 0.0;         // same with the dual form of B
    double agreement = 0.0;    // max |B_primal(u, phi) - B_dual(u, phi)| / scale
    double scale = 0.0;
};

ResidualReport dg_residual(const SpaceTimeField& u, const ProblemSpec& prob);
ResidualReport dg_residual_algebraic(const SparseSym& M, const SparseSym& A, const TimePartition& tp, int q,
                                     const LoadFn& load, const Eigen::VectorXd& initial,
                                     const std::vector<Eigen::MatrixXd>& blocks);

/// Slab load vectors F_i = int_{I_m} b(t) l_i dt with (q+2)-point Gauss.
Eigen::MatrixXd slab_load(const LoadFn& load, double t0, double k, int q);

} // namespace heatwave
