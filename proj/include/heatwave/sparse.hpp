#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>

namespace heatwave {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Symmetric sparse operator on interior degrees of freedom.
///
/// The factorization is built on first use and shared read-only afterwards,
/// so copies are cheap and concurrent solves are safe. Solves use an LDL^T
/// factorization with iterative refinement to relative residual 1e-12 and
/// fall back to conjugate gradients when refinement stalls.
class SparseSym {
public:
    SparseSym();
    /// Throws ValidationError if `a` is not square or not symmetric to 1e-14 (relative).
    explicit SparseSym(SparseMatrix a);

    [[nodiscard]] const SparseMatrix& matrix() const { return *a_; }
    [[nodiscard]] Eigen::Index size() const { return a_->rows(); }

    [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    [[nodiscard]] Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
    [[nodiscard]] double quad(const Eigen::VectorXd& x) const;

    /// Throws SolverError when neither path reaches the tolerance.
    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    [[nodiscard]] Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;

private:
    struct Factor;
    std::shared_ptr<const SparseMatrix> a_;
    std::shared_ptr<Factor> factor_;
};

/// Max |a_ij - a_ji| / max |a_ij|.
double symmetry_defect(const SparseMatrix& a);

} // namespace heatwave
