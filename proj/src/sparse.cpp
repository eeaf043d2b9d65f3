#include "heatwave/sparse.hpp"

#include "heatwave/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>
#include <mutex>

namespace heatwave {

struct SparseSym::Factor {
    std::once_flag once;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt;
    bool ok = false;
};

double symmetry_defect(const SparseMatrix& a)
{
    const SparseMatrix t = a.transpose();
    const SparseMatrix d = a - t;
    double dmax = 0.0, amax = 0.0;
    for (Eigen::Index k = 0; k < d.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(d, k); it; ++it) {
            dmax = std::max(dmax, std::abs(it.value()));
        }
    }
    for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            amax = std::max(amax, std::abs(it.value()));
        }
    }
    return amax == 0.0 ? 0.0 : dmax / amax;
}

SparseSym::SparseSym() : a_(std::make_shared<SparseMatrix>()), factor_(std::make_shared<Factor>()) {}

SparseSym::SparseSym(SparseMatrix a)
{
    if (a.rows() != a.cols()) {
        throw ValidationError("symmetric operator must be square");
    }
    a.makeCompressed();
    if (symmetry_defect(a) > 1e-14) {
        throw ValidationError("operator is not symmetric to 1e-14");
    }
    a_ = std::make_shared<SparseMatrix>(std::move(a));
    factor_ = std::make_shared<Factor>();
}

Eigen::VectorXd SparseSym::apply(const Eigen::VectorXd& x) const { return *a_ * x; }

Eigen::VectorXcd SparseSym::apply(const Eigen::VectorXcd& x) const
{
    return *a_ * x.real() + std::complex<double>(0.0, 1.0) * (*a_ * x.imag());
}

double SparseSym::quad(const Eigen::VectorXd& x) const { return x.dot(*a_ * x); }

Eigen::VectorXd SparseSym::solve(const Eigen::VectorXd& b) const
{
    const Eigen::Index n = a_->rows();
    if (b.size() != n) {
        throw ValidationError("right-hand side size mismatch");
    }
    if (n == 0) {
        return {};
    }
    std::call_once(factor_->once, [this] {
        factor_->ldlt.compute(*a_);
        factor_->ok = factor_->ldlt.info() == Eigen::Success;
    });

    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        return Eigen::VectorXd::Zero(n);
    }
    const SparseMatrix abs_a = a_->cwiseAbs();
    auto target = [&](const Eigen::VectorXd& x) {
        const double floor = 16.0 * std::numeric_limits<double>::epsilon() * (abs_a * x.cwiseAbs()).norm();
        return std::max(1e-12 * bnorm, floor);
    };

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (factor_->ok) {
        x = factor_->ldlt.solve(b);
        for (int it = 0; it < 5; ++it) {
            const Eigen::VectorXd r = b - *a_ * x;
            if (r.norm() <= target(x)) {
                return x;
            }
            x += factor_->ldlt.solve(r);
        }
        if ((b - *a_ * x).norm() <= target(x)) {
            return x;
        }
    }
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-12);
    cg.setMaxIterations(static_cast<Eigen::Index>(10 * n + 100));
    cg.compute(*a_);
    x = cg.solveWithGuess(b, x);
    const double res = (b - *a_ * x).norm();
    if (!(res <= target(x))) {
        throw SolverError("sparse symmetric solve failed: relative residual " + std::to_string(res / bnorm));
    }
    return x;
}

Eigen::VectorXcd SparseSym::solve(const Eigen::VectorXcd& b) const
{
    const Eigen::VectorXd re = solve(Eigen::VectorXd(b.real()));
    const Eigen::VectorXd im = solve(Eigen::VectorXd(b.imag()));
    return re.cast<std::complex<double>>() + std::complex<double>(0.0, 1.0) * im.cast<std::complex<double>>();
}

} // namespace heatwave
