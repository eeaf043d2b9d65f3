#pragma once

#include "heatwave/fem.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace heatwave {

using Complex = std::complex<double>;

/// Sample set in the complement of the sector |arg z| <= gamma.
struct SectorSpec {
    double gamma = 0.7853981633974483;
    std::vector<double> rays;  // arguments in [gamma, pi]
    std::vector<double> radii; // moduli
};

/// Rays {3 pi/4, pi}, 12 radii log-spaced in [1e-1, 1e4].
SectorSpec default_sector(double gamma = 0.7853981633974483);

/// Points ordered ray by ray. Throws ValidationError for a ray outside [gamma, pi]
/// or gamma outside (0, pi/2).
std::vector<Complex> sector_points(const SectorSpec& spec);

/// Solves z(u, chi) + (Delta_h u, chi) = (x, chi), i.e. (zM - A) U = M X.
ComplexField shifted_solve(const SpacePtr& s, Complex z, const ComplexField& x);

/// Map whose norm is measured. `resolvent` measures (z + Delta_h)^{-1} in the
/// chosen norm; `hm1_conjugated_resolvent` measures the same operator in
/// ||sigma grad .|| after conjugation with Delta_h^{-1} (needs weighted_hm1);
/// `identity` is a sanity map.
enum class ResolventMap { resolvent, hm1_conjugated_resolvent, identity };

enum class EigenMethod { lanczos, power };

struct OpNormOptions {
    EigenMethod method = EigenMethod::lanczos;
    double tol = 1e-8;
    int max_iter = 500;
    std::uint64_t seed = 1;
    int dense_threshold = 5000;
};

struct OpNormResult {
    double value = 0.0;
    int iterations = 0;
    double achieved_tol = 0.0;
    bool converged = false;
};

/// max over chi of ||T chi||_W / ||chi||_W as the square root of the top
/// eigenvalue of W^{-1} T^H W T. kind must be l2, weighted_l2 or weighted_hm1.
/// Throws SolverError when the iteration does not converge (message carries
/// the achieved tolerance) and ValidationError above the dof threshold.
OpNormResult weighted_operator_norm(const SpacePtr& s, Complex z, const NormKind& kind,
                                    ResolventMap map = ResolventMap::resolvent, const OpNormOptions& opt = {});

struct ScanRow {
    double h = 0.0;
    Complex z;
    std::string norm_kind;
    double opnorm = 0.0;
    double scaled = 0.0; // |z| * opnorm
    int iterations = 0;
    std::string error;   // empty on success
};

/// One row per (z, kind), z-major. Rows run concurrently; a failing row keeps
/// its error message and the scan continues.
std::vector<ScanRow> sector_scan(const SpacePtr& s, const SectorSpec& spec, const std::vector<NormKind>& kinds,
                                 const OpNormOptions& opt = {});

/// Generalized eigenvalues lambda_j of A v = lambda M v (dense, small spaces only).
std::vector<double> dense_spectrum(const FeSpace& s);

/// max_j 1 / |z - lambda_j|.
double spectral_resolvent_norm(const std::vector<double>& lambdas, Complex z);

struct Lemma42Result {
    long count = 0;
    long violations = 0;
    double max_ratio = 0.0;
    double c_gamma = 0.0;
};

/// (|z| alpha^2 + beta^2) / |-z alpha^2 + beta^2|.
double lemma42_ratio(Complex z, double alpha, double beta);

Lemma42Result complex_lemma_sample(double gamma, long count, std::uint64_t seed);

} // namespace heatwave
