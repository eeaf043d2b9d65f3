#pragma once

#include "heatwave/config.hpp"
#include "heatwave/fem.hpp"
#include "heatwave/report.hpp"
#include "heatwave/resolvent.hpp"
#include "heatwave/singular.hpp"
#include "heatwave/timestepping.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace heatwave {

// ---------------------------------------------------------------------------
// Manufactured solutions

/// Exact solution evaluated cellwise, so discrete fields on the solving mesh
/// qualify as exact solutions without point location.
struct Manufactured {
    std::string name;
    std::function<double(double, const CellPoint&)> value;
    std::function<Vec2(double, const CellPoint&)> gradient;
    /// Problem data on a given space (forcing or load, u0).
    std::function<ProblemSpec(const SpacePtr&)> problem;
    /// Point-based form for interpolation and point evaluation; empty for discrete solutions.
    std::optional<ExactSolution> exact;
};

/// sin(pi x) sin(pi y) e^{-t}.
Manufactured smooth_solution();

/// Smooth part plus A |x - c|^{3/2} (1 - |x - c|^2/R^2)^3 cos t on B_R(c),
/// R the distance from c to the boundary. The gradient is only Hoelder-1/2
/// at c; loads use the weak form.
Manufactured kink_solution(Point2 c, double amplitude);

/// p(t) v_h with p(t) = sum_{j<=q} t^j / j! and v_h a fixed member of V_h:
/// lies in the discrete space, so the scheme reproduces it.
Manufactured discrete_solution(const SpacePtr& s, int q);

// ---------------------------------------------------------------------------
// Space-time sampling

/// Local sample times per slab: Radau nodes, j/9 for j = 1..8 and 1, sorted.
std::vector<double> sample_taus(int q);

/// Space restriction of a sup: all points, or the closed ball B(center, radius).
struct Region {
    std::optional<Point2> center;
    double radius = 0.0;
};

struct SupErrors {
    double grad = 0.0;  // sup |grad(u - U)|
    double value = 0.0; // sup |u - U|
};

/// Sampled sups over slabs 1..m_last (0: all), sample_taus(q) per slab and
/// the sup lattice in space, for several discrete fields against one exact
/// solution. Every field must live on the same space and partition.
std::vector<SupErrors> spacetime_sup_errors(const std::vector<const SpaceTimeField*>& fields,
                                            const Manufactured& u, int m_last = 0, const Region& region = {},
                                            Exec exec = Exec::parallel);

/// max over sample times of ||grad(u - U)||_{L2} and ||u - U||_{L2}.
std::vector<SupErrors> spacetime_l2_errors(const std::vector<const SpaceTimeField*>& fields, const Manufactured& u,
                                           int m_last = 0, Exec exec = Exec::parallel);

/// Space-time interpolant chi*: nodal interpolation in space at every
/// temporal Radau node of every slab. Needs the point-based exact solution.
SpaceTimeField interpolant(const SpacePtr& s, const TimePartition& tp, int q, const Manufactured& u);

// ---------------------------------------------------------------------------
// Drivers. Each echoes its configuration, records its acceptance checks and
// leaves persistence to emit().

/// Single solve on n[0] with residual and energy diagnostics.
ExperimentReport solve_study(const RunConfig& cfg);
/// Gradient error and EOC over the n ladder (mode ladder) or over the m
/// ladder at fixed n[0] (mode k_only).
ExperimentReport conv_study(const RunConfig& cfg);
ExperimentReport best_approx_ratio(const RunConfig& cfg);
ExperimentReport interior_study(const RunConfig& cfg);
ExperimentReport maxreg_check(const RunConfig& cfg);
ExperimentReport greens_norm_scan(const RunConfig& cfg);
ExperimentReport lemma_suite(const RunConfig& cfg);
/// Sector scans in the L2, weighted L2 and weighted H^{-1} norms over the ladder.
ExperimentReport resolvent_study(const RunConfig& cfg);
/// L2 operator norms against the dense spectral formula on n[0] (default 4).
ExperimentReport resolvent_oracle(const RunConfig& cfg);
ExperimentReport lemma42_study(const RunConfig& cfg);

/// Dispatch by subcommand name (solve, conv, best-approx, ...). Throws
/// ValidationError for an unknown name.
ExperimentReport run_experiment(const std::string& name, const RunConfig& cfg);

/// Ladder default when cfg.n is empty.
std::vector<int> ladder_or(const RunConfig& cfg, std::vector<int> fallback);

/// h = sqrt(2)/n of the structured unit-square mesh.
MeshPtr unit_square(int n);

} // namespace heatwave
