// Serial reference against OpenMP path for the cell kernels.
#include "heatwave/fem.hpp"
#include "heatwave/timestepping.hpp"
#include "heatwave/verify.hpp"
#include "heatwave/weight.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace heatwave;

namespace {

Exec tag(const benchmark::State& st) { return st.range(1) == 0 ? Exec::serial : Exec::parallel; }

void BM_assemble_weighted_stiffness(benchmark::State& st)
{
    const auto s = build_space(unit_square(static_cast<int>(st.range(0))), 2);
    const auto w = make_weight({0.5, 0.5}, 4.0, s->mesh().h);
    for (auto _ : st) {
        benchmark::DoNotOptimize(assemble(*s, FormKind::weighted_stiffness(w, 2.0), tag(st)));
    }
}

void BM_norm_linf_sampled(benchmark::State& st)
{
    const auto s = build_space(unit_square(static_cast<int>(st.range(0))), 2);
    NodalField u{s, Eigen::VectorXd::Zero(s->interior_dofs().size())};
    for (Eigen::Index i = 0; i < u.coeffs.size(); ++i) {
        u.coeffs[i] = std::sin(0.37 * static_cast<double>(i));
    }
    for (auto _ : st) {
        benchmark::DoNotOptimize(norm(u, NormKind::linf_sampled(), tag(st)));
    }
}

void BM_spacetime_sup(benchmark::State& st)
{
    const auto s = build_space(unit_square(static_cast<int>(st.range(0))), 1);
    const auto tp = build_partition(1.0, 8);
    const auto u = smooth_solution();
    const auto sol = dg_solve(s, tp, 1, u.problem(s));
    for (auto _ : st) {
        benchmark::DoNotOptimize(spacetime_sup_errors({&sol}, u, 0, {}, tag(st)));
    }
}

} // namespace

BENCHMARK(BM_assemble_weighted_stiffness)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_norm_linf_sampled)->ArgsProduct({{16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spacetime_sup)->ArgsProduct({{8, 16}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
