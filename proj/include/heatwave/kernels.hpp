#pragma once

// Data-parallel loops over mesh cells. Every kernel takes an Exec tag: the
// serial path is the reference the tests compare against, the parallel path
// runs the same per-cell body under OpenMP. Reductions always happen serially
// in cell order so both paths produce bit-identical results.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace heatwave {

enum class Exec { serial, parallel };

template <class Body>
void for_each_cell(int n_cells, Exec exec, Body&& body)
{
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int c = 0; c < n_cells; ++c) {
            body(c);
        }
    } else {
        for (int c = 0; c < n_cells; ++c) {
            body(c);
        }
    }
}

/// Sum of per-cell contributions, accumulated in cell order.
template <class Body>
double cell_sum(int n_cells, Exec exec, Body&& body)
{
    std::vector<double> part(static_cast<std::size_t>(n_cells));
    for_each_cell(n_cells, exec, [&](int c) { part[c] = body(c); });
    double s = 0.0;
    for (double v : part) {
        s += v;
    }
    return s;
}

/// Max of per-cell values; NaN propagates.
template <class Body>
double cell_max(int n_cells, Exec exec, Body&& body)
{
    std::vector<double> part(static_cast<std::size_t>(n_cells));
    for_each_cell(n_cells, exec, [&](int c) { part[c] = body(c); });
    double m = 0.0;
    for (double v : part) {
        if (std::isnan(v)) {
            return v;
        }
        m = std::max(m, v);
    }
    return m;
}

} // namespace heatwave
