#pragma once

#include "heatwave/mesh.hpp"

#include <vector>

namespace heatwave {

/// Quadrature point on a triangle; weights are normalized to sum to one, so
/// an integral over cell c is area(c) * sum(w_i f(x_i)).
struct TrianglePoint {
    Barycentric bary;
    double weight;
};

struct TriangleRule {
    int degree;
    std::vector<TrianglePoint> points;
};

/// Symmetric rule exact for polynomials of at least the requested degree.
/// Degrees up to 6 are available.
const TriangleRule& triangle_rule(int degree);

/// Rule used for degree-r Lagrange elements (exact to degree 2r+2).
const TriangleRule& element_rule(int r);

/// Gauss-Legendre rule on [0,1].
struct LineRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

LineRule gauss_legendre(int n);

/// Barycentric lattice with `divisions` subdivisions per edge followed by the
/// quadrature points of element_rule(r). Used to sample sup norms.
std::vector<Barycentric> sample_lattice(int divisions, int r);

/// Subdivisions per edge of the sup-norm lattice for degree r: 4(r+1).
inline int lattice_divisions(int r) { return 4 * (r + 1); }

/// Composite rule: element_rule(r) applied on each of the divisions^2
/// sub-triangles of the lattice. Weights normalized to one.
std::vector<TrianglePoint> composite_rule(int divisions, int r);

} // namespace heatwave
