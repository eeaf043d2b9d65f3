#include "heatwave/singular.hpp"

#include "heatwave/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace heatwave {

// ---------------------------------------------------------------------------
// Weight

WeightSpec make_weight(Point2 x0, double K, double h)
{
    if (!(K > 0.0) || !(h > 0.0)) {
        throw ValidationError("weight needs K > 0 and h > 0");
    }
    return WeightSpec{x0, K, h, 2};
}

double sigma(const WeightSpec& w, Point2 p)
{
    const double dx = p.x - w.x0.x, dy = p.y - w.x0.y;
    const double kh = w.K * w.h;
    return std::sqrt(dx * dx + dy * dy + kh * kh);
}

Eigen::Vector2d sigma_gradient(const WeightSpec& w, Point2 p)
{
    return Eigen::Vector2d(p.x - w.x0.x, p.y - w.x0.y) / sigma(w, p);
}

Point2 default_x0() { return {0.5 + 0.5 / std::numbers::pi, 0.5 + 0.5 / std::numbers::e}; }

// ---------------------------------------------------------------------------
// Smoothed delta

Direction parse_direction(const std::string& s)
{
    if (s == "x") {
        return Direction::x;
    }
    if (s == "y") {
        return Direction::y;
    }
    throw ValidationError("direction must be x or y, got '" + s + "'");
}

namespace {

Barycentric bary_in(const std::array<Point2, 3>& tri, Point2 p)
{
    const Point2 a = tri[0], b = tri[1], c = tri[2];
    const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    const double l1 = ((p.x - a.x) * (c.y - a.y) - (p.y - a.y) * (c.x - a.x)) / det;
    const double l2 = ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) / det;
    return {1.0 - l1 - l2, l1, l2};
}

CellGeometry tri_geometry(const std::array<Point2, 3>& tri)
{
    const Point2 p0 = tri[0], p1 = tri[1], p2 = tri[2];
    const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
    CellGeometry g{0.5 * det, {}};
    g.grad_bary[0] = Vec2(p1.y - p2.y, p2.x - p1.x) / det;
    g.grad_bary[1] = Vec2(p2.y - p0.y, p0.x - p2.x) / det;
    g.grad_bary[2] = Vec2(p0.y - p1.y, p1.x - p0.x) / det;
    return g;
}

} // namespace

bool SmoothedDelta::contains(Point2 p) const
{
    const auto b = bary_in(tri, p);
    return b[0] >= -1e-12 && b[1] >= -1e-12 && b[2] >= -1e-12;
}

double SmoothedDelta::value(Point2 p) const
{
    const auto b = bary_in(tri, p);
    if (b[0] < -1e-12 || b[1] < -1e-12 || b[2] < -1e-12) {
        return 0.0;
    }
    std::array<double, 6> phi{};
    basis::values(r, b, phi);
    double v = 0.0;
    for (int a = 0; a < local_coeffs.size(); ++a) {
        v += local_coeffs[a] * phi[a];
    }
    return v;
}

Vec2 SmoothedDelta::gradient(Point2 p) const
{
    const auto b = bary_in(tri, p);
    if (b[0] < -1e-12 || b[1] < -1e-12 || b[2] < -1e-12) {
        return Vec2::Zero();
    }
    std::array<std::array<double, 3>, 6> d{};
    basis::bary_derivatives(r, b, d);
    const auto g = tri_geometry(tri);
    Vec2 out = Vec2::Zero();
    for (int a = 0; a < local_coeffs.size(); ++a) {
        out += local_coeffs[a] * (d[a][0] * g.grad_bary[0] + d[a][1] * g.grad_bary[1] + d[a][2] * g.grad_bary[2]);
    }
    return out;
}

SmoothedDelta build_smoothed_delta(const FeSpace& s, Point2 x0)
{
    const Mesh& m = s.mesh();
    const auto loc = locate_point(m, x0);
    SmoothedDelta d;
    d.cell = loc.cell;
    d.x0 = x0;
    d.r = s.degree();
    for (int k = 0; k < 3; ++k) {
        d.tri[k] = m.vertices[m.cells[loc.cell][k]];
    }
    d.area = m.cell_area(loc.cell);
    const Eigen::MatrixXd gram = element_matrix(s, loc.cell, FormKind::mass());
    Eigen::VectorXd rhs(s.local_size());
    std::array<double, 6> phi{};
    basis::values(d.r, loc.bary, phi);
    for (int a = 0; a < s.local_size(); ++a) {
        rhs[a] = phi[a];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw SolverError("singular local moment system on cell " + std::to_string(loc.cell));
    }
    d.local_coeffs = llt.solve(rhs);
    // one refinement sweep on the small system
    d.local_coeffs += llt.solve(rhs - gram * d.local_coeffs);
    return d;
}

double moment_residual(const FeSpace& s, const SmoothedDelta& d)
{
    const Eigen::MatrixXd gram = element_matrix(s, d.cell, FormKind::mass());
    const Eigen::VectorXd moments = gram * d.local_coeffs;
    const auto b = barycentric(s.mesh(), d.cell, d.x0);
    std::array<double, 6> phi{};
    basis::values(d.r, b, phi);
    double res = 0.0;
    for (int a = 0; a < s.local_size(); ++a) {
        res = std::max(res, std::abs(moments[a] - phi[a]));
    }
    return res;
}

Evaluable delta_evaluable(const SmoothedDelta& d, const Mesh& m)
{
    auto inside = std::make_shared<std::vector<std::uint8_t>>(m.n_cells(), 0);
    double area = 0.0;
    for (int c = 0; c < m.n_cells(); ++c) {
        if (d.contains(m.centroid(c))) {
            (*inside)[c] = 1;
            area += m.cell_area(c);
            for (const int v : m.cells[c]) {
                if (!d.contains(m.vertices[v])) {
                    throw ValidationError("mesh is not nested in the host cell of the smoothed delta");
                }
            }
        }
    }
    if (std::abs(area - d.area) > 1e-10 * d.area) {
        throw ValidationError("mesh cells do not tile the host cell of the smoothed delta");
    }
    Evaluable e;
    e.value = [d, inside](const CellPoint& p) { return (*inside)[p.cell] ? d.value(p.x) : 0.0; };
    e.gradient = [d, inside](const CellPoint& p) { return (*inside)[p.cell] ? d.gradient(p.x) : Vec2(Vec2::Zero()); };
    return e;
}

Eigen::VectorXd delta_derivative_load(const FeSpace& s, const SmoothedDelta& d, Direction dir)
{
    const int axis = dir == Direction::x ? 0 : 1;
    const auto e = delta_evaluable(d, s.mesh());
    return gradient_load_vector(s, [&](const CellPoint& p) {
        Vec2 g = Vec2::Zero();
        g[axis] = -e.value(p);
        return g;
    });
}

NodalField delta_derivative_field(const SpacePtr& s, const SmoothedDelta& d, Direction dir)
{
    return {s, s->mass().solve(delta_derivative_load(*s, d, dir))};
}

NodalField discrete_green(const SpacePtr& s, const SmoothedDelta& d, Direction dir)
{
    return inv_laplacian(delta_derivative_field(s, d, dir));
}

// ---------------------------------------------------------------------------
// Temporal delta

double legendre_unit(int i, double tau)
{
    const double x = 2.0 * tau - 1.0;
    double p0 = 1.0, p1 = x;
    if (i == 0) {
        return 1.0;
    }
    for (int n = 1; n < i; ++n) {
        const double p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return std::sqrt(2.0 * i + 1.0) * p1;
}

TimeDelta build_time_delta(const TimePartition& tp, int q, double t_tilde)
{
    if (q < 0 || q > 2) {
        throw ValidationError("temporal degree must be 0, 1 or 2");
    }
    TimeDelta d;
    d.slab = tp.slab_of(t_tilde);
    d.t_tilde = t_tilde;
    d.t_left = tp.t[d.slab - 1];
    d.k = tp.step(d.slab);
    d.q = q;
    const double tau = (t_tilde - d.t_left) / d.k;
    d.coeffs.resize(q + 1);
    for (int i = 0; i <= q; ++i) {
        d.coeffs[i] = legendre_unit(i, tau) / d.k;
    }
    return d;
}

double TimeDelta::value(double t) const
{
    const double tau = (t - t_left) / k;
    if (tau <= 0.0 || tau > 1.0) {
        return 0.0;
    }
    double v = 0.0;
    for (int i = 0; i <= q; ++i) {
        v += coeffs[i] * legendre_unit(i, tau);
    }
    return v;
}

double TimeDelta::l1_norm() const
{
    // monomial coefficients in tau of sum_i c_i P^_i(tau)
    std::array<double, 3> a{0.0, 0.0, 0.0};
    const double s3 = std::sqrt(3.0), s5 = std::sqrt(5.0);
    a[0] += coeffs[0];
    if (q >= 1) {
        a[0] += -s3 * coeffs[1];
        a[1] += 2.0 * s3 * coeffs[1];
    }
    if (q >= 2) {
        // P2(2tau-1) = 6tau^2 - 6tau + 1
        a[0] += s5 * coeffs[2];
        a[1] += -6.0 * s5 * coeffs[2];
        a[2] += 6.0 * s5 * coeffs[2];
    }
    std::vector<double> cuts{0.0, 1.0};
    if (a[2] != 0.0) {
        const double disc = a[1] * a[1] - 4.0 * a[2] * a[0];
        if (disc > 0.0) {
            const double sq = std::sqrt(disc);
            cuts.push_back((-a[1] - sq) / (2.0 * a[2]));
            cuts.push_back((-a[1] + sq) / (2.0 * a[2]));
        }
    } else if (a[1] != 0.0) {
        cuts.push_back(-a[0] / a[1]);
    }
    std::erase_if(cuts, [](double c) { return c < 0.0 || c > 1.0; });
    std::sort(cuts.begin(), cuts.end());
    auto prim = [&](double x) { return a[0] * x + a[1] * x * x / 2.0 + a[2] * x * x * x / 3.0; };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total += std::abs(prim(cuts[i + 1]) - prim(cuts[i]));
    }
    return total * k;
}

} // namespace heatwave
