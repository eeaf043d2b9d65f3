#include "heatwave/quadrature.hpp"

#include "heatwave/errors.hpp"

#include <cmath>
#include <numbers>

namespace heatwave {

namespace {

void add_s3(std::vector<TrianglePoint>& pts, double w, double a)
{
    const double b = 1.0 - 2.0 * a;
    pts.push_back({{b, a, a}, w});
    pts.push_back({{a, b, a}, w});
    pts.push_back({{a, a, b}, w});
}

void add_s6(std::vector<TrianglePoint>& pts, double w, double a, double b)
{
    const double c = 1.0 - a - b;
    pts.push_back({{a, b, c}, w});
    pts.push_back({{a, c, b}, w});
    pts.push_back({{b, a, c}, w});
    pts.push_back({{b, c, a}, w});
    pts.push_back({{c, a, b}, w});
    pts.push_back({{c, b, a}, w});
}

TriangleRule make_degree1() { return {1, {{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0}}}; }

TriangleRule make_degree2()
{
    TriangleRule r{2, {}};
    add_s3(r.points, 1.0 / 3.0, 1.0 / 6.0);
    return r;
}

// Dunavant 6-point rule.
TriangleRule make_degree4()
{
    TriangleRule r{4, {}};
    add_s3(r.points, 0.223381589678011465695007, 0.4459484909159648863183293);
    add_s3(r.points, 0.1099517436553218676383263, 0.09157621350977074345957146);
    return r;
}

// Dunavant 12-point rule.
TriangleRule make_degree6()
{
    TriangleRule r{6, {}};
    add_s3(r.points, 0.1167862757263793660252896, 0.2492867451709104212916386);
    add_s3(r.points, 0.05084490637020681692093681, 0.0630890144915022283403316);
    add_s6(r.points, 0.08285107561837357519355346, 0.05314504984481694735324967, 0.3103524510337844054166077);
    return r;
}

} // namespace

const TriangleRule& triangle_rule(int degree)
{
    static const TriangleRule d1 = make_degree1();
    static const TriangleRule d2 = make_degree2();
    static const TriangleRule d4 = make_degree4();
    static const TriangleRule d6 = make_degree6();
    if (degree <= 1) {
        return d1;
    }
    if (degree == 2) {
        return d2;
    }
    if (degree <= 4) {
        return d4;
    }
    if (degree <= 6) {
        return d6;
    }
    throw ValidationError("no triangle rule of degree " + std::to_string(degree));
}

const TriangleRule& element_rule(int r) { return triangle_rule(2 * r + 2); }

LineRule gauss_legendre(int n)
{
    if (n < 1) {
        throw ValidationError("Gauss-Legendre rule needs n >= 1");
    }
    LineRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

std::vector<Barycentric> sample_lattice(int divisions, int r)
{
    std::vector<Barycentric> pts;
    for (int j = 0; j <= divisions; ++j) {
        for (int i = 0; i + j <= divisions; ++i) {
            const double l1 = static_cast<double>(i) / divisions;
            const double l2 = static_cast<double>(j) / divisions;
            pts.push_back({1.0 - l1 - l2, l1, l2});
        }
    }
    for (const auto& q : element_rule(r).points) {
        pts.push_back(q.bary);
    }
    return pts;
}

std::vector<TrianglePoint> composite_rule(int divisions, int r)
{
    const auto& base = element_rule(r).points;
    const double scale = 1.0 / (static_cast<double>(divisions) * divisions);
    std::vector<TrianglePoint> out;
    auto lat = [&](int i, int j) -> Barycentric {
        const double l1 = static_cast<double>(i) / divisions;
        const double l2 = static_cast<double>(j) / divisions;
        return {1.0 - l1 - l2, l1, l2};
    };
    auto emit = [&](const Barycentric& a, const Barycentric& b, const Barycentric& c) {
        for (const auto& q : base) {
            Barycentric p{};
            for (int k = 0; k < 3; ++k) {
                p[k] = q.bary[0] * a[k] + q.bary[1] * b[k] + q.bary[2] * c[k];
            }
            out.push_back({p, q.weight * scale});
        }
    };
    for (int j = 0; j < divisions; ++j) {
        for (int i = 0; i + j < divisions; ++i) {
            emit(lat(i, j), lat(i + 1, j), lat(i, j + 1));
            if (i + j + 1 < divisions) {
                emit(lat(i + 1, j), lat(i + 1, j + 1), lat(i, j + 1));
            }
        }
    }
    return out;
}

} // namespace heatwave
