#include "heatwave/mesh.hpp"

#include "heatwave/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace heatwave {

namespace {

double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

std::string fmt17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Andrew's monotone chain, counter-clockwise, collinear points dropped.
std::vector<Point2> convex_hull(std::vector<Point2> pts)
{
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) {
        return pts;
    }
    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) {
            --k;
        }
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        const auto& p = pts[i];
        while (k >= t && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) {
            --k;
        }
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

double polygon_area(const std::vector<Point2>& poly)
{
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        a += cross(poly[i], poly[(i + 1) % poly.size()]);
    }
    return 0.5 * a;
}

void compute_metrics(Mesh& m)
{
    m.h = 0.0;
    m.h_min = std::numeric_limits<double>::infinity();
    double min_sqrt_area = std::numeric_limits<double>::infinity();
    for (int c = 0; c < m.n_cells(); ++c) {
        const double d = m.cell_diameter(c);
        m.h = std::max(m.h, d);
        m.h_min = std::min(m.h_min, d);
        min_sqrt_area = std::min(min_sqrt_area, std::sqrt(m.cell_area(c)));
    }
    m.quality = m.h / min_sqrt_area;
}

void validate(const Mesh& m)
{
    const int nv = m.n_vertices();
    if (nv < 3 || m.cells.empty()) {
        throw ValidationError("mesh needs at least 3 vertices and one cell");
    }
    if (static_cast<int>(m.boundary.size()) != nv) {
        throw ValidationError("boundary flag count differs from vertex count");
    }
    for (const auto& p : m.vertices) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw ValidationError("non-finite vertex coordinate");
        }
    }
    std::vector<int> used(nv, 0);
    std::map<std::pair<int, int>, int> directed;
    for (int c = 0; c < m.n_cells(); ++c) {
        const auto& cell = m.cells[c];
        for (int v : cell) {
            if (v < 0 || v >= nv) {
                throw ValidationError("cell " + std::to_string(c) + " references vertex " + std::to_string(v) +
                                      " out of range");
            }
            used[v] = 1;
        }
        if (cell[0] == cell[1] || cell[1] == cell[2] || cell[0] == cell[2]) {
            throw ValidationError("cell " + std::to_string(c) + " has repeated vertices");
        }
        const double twice_area = cross(m.vertices[cell[1]] - m.vertices[cell[0]], m.vertices[cell[2]] - m.vertices[cell[0]]);
        if (!(twice_area > 0.0)) {
            throw ValidationError("cell " + std::to_string(c) + " is not positively oriented");
        }
        for (int e = 0; e < 3; ++e) {
            const auto key = std::make_pair(cell[e], cell[(e + 1) % 3]);
            if (directed.count(key) != 0) {
                throw ValidationError("nonconforming mesh: directed edge (" + std::to_string(key.first) + "," +
                                      std::to_string(key.second) + ") used by two cells");
            }
            directed[key] = c;
        }
    }
    if (std::find(used.begin(), used.end(), 0) != used.end()) {
        throw ValidationError("mesh has a vertex not referenced by any cell");
    }

    const auto hull = convex_hull(m.vertices);
    const double hull_area = polygon_area(hull);
    double scale = 0.0;
    for (const auto& p : hull) {
        scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    }
    const double tol = 1e-12 * std::max(scale * scale, 1e-300);

    std::vector<std::uint8_t> on_boundary(nv, 0);
    for (const auto& [key, c] : directed) {
        if (directed.count({key.second, key.first}) != 0) {
            continue;
        }
        const Point2 a = m.vertices[key.first];
        const Point2 b = m.vertices[key.second];
        for (const auto& hv : hull) {
            if (cross(b - a, hv - a) < -tol) {
                throw ValidationError("nonconforming mesh: boundary edge (" + std::to_string(key.first) + "," +
                                      std::to_string(key.second) + ") of cell " + std::to_string(c) +
                                      " is not on the domain boundary");
            }
        }
        on_boundary[key.first] = 1;
        on_boundary[key.second] = 1;
    }
    for (int v = 0; v < nv; ++v) {
        if ((m.boundary[v] != 0) != (on_boundary[v] != 0)) {
            throw ValidationError("boundary flag of vertex " + std::to_string(v) + " disagrees with mesh topology");
        }
    }
    const double area = m.total_area();
    if (std::abs(area - hull_area) > 1e-12 * hull_area) {
        throw ValidationError("cells do not tile the convex domain (area mismatch)");
    }
}

} // namespace

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double Mesh::cell_area(int c) const
{
    const auto& t = cells[c];
    return 0.5 * cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
}

double Mesh::cell_diameter(int c) const
{
    const auto& t = cells[c];
    double d2 = 0.0;
    for (int e = 0; e < 3; ++e) {
        const Point2 v = vertices[t[(e + 1) % 3]] - vertices[t[e]];
        d2 = std::max(d2, v.x * v.x + v.y * v.y);
    }
    return std::sqrt(d2);
}

Point2 Mesh::centroid(int c) const { return point_at(c, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}); }

Point2 Mesh::point_at(int c, const Barycentric& b) const
{
    const auto& t = cells[c];
    const Point2 &p0 = vertices[t[0]], &p1 = vertices[t[1]], &p2 = vertices[t[2]];
    return {b[0] * p0.x + b[1] * p1.x + b[2] * p2.x, b[0] * p0.y + b[1] * p1.y + b[2] * p2.y};
}

double Mesh::total_area() const
{
    double a = 0.0;
    for (int c = 0; c < n_cells(); ++c) {
        a += cell_area(c);
    }
    return a;
}

Mesh make_mesh(std::vector<Point2> vertices, std::vector<Cell> cells, std::vector<std::uint8_t> boundary)
{
    Mesh m;
    m.vertices = std::move(vertices);
    m.cells = std::move(cells);
    m.boundary = std::move(boundary);
    validate(m);
    compute_metrics(m);
    return m;
}

Mesh generate_unit_square(int n)
{
    if (n < 1) {
        throw ValidationError("unit square mesh needs n >= 1, got " + std::to_string(n));
    }
    const int np = n + 1;
    std::vector<Point2> v;
    std::vector<std::uint8_t> b;
    v.reserve(np * np);
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            v.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
            b.push_back(i == 0 || j == 0 || i == n || j == n ? 1 : 0);
        }
    }
    std::vector<Cell> cells;
    cells.reserve(2 * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = j * np + i;
            const int v10 = v00 + 1;
            const int v01 = v00 + np;
            const int v11 = v01 + 1;
            cells.push_back({v00, v10, v11});
            cells.push_back({v00, v11, v01});
        }
    }
    return make_mesh(std::move(v), std::move(cells), std::move(b));
}

EdgeTable build_edges(const Mesh& m)
{
    EdgeTable t;
    t.cell_edges.resize(m.cells.size());
    std::map<std::pair<int, int>, int> index;
    for (int c = 0; c < m.n_cells(); ++c) {
        for (int e = 0; e < 3; ++e) {
            int a = m.cells[c][e];
            int b = m.cells[c][(e + 1) % 3];
            if (a > b) {
                std::swap(a, b);
            }
            auto [it, inserted] = index.try_emplace({a, b}, static_cast<int>(t.edges.size()));
            if (inserted) {
                t.edges.push_back({a, b});
                t.cells_per_edge.push_back(0);
            }
            t.cell_edges[c][e] = it->second;
            ++t.cells_per_edge[it->second];
        }
    }
    return t;
}

Mesh refine_uniform(const Mesh& m)
{
    const auto et = build_edges(m);
    std::vector<Point2> v = m.vertices;
    std::vector<std::uint8_t> b = m.boundary;
    const int nv = m.n_vertices();
    for (std::size_t e = 0; e < et.edges.size(); ++e) {
        const Point2 p = m.vertices[et.edges[e][0]];
        const Point2 q = m.vertices[et.edges[e][1]];
        v.push_back({0.5 * (p.x + q.x), 0.5 * (p.y + q.y)});
        b.push_back(et.cells_per_edge[e] == 1 ? 1 : 0);
    }
    std::vector<Cell> cells;
    cells.reserve(4 * m.cells.size());
    for (int c = 0; c < m.n_cells(); ++c) {
        const auto& t = m.cells[c];
        const int mab = nv + et.cell_edges[c][0];
        const int mbc = nv + et.cell_edges[c][1];
        const int mca = nv + et.cell_edges[c][2];
        cells.push_back({t[0], mab, mca});
        cells.push_back({mab, t[1], mbc});
        cells.push_back({mca, mbc, t[2]});
        cells.push_back({mab, mbc, mca});
    }
    return make_mesh(std::move(v), std::move(cells), std::move(b));
}

Barycentric barycentric(const Mesh& m, int cell, Point2 p)
{
    const auto& t = m.cells[cell];
    const Point2 a = m.vertices[t[0]];
    const Point2 ab = m.vertices[t[1]] - a;
    const Point2 ac = m.vertices[t[2]] - a;
    const Point2 ap = p - a;
    const double det = cross(ab, ac);
    const double s = cross(ap, ac) / det;
    const double u = cross(ab, ap) / det;
    return {1.0 - s - u, s, u};
}

namespace {

constexpr double kLocateTol = 1e-12;

bool contains(const Barycentric& b)
{
    return b[0] >= -kLocateTol && b[1] >= -kLocateTol && b[2] >= -kLocateTol;
}

Location clamp(int cell, Barycentric b)
{
    for (auto& x : b) {
        x = std::max(x, 0.0);
    }
    const double s = b[0] + b[1] + b[2];
    for (auto& x : b) {
        x /= s;
    }
    return {cell, b};
}

[[noreturn]] void outside(Point2 p)
{
    throw DomainError("point (" + fmt17(p.x) + ", " + fmt17(p.y) + ") lies outside the domain");
}

} // namespace

Location locate_point(const Mesh& m, Point2 p)
{
    for (int c = 0; c < m.n_cells(); ++c) {
        const auto b = barycentric(m, c, p);
        if (contains(b)) {
            return clamp(c, b);
        }
    }
    outside(p);
}

PointLocator::PointLocator(const Mesh& m) : mesh_(&m)
{
    double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
    double xmax = -xmin, ymax = -xmin;
    for (const auto& p : m.vertices) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const int nb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m.n_cells()) / 2.0)));
    nx_ = ny_ = nb;
    const double pad = 1e-9 * std::max(xmax - xmin, ymax - ymin);
    x0_ = xmin - pad;
    y0_ = ymin - pad;
    dx_ = (xmax - xmin + 2 * pad) / nx_;
    dy_ = (ymax - ymin + 2 * pad) / ny_;
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (int c = 0; c < m.n_cells(); ++c) {
        double cx0 = std::numeric_limits<double>::infinity(), cy0 = cx0, cx1 = -cx0, cy1 = -cx0;
        for (int v : m.cells[c]) {
            cx0 = std::min(cx0, m.vertices[v].x);
            cx1 = std::max(cx1, m.vertices[v].x);
            cy0 = std::min(cy0, m.vertices[v].y);
            cy1 = std::max(cy1, m.vertices[v].y);
        }
        const int i0 = std::clamp(static_cast<int>((cx0 - pad - x0_) / dx_), 0, nx_ - 1);
        const int i1 = std::clamp(static_cast<int>((cx1 + pad - x0_) / dx_), 0, nx_ - 1);
        const int j0 = std::clamp(static_cast<int>((cy0 - pad - y0_) / dy_), 0, ny_ - 1);
        const int j1 = std::clamp(static_cast<int>((cy1 + pad - y0_) / dy_), 0, ny_ - 1);
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(c);
            }
        }
    }
}

Location PointLocator::locate(Point2 p) const
{
    const int i = static_cast<int>(std::floor((p.x - x0_) / dx_));
    const int j = static_cast<int>(std::floor((p.y - y0_) / dy_));
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) {
        outside(p);
    }
    // Buckets list cells in increasing index, so the first hit is the lowest index.
    for (int c : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
        const auto b = barycentric(*mesh_, c, p);
        if (contains(b)) {
            return clamp(c, b);
        }
    }
    outside(p);
}

void write_mesh(std::ostream& os, const Mesh& m)
{
    os << "mesh2d " << m.n_vertices() << ' ' << m.n_cells() << '\n';
    for (int v = 0; v < m.n_vertices(); ++v) {
        os << "v " << fmt17(m.vertices[v].x) << ' ' << fmt17(m.vertices[v].y) << ' ' << int(m.boundary[v]) << '\n';
    }
    for (const auto& c : m.cells) {
        os << "c " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    }
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) {
        tok.push_back(t);
    }
    return tok;
}

double parse_real(const std::string& s, int line)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw ParseError(line, "expected a finite real, got '" + s + "'");
    }
    return v;
}

long parse_int(const std::string& s, int line)
{
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') {
        throw ParseError(line, "expected an integer, got '" + s + "'");
    }
    return v;
}

} // namespace

Mesh read_mesh(std::istream& is)
{
    std::string line;
    int lineno = 0;
    auto next = [&](std::vector<std::string>& tok) {
        while (std::getline(is, line)) {
            ++lineno;
            tok = split(line);
            if (!tok.empty()) {
                return true;
            }
        }
        return false;
    };
    std::vector<std::string> tok;
    if (!next(tok)) {
        throw ParseError(lineno + 1, "empty mesh file");
    }
    if (tok.size() != 3 || tok[0] != "mesh2d") {
        throw ParseError(lineno, "expected header 'mesh2d <nv> <nc>'");
    }
    const long nv = parse_int(tok[1], lineno);
    const long nc = parse_int(tok[2], lineno);
    if (nv < 0 || nc < 0) {
        throw ParseError(lineno, "negative counts in header");
    }
    std::vector<Point2> v;
    std::vector<std::uint8_t> b;
    std::vector<Cell> cells;
    for (long i = 0; i < nv; ++i) {
        if (!next(tok)) {
            throw ParseError(lineno + 1, "unexpected end of file, expected vertex line");
        }
        if (tok.size() != 4 || tok[0] != "v") {
            throw ParseError(lineno, "expected 'v <x> <y> <b>'");
        }
        v.push_back({parse_real(tok[1], lineno), parse_real(tok[2], lineno)});
        const long flag = parse_int(tok[3], lineno);
        if (flag != 0 && flag != 1) {
            throw ParseError(lineno, "boundary flag must be 0 or 1");
        }
        b.push_back(static_cast<std::uint8_t>(flag));
    }
    for (long i = 0; i < nc; ++i) {
        if (!next(tok)) {
            throw ParseError(lineno + 1, "unexpected end of file, expected cell line");
        }
        if (tok.size() != 4 || tok[0] != "c") {
            throw ParseError(lineno, "expected 'c <i> <j> <k>'");
        }
        Cell c{};
        for (int k = 0; k < 3; ++k) {
            const long idx = parse_int(tok[k + 1], lineno);
            if (idx < 0 || idx >= nv) {
                throw ParseError(lineno, "vertex index " + tok[k + 1] + " out of range");
            }
            c[k] = static_cast<int>(idx);
        }
        cells.push_back(c);
    }
    if (next(tok)) {
        throw ParseError(lineno, "trailing content after last cell");
    }
    return make_mesh(std::move(v), std::move(cells), std::move(b));
}

void save_mesh(const Mesh& m, const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    write_mesh(os, m);
    if (!os) {
        throw Error("write to '" + path.string() + "' failed");
    }
}

Mesh load_mesh(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) {
        throw Error("cannot open '" + path.string() + "' for reading");
    }
    return read_mesh(is);
}

std::string canonical_form(const Mesh& m)
{
    std::vector<int> order(m.vertices.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& p = m.vertices[a];
        const auto& q = m.vertices[b];
        return p.x < q.x || (p.x == q.x && p.y < q.y);
    });
    std::vector<int> rank(m.vertices.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        rank[order[i]] = static_cast<int>(i);
    }
    std::vector<Cell> cells;
    for (const auto& c : m.cells) {
        Cell r{rank[c[0]], rank[c[1]], rank[c[2]]};
        std::rotate(r.begin(), std::min_element(r.begin(), r.end()), r.end());
        cells.push_back(r);
    }
    std::sort(cells.begin(), cells.end());
    std::ostringstream os;
    os << "mesh2d " << m.n_vertices() << ' ' << m.n_cells() << '\n';
    for (int i : order) {
        os << "v " << fmt17(m.vertices[i].x) << ' ' << fmt17(m.vertices[i].y) << ' ' << int(m.boundary[i]) << '\n';
    }
    for (const auto& c : cells) {
        os << "c " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    }
    return os.str();
}

} // namespace heatwave
