#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace heatwave {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point2 a, Point2 b) = default;
};

double distance(Point2 a, Point2 b);

using Barycentric = std::array<double, 3>;
using Cell = std::array<int, 3>;

/// Conforming triangulation of a convex polygon.
///
/// Immutable once built through make_mesh(); every factory in this header
/// validates its output, so holding a Mesh means the invariants hold:
/// positive orientation, conformity, exact tiling of the convex hull and
/// boundary flags that agree with the boundary edges.
struct Mesh {
    std::vector<Point2> vertices;
    std::vector<Cell> cells;
    std::vector<std::uint8_t> boundary;
    double h = 0.0;       // max cell diameter
    double h_min = 0.0;   // min cell diameter
    double quality = 0.0; // smallest C with h <= C |tau|^{1/2} for all cells

    [[nodiscard]] int n_vertices() const { return static_cast<int>(vertices.size()); }
    [[nodiscard]] int n_cells() const { return static_cast<int>(cells.size()); }
    [[nodiscard]] double cell_area(int c) const;
    [[nodiscard]] double cell_diameter(int c) const;
    [[nodiscard]] Point2 centroid(int c) const;
    [[nodiscard]] Point2 point_at(int c, const Barycentric& b) const;
    [[nodiscard]] double total_area() const;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Builds a mesh from raw data and validates it. Throws ValidationError.
Mesh make_mesh(std::vector<Point2> vertices, std::vector<Cell> cells,
               std::vector<std::uint8_t> boundary);

/// Structured right-triangle mesh of the unit square, diagonals from
/// (i/n, j/n) to ((i+1)/n, (j+1)/n).
Mesh generate_unit_square(int n);

/// Red refinement: every triangle is split into four congruent children.
Mesh refine_uniform(const Mesh& m);

/// Undirected edges in order of first appearance during a cell sweep, plus
/// per-cell local edge ids (local edge e joins local vertices e and (e+1)%3).
struct EdgeTable {
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> cell_edges;
    std::vector<int> cells_per_edge;
};

EdgeTable build_edges(const Mesh& m);

Barycentric barycentric(const Mesh& m, int cell, Point2 p);

struct Location {
    int cell = -1;
    Barycentric bary{};
};

/// Lowest-index cell containing p (tolerance 1e-12 in barycentric
/// coordinates). Throws DomainError when p lies outside the mesh.
Location locate_point(const Mesh& m, Point2 p);

/// Bucket-accelerated point location with the same tie rule as locate_point.
class PointLocator {
public:
    explicit PointLocator(const Mesh& m);
    [[nodiscard]] Location locate(Point2 p) const;

private:
    const Mesh* mesh_;
    double x0_, y0_, dx_, dy_;
    int nx_, ny_;
    std::vector<std::vector<int>> buckets_;
};

void write_mesh(std::ostream& os, const Mesh& m);
Mesh read_mesh(std::istream& is);
void save_mesh(const Mesh& m, const std::filesystem::path& path);
Mesh load_mesh(const std::filesystem::path& path);

/// Text form independent of vertex and cell numbering; equal for meshes that
/// differ only by ordering.
std::string canonical_form(const Mesh& m);

} // namespace heatwave
