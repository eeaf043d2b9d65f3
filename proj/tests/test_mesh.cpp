#include "heatwave/errors.hpp"
#include "heatwave/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace heatwave;

TEST_CASE("unit square counts and mesh size")
{
    const auto m1 = generate_unit_square(1);
    CHECK(m1.n_vertices() == 4);
    CHECK(m1.n_cells() == 2);
    CHECK(m1.h == doctest::Approx(std::sqrt(2.0)));
    const auto m2 = generate_unit_square(2);
    CHECK(m2.n_vertices() == 9);
    CHECK(m2.n_cells() == 8);
    CHECK_THROWS_AS(generate_unit_square(0), ValidationError);
}

TEST_CASE("tiling and orientation")
{
    for (int n : {1, 3, 8}) {
        const auto m = generate_unit_square(n);
        CHECK(std::abs(m.total_area() - 1.0) <= 1e-12);
        for (int c = 0; c < m.n_cells(); ++c) {
            CHECK(m.cell_area(c) > 0.0);
        }
        int nb = 0;
        for (auto b : m.boundary) {
            nb += b;
        }
        CHECK(nb == 4 * n);
    }
}

TEST_CASE("interior edges are shared by two cells")
{
    const auto m = generate_unit_square(4);
    const auto et = build_edges(m);
    int boundary_edges = 0;
    for (int c : et.cells_per_edge) {
        CHECK((c == 1 || c == 2));
        boundary_edges += c == 1;
    }
    CHECK(boundary_edges == 16);
    CHECK(et.edges.size() == 3u * 16 + 8);
}

TEST_CASE("refinement matches direct generation")
{
    const auto coarse = generate_unit_square(1);
    const auto fine = refine_uniform(coarse);
    CHECK(canonical_form(fine) == canonical_form(generate_unit_square(2)));
    CHECK(fine.h == coarse.h / 2);
    CHECK(fine.n_cells() == 4 * coarse.n_cells());
    CHECK(fine.quality == doctest::Approx(coarse.quality).epsilon(1e-14));
    const auto f2 = refine_uniform(generate_unit_square(2));
    CHECK(canonical_form(f2) == canonical_form(generate_unit_square(4)));
}

TEST_CASE("point location")
{
    const auto m = generate_unit_square(4);
    for (int c = 0; c < m.n_cells(); ++c) {
        const auto loc = locate_point(m, m.centroid(c));
        CHECK(loc.cell == c);
        for (double b : loc.bary) {
            CHECK(b == doctest::Approx(1.0 / 3.0));
        }
    }
    // (0.125, 0.125) lies on the diagonal shared by cells 0 and 1
    const auto on_edge = locate_point(m, {0.125, 0.125});
    CHECK(on_edge.cell == 0);
    CHECK_THROWS_AS(locate_point(m, {1.5, 0.5}), DomainError);
    const PointLocator pl(m);
    for (double x : {0.0, 0.13, 0.25, 0.5, 0.77, 1.0}) {
        for (double y : {0.0, 0.31, 0.5, 0.75, 1.0}) {
            CHECK(pl.locate({x, y}).cell == locate_point(m, {x, y}).cell);
        }
    }
}

TEST_CASE("mesh io round trip and errors")
{
    const auto m = generate_unit_square(2);
    std::stringstream ss;
    write_mesh(ss, m);
    const auto back = read_mesh(ss);
    CHECK(canonical_form(back) == canonical_form(m));
    CHECK(back.vertices == m.vertices);
    CHECK(back.cells == m.cells);

    std::istringstream bad("mesh2d 3 1\nv 0 0 1\nv 1 0 1\nv zero 1 1\nc 0 1 2\n");
    try {
        (void)read_mesh(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
    std::istringstream inverted("mesh2d 3 1\nv 0 0 1\nv 1 0 1\nv 0 1 1\nc 0 2 1\n");
    CHECK_THROWS_AS(read_mesh(inverted), ValidationError);

    const auto path = std::filesystem::temp_directory_path() / "heatwave_mesh_test.txt";
    save_mesh(m, path);
    CHECK(canonical_form(load_mesh(path)) == canonical_form(m));
    std::filesystem::remove(path);
}
