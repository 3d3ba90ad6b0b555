#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "kf/export.hpp"
#include "kf/grid.hpp"

using namespace kf;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

ScalarGrid tiny_chi_grid() {
    const RationalMap hopf = preset("hopf");
    return sample_scalar_grid(hopf, Quantity::chi, Box3{{-1, -1, -1}, {1, 1, 1}},
                              GridDims{2, 2, 2});
}

}  // namespace

TEST_SUITE("export") {

TEST_CASE("vtk structured points format contract") {
    const ScalarGrid g = tiny_chi_grid();
    const std::string path = tmp_path("kf_grid.vtk");
    write_vtk(g, path, "seed=42");
    const std::string text = slurp(path);
    CHECK(text.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
    CHECK(text.find("seed=42") != std::string::npos);
    CHECK(text.find("DIMENSIONS 2 2 2") != std::string::npos);
    CHECK(text.find("POINT_DATA 8") != std::string::npos);
    // eight scalar values after the lookup table line
    const auto lut = text.find("LOOKUP_TABLE default\n");
    REQUIRE(lut != std::string::npos);
    std::istringstream tail(text.substr(lut + 21));
    int count = 0;
    double v;
    while (tail >> v) ++count;
    CHECK(count == 8);

    // byte-identical on rewrite
    const std::string path2 = tmp_path("kf_grid2.vtk");
    write_vtk(g, path2, "seed=42");
    CHECK(slurp(path2) == text);
}

TEST_CASE("closed square curve writes one LINES record with a repeated index") {
    Curve square;
    square.closed = true;
    square.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    square.recompute_metrics();
    const std::string path = tmp_path("kf_square.vtk");
    write_vtk({square}, {}, path);
    const std::string text = slurp(path);
    CHECK(text.find("DATASET POLYDATA") != std::string::npos);
    CHECK(text.find("LINES 1 6") != std::string::npos);
    CHECK(text.find("5 0 1 2 3 0") != std::string::npos);
}

TEST_CASE("polydata combines curves and meshes") {
    Curve square;
    square.closed = true;
    square.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    square.recompute_metrics();
    TriMesh tri;
    tri.vertices = {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}};
    tri.triangles = {{0, 1, 2}};
    const std::string path = tmp_path("kf_poly.vtk");
    write_vtk({square}, {tri}, path);
    const std::string text = slurp(path);
    CHECK(text.find("POINTS 7 double") != std::string::npos);
    CHECK(text.find("POLYGONS 1 4") != std::string::npos);
    CHECK(text.find("3 4 5 6") != std::string::npos);  // mesh indices offset by curve points
}

TEST_CASE("obj uses 1-based indices") {
    TriMesh tri;
    tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    tri.triangles = {{0, 1, 2}};
    const std::string path = tmp_path("kf_tri.obj");
    write_obj(tri, path, "seed=7");
    const std::string text = slurp(path);
    CHECK(text.find("# seed=7\n") == 0);
    CHECK(text.find("v 0 0 0") != std::string::npos);
    CHECK(text.find("f 1 2 3") != std::string::npos);
}

TEST_CASE("csv curve round trip") {
    Curve c;
    c.closed = true;
    c.vertices = {{0.123456789, -1.0 / 3.0, 2.5}, {1, 0, 0}, {0.5, 0.25, -0.125}};
    c.recompute_metrics();
    const std::string path = tmp_path("kf_curve.csv");
    write_csv(c, path, "seed=11");
    const std::string first = slurp(path);
    CHECK(first.rfind("# closed=1", 0) == 0);
    CHECK(first.find("seed=11") != std::string::npos);
    CHECK(first.find("x,y,z\n") != std::string::npos);

    const Curve back = read_csv_curve(path);
    REQUIRE(back.vertices.size() == c.vertices.size());
    CHECK(back.closed);
    // identical after a second round trip (9 significant digits preserved)
    const std::string path2 = tmp_path("kf_curve2.csv");
    write_csv(back, path2, "seed=11");
    CHECK(slurp(path2) == first);
    for (size_t i = 0; i < c.vertices.size(); ++i)
        CHECK(std::abs(back.vertices[i].x - c.vertices[i].x) <=
              1e-9 * std::max(1.0, std::abs(c.vertices[i].x)));
}

TEST_CASE("grid csv has a naming header row") {
    const ScalarGrid g = tiny_chi_grid();
    const std::string path = tmp_path("kf_grid.csv");
    write_csv(g, path);
    const std::string text = slurp(path);
    CHECK(text.rfind("x,y,z,chi\n", 0) == 0);
}

TEST_CASE("filesystem failures are reported") {
    const ScalarGrid g = tiny_chi_grid();
    CHECK_THROWS_WITH_AS(write_vtk(g, "/nonexistent_dir_kf/grid.vtk"),
                         doctest::Contains("cannot open"), std::runtime_error);
}

}  // TEST_SUITE
