#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <utility>

#include "doctest.h"
#include "kf/export.hpp"
#include "kf/grid.hpp"
#include "kf/marching.hpp"
#include "kf/meshdiag.hpp"
#include "kf/trace.hpp"

using namespace kf;

namespace {

// max over a's samples of the distance to b's vertex set (dense meshes)
double vertex_hausdorff(const TriMesh& a, const TriMesh& b) {
    double worst = 0.0;
    for (const Point3& p : a.vertices) {
        double best = 1e300;
        for (const Point3& q : b.vertices) best = std::min(best, norm2(p - q));
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

ScalarGrid analytic_grid(const Box3& box, int n, double (*f)(const Point3&)) {
    ScalarGrid g;
    g.bounds = box;
    g.dims = {n, n, n};
    g.quantity = Quantity::custom;
    g.values.resize(g.dims.count());
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) g.values[g.index(i, j, k)] = f(g.position(i, j, k));
    return g;
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("chi grid sampling for the hopf map") {
    const RationalMap hopf = preset("hopf");
    // 9^3 over [-2,2]^3 contains the origin as a lattice point
    const ScalarGrid g = sample_scalar_grid(hopf, Quantity::chi, Box3{{-2, -2, -2}, {2, 2, 2}},
                                            GridDims{9, 9, 9});
    double lo = 1e300, hi = -1e300;
    for (double v : g.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
    CHECK(g.at(4, 4, 4) == doctest::Approx(0.0));  // chi(0,0,0) = 0
}

TEST_CASE("f grid values are turns or invalid") {
    const RationalMap tref = preset("trefoil");
    const ScalarGrid g = sample_scalar_grid(tref, Quantity::f, Box3{{-2, -2, -2}, {2, 2, 2}},
                                            GridDims{16, 16, 16});
    for (double v : g.values) {
        if (std::isnan(v)) continue;
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("mesh diagnostics on reference meshes") {
    // octahedron: sphere topology
    TriMesh octa;
    octa.vertices = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    octa.triangles = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                      {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    const MeshDiagnostics d1 = mesh_diagnostics(octa);
    REQUIRE(d1.component_count() == 1);
    CHECK(d1.components[0].euler_characteristic == 2);
    CHECK(d1.components[0].boundary_loops == 0);
    CHECK(d1.non_manifold_edges == 0);

    // unit square from two triangles: disk with one boundary loop
    TriMesh square;
    square.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    square.triangles = {{0, 1, 2}, {0, 2, 3}};
    const MeshDiagnostics d2 = mesh_diagnostics(square);
    REQUIRE(d2.component_count() == 1);
    CHECK(d2.components[0].euler_characteristic == 1);
    CHECK(d2.components[0].boundary_loops == 1);
    CHECK(d2.components[0].area == doctest::Approx(1.0));
}

TEST_CASE("euler characteristic is invariant under vertex permutation") {
    const ScalarGrid g = analytic_grid(Box3{{-2, -2, -2}, {2, 2, 2}}, 24,
                                       [](const Point3& p) { return p.r2(); });
    TriMesh mesh = isosurface(g, 1.0);
    const MeshDiagnostics before = mesh_diagnostics(mesh);
    REQUIRE(before.component_count() == 1);

    std::vector<int> perm(mesh.vertices.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    std::mt19937 rng(99);
    std::shuffle(perm.begin(), perm.end(), rng);
    TriMesh shuffled;
    shuffled.vertices.resize(mesh.vertices.size());
    for (size_t i = 0; i < perm.size(); ++i) shuffled.vertices[perm[i]] = mesh.vertices[i];
    for (const auto& t : mesh.triangles)
        shuffled.triangles.push_back({perm[t[0]], perm[t[1]], perm[t[2]]});
    const MeshDiagnostics after = mesh_diagnostics(shuffled);
    CHECK(after.components[0].euler_characteristic ==
          before.components[0].euler_characteristic);
}

TEST_CASE("sphere isosurface is closed with euler characteristic 2") {
    const ScalarGrid g = analytic_grid(Box3{{-2, -2, -2}, {2, 2, 2}}, 32,
                                       [](const Point3& p) { return p.r2(); });
    const TriMesh mesh = isosurface(g, 1.0);
    REQUIRE(!mesh.triangles.empty());
    const MeshDiagnostics d = mesh_diagnostics(mesh);
    REQUIRE(d.component_count() == 1);
    CHECK(d.components[0].euler_characteristic == 2);
    CHECK(d.components[0].boundary_loops == 0);
    CHECK(d.non_manifold_edges == 0);
    CHECK(d.total_area == doctest::Approx(4 * 3.14159265).epsilon(0.02));

    // isosurface vertices interpolate to the level
    double worst = 0.0;
    for (const Point3& v : mesh.vertices) worst = std::max(worst, std::abs(g.interpolate(v) - 1.0));
    const double range = 12.0;  // r^2 over [-2,2]^3
    CHECK(worst < 1e-6 * range);
}

TEST_CASE("ambiguous faces resolve without cracks") {
    // A saddle field exercises the asymptotic decider on many faces.
    const ScalarGrid g = analytic_grid(Box3{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}}, 20,
                                       [](const Point3& p) { return p.x * p.y + 0.05 * p.z; });
    const TriMesh mesh = isosurface(g, 0.0);
    REQUIRE(!mesh.triangles.empty());
    const MeshDiagnostics d = mesh_diagnostics(mesh);
    CHECK(d.non_manifold_edges == 0);
    // every boundary edge must lie on the grid box surface (no interior cracks)
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& t : mesh.triangles)
        for (int s = 0; s < 3; ++s) {
            int a = t[s], b = t[(s + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_use[{a, b}];
        }
    for (const auto& [e, count] : edge_use) {
        if (count != 1) continue;
        for (int vid : {e.first, e.second}) {
            const Point3& p = mesh.vertices[vid];
            const double m = std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)});
            CHECK(m > 1.5 - 0.17);  // within one cell of the box surface
        }
    }
}

TEST_CASE("hopf chi=0.5 isosurface is a torus") {
    const RationalMap hopf = preset("hopf");
    const ScalarGrid g = sample_scalar_grid(hopf, Quantity::chi, Box3{{-3, -3, -3}, {3, 3, 3}},
                                            GridDims{64, 64, 64});
    const TriMesh mesh = isosurface(g, 0.5);
    const MeshDiagnostics d = mesh_diagnostics(mesh);
    REQUIRE(d.component_count() == 1);
    CHECK(d.components[0].euler_characteristic == 0);
    CHECK(d.components[0].boundary_loops == 0);
}

TEST_CASE("doubling the resolution moves the surface by less than two coarse cells") {
    const RationalMap hopf = preset("hopf");
    const Box3 box{{-3, -3, -3}, {3, 3, 3}};
    const TriMesh coarse =
        isosurface(sample_scalar_grid(hopf, Quantity::chi, box, GridDims{32, 32, 32}), 0.5);
    const TriMesh fine =
        isosurface(sample_scalar_grid(hopf, Quantity::chi, box, GridDims{64, 64, 64}), 0.5);
    const double coarse_cell = 6.0 / 31.0;
    const double h = std::max(vertex_hausdorff(coarse, fine), vertex_hausdorff(fine, coarse));
    CHECK(h < 2.0 * coarse_cell);
}

TEST_CASE("seifert surface boundary follows the nodal curve") {
    const RationalMap hopf = preset("hopf");
    ScalarGrid g = sample_scalar_grid(hopf, Quantity::f, Box3{{-3, -3, -3}, {3, 3, 3}},
                                      GridDims{64, 64, 64});
    // clip to the ball r < 3
    for (int k = 0; k < g.dims.nz; ++k)
        for (int j = 0; j < g.dims.ny; ++j)
            for (int i = 0; i < g.dims.nx; ++i)
                if (norm(g.position(i, j, k)) > 3.0)
                    g.values[g.index(i, j, k)] = std::numeric_limits<double>::quiet_NaN();
    const TriMesh mesh = isosurface(g, 0.25);
    REQUIRE(!mesh.triangles.empty());

    // traced nodal curve of Q = v: the unit circle
    const NodalTraceResult nodal =
        trace_nodal_curve(preset("hopf").Q, NodalScanSpec{}, TraceParams{});
    REQUIRE(nodal.curves.size() == 1);
    const Curve& core = nodal.curves[0];

    // boundary vertices away from the clip sphere must hug the nodal curve
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& t : mesh.triangles)
        for (int s = 0; s < 3; ++s) {
            int a = t[s], b = t[(s + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_use[{a, b}];
        }
    const double cell = 6.0 / 63.0;
    double worst = 0.0;
    int inner_boundary_vertices = 0;
    for (const auto& [e, count] : edge_use) {
        if (count != 1) continue;
        for (int vid : {e.first, e.second}) {
            const Point3& p = mesh.vertices[vid];
            if (norm(p) > 3.0 - 3.0 * cell) continue;  // clip boundary
            ++inner_boundary_vertices;
            worst = std::max(worst, point_to_curve_distance(p, core));
        }
    }
    REQUIRE(inner_boundary_vertices > 10);
    CHECK(worst < 2.0 * cell);
}

TEST_CASE("empty result when the level is outside the data") {
    const ScalarGrid g = analytic_grid(Box3{{-1, -1, -1}, {1, 1, 1}}, 8,
                                       [](const Point3& p) { return p.r2(); });
    const TriMesh mesh = isosurface(g, 100.0);
    CHECK(mesh.vertices.empty());
    CHECK(mesh.triangles.empty());
}

TEST_CASE("isosurface output is deterministic") {
    const RationalMap hopf = preset("hopf");
    const ScalarGrid g = sample_scalar_grid(hopf, Quantity::chi, Box3{{-3, -3, -3}, {3, 3, 3}},
                                            GridDims{24, 24, 24});
    const TriMesh a = isosurface(g, 0.5);
    const TriMesh b = isosurface(g, 0.5);
    REQUIRE(a.vertices.size() == b.vertices.size());
    REQUIRE(a.triangles.size() == b.triangles.size());
    for (size_t i = 0; i < a.vertices.size(); ++i) {
        CHECK(a.vertices[i].x == b.vertices[i].x);
        CHECK(a.vertices[i].y == b.vertices[i].y);
        CHECK(a.vertices[i].z == b.vertices[i].z);
    }
    CHECK(a.triangles == b.triangles);
}

}  // TEST_SUITE
