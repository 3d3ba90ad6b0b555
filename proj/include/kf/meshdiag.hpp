#pragma once

#include <vector>

#include "kf/marching.hpp"

namespace kf {

struct ComponentDiagnostics {
    int vertex_count = 0;
    int edge_count = 0;
    int triangle_count = 0;
    int euler_characteristic = 0;  // V - E + F
    int boundary_loops = 0;
    double area = 0.0;
};

struct MeshDiagnostics {
    std::vector<ComponentDiagnostics> components;
    int non_manifold_edges = 0;  // edges shared by more than two triangles
    double total_area = 0.0;

    int component_count() const { return static_cast<int>(components.size()); }
};

MeshDiagnostics mesh_diagnostics(const TriMesh& mesh);

double triangle_area(const Point3& a, const Point3& b, const Point3& c);

}  // namespace kf
