#include "kf/meshdiag.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace kf {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

double triangle_area(const Point3& a, const Point3& b, const Point3& c) {
    return 0.5 * norm(cross(b - a, c - a));
}

MeshDiagnostics mesh_diagnostics(const TriMesh& mesh) {
    MeshDiagnostics out;
    const int nv = static_cast<int>(mesh.vertices.size());
    if (mesh.triangles.empty()) return out;

    UnionFind uf(nv);
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& t : mesh.triangles) {
        uf.unite(t[0], t[1]);
        uf.unite(t[1], t[2]);
        for (int s = 0; s < 3; ++s) {
            int a = t[s], b = t[(s + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_use[{a, b}];
        }
    }

    // Dense component ids in deterministic (root vertex) order.
    std::map<int, int> comp_of_root;
    for (const auto& t : mesh.triangles) {
        const int root = uf.find(t[0]);
        if (!comp_of_root.count(root)) {
            const int id = static_cast<int>(comp_of_root.size());
            comp_of_root[root] = id;
        }
    }
    out.components.resize(comp_of_root.size());

    std::vector<int> vert_comp(nv, -1);
    for (const auto& t : mesh.triangles) {
        const int c = comp_of_root[uf.find(t[0])];
        for (int s = 0; s < 3; ++s) vert_comp[t[s]] = c;
    }
    for (int v = 0; v < nv; ++v)
        if (vert_comp[v] >= 0) ++out.components[vert_comp[v]].vertex_count;

    for (const auto& t : mesh.triangles) {
        const int c = comp_of_root[uf.find(t[0])];
        ++out.components[c].triangle_count;
        const double area =
            triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
        out.components[c].area += area;
        out.total_area += area;
    }

    // Boundary loops: connected components of the degree-2 boundary graph.
    UnionFind buf(nv);
    std::vector<std::pair<int, int>> boundary_edges;
    for (const auto& [e, count] : edge_use) {
        const int c = vert_comp[e.first];
        ++out.components[c].edge_count;
        if (count == 1) {
            boundary_edges.push_back(e);
            buf.unite(e.first, e.second);
        } else if (count > 2) {
            ++out.non_manifold_edges;
        }
    }
    std::map<int, int> loop_roots;  // boundary-graph root -> component id
    for (const auto& e : boundary_edges) {
        const int root = buf.find(e.first);
        if (!loop_roots.count(root)) {
            loop_roots[root] = vert_comp[e.first];
            ++out.components[vert_comp[e.first]].boundary_loops;
        }
    }

    for (auto& c : out.components)
        c.euler_characteristic = c.vertex_count - c.edge_count + c.triangle_count;
    return out;
}

}  // namespace kf
