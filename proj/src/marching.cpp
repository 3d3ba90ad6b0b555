#include "kf/marching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>

#include "kf/field.hpp"
#include "kf/parallel.hpp"

namespace kf {

namespace {

// Cube corners: bit 0 -> +x, bit 1 -> +y, bit 2 -> +z.
// Cube edges: (low corner, axis); the 12 valid pairs.
struct CubeEdge {
    int corner;
    int axis;
};
constexpr CubeEdge kEdges[12] = {
    {0, 0}, {2, 0}, {4, 0}, {6, 0},  // x edges
    {0, 1}, {1, 1}, {4, 1}, {5, 1},  // y edges
    {0, 2}, {1, 2}, {2, 2}, {3, 2},  // z edges
};

int edge_id(int corner, int axis) {
    for (int e = 0; e < 12; ++e)
        if (kEdges[e].corner == corner && kEdges[e].axis == axis) return e;
    return -1;
}

// Face of the cube: normal axis and side. In-plane axes are the remaining
// two in ascending order; corners are listed CCW in that frame.
struct Face {
    int axis;
    int side;
    int corners[4];
    int edges[4];  // edge between corners[i] and corners[i+1 mod 4]
};

std::array<Face, 6> make_faces() {
    std::array<Face, 6> faces{};
    int idx = 0;
    for (int axis = 0; axis < 3; ++axis) {
        const int b = axis == 0 ? 1 : 0;
        const int c = axis == 2 ? 1 : 2;
        for (int side = 0; side < 2; ++side) {
            Face f{};
            f.axis = axis;
            f.side = side;
            auto corner = [&](int bi, int ci) {
                int n = 0;
                if (side) n |= 1 << axis;
                if (bi) n |= 1 << b;
                if (ci) n |= 1 << c;
                return n;
            };
            f.corners[0] = corner(0, 0);
            f.corners[1] = corner(1, 0);
            f.corners[2] = corner(1, 1);
            f.corners[3] = corner(0, 1);
            for (int i = 0; i < 4; ++i) {
                const int ca = f.corners[i];
                const int cb = f.corners[(i + 1) % 4];
                int diff = ca ^ cb;
                int eaxis = diff == 1 ? 0 : (diff == 2 ? 1 : 2);
                int lowc = (ca & diff) == 0 ? ca : cb;
                f.edges[i] = edge_id(lowc, eaxis);
            }
            faces[idx++] = f;
        }
    }
    return faces;
}

const std::array<Face, 6>& faces() {
    static const std::array<Face, 6> f = make_faces();
    return f;
}

uint64_t edge_key(int i, int j, int k, int axis, const GridDims& d) {
    return (static_cast<uint64_t>(i) +
            static_cast<uint64_t>(d.nx) * (j + static_cast<uint64_t>(d.ny) * k)) *
               3 +
           axis;
}

struct CubeOut {
    std::vector<std::array<uint64_t, 3>> tris;  // triangles as edge-key triples
};

// Make triangle winding consistent across shared edges within each connected
// component; the majority of the per-ring gradient orientations decides the
// component's global sign.
void orient_consistently(TriMesh& mesh) {
    const size_t nt = mesh.triangles.size();
    if (nt == 0) return;
    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    for (size_t t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        for (int s = 0; s < 3; ++s) {
            int a = tri[s], b = tri[(s + 1) % 3];
            if (a > b) std::swap(a, b);
            edge_tris[{a, b}].push_back(static_cast<int>(t));
        }
    }
    auto has_directed_edge = [&](const std::array<int, 3>& tri, int a, int b) {
        for (int s = 0; s < 3; ++s)
            if (tri[s] == a && tri[(s + 1) % 3] == b) return true;
        return false;
    };
    std::vector<int8_t> state(nt, 0);  // 0 unvisited, 1 keep, -1 flipped
    std::vector<int> stack;
    std::vector<int> component;
    for (size_t t0 = 0; t0 < nt; ++t0) {
        if (state[t0] != 0) continue;
        state[t0] = 1;
        stack.assign(1, static_cast<int>(t0));
        component.assign(1, static_cast<int>(t0));
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            const auto tri = mesh.triangles[t];
            const bool flipped = state[t] < 0;
            for (int s = 0; s < 3; ++s) {
                int a = tri[s], b = tri[(s + 1) % 3];
                if (flipped) std::swap(a, b);  // effective winding
                int ka = std::min(a, b), kb = std::max(a, b);
                for (int u : edge_tris[{ka, kb}]) {
                    if (u == t || state[u] != 0) continue;
                    // consistent orientation: neighbour must traverse b->a
                    const bool same_dir = has_directed_edge(mesh.triangles[u], a, b);
                    state[u] = same_dir ? static_cast<int8_t>(-state[t])
                                        : state[t];
                    stack.push_back(u);
                    component.push_back(u);
                }
            }
        }
        int flips = 0;
        for (int t : component)
            if (state[t] < 0) ++flips;
        const bool flip_all = flips * 2 > static_cast<int>(component.size());
        for (int t : component) {
            const bool flip = (state[t] < 0) != flip_all;
            if (flip) std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
        }
    }
}

}  // namespace

TriMesh isosurface(const ScalarGrid& grid, double level) {
    const GridDims& d = grid.dims;
    const bool circular = quantity_is_circular(grid.quantity);

    // Working copy: circular quantities are recentered so the target level
    // sits at 0.5, away from the branch cut.
    std::vector<double> vals;
    double lv = level;
    vals.reserve(grid.values.size());
    if (circular) {
        for (double v : grid.values)
            vals.push_back(std::isnan(v) ? v : wrap_turn(v - level + 0.5));
        lv = 0.5;
    } else {
        vals = grid.values;
    }
    // Deterministic nudge: corner values exactly at the level are classified
    // consistently across all cubes sharing them.
    double vmin = 0.0, vmax = 0.0;
    bool have_range = false;
    for (double v : vals) {
        if (std::isnan(v)) continue;
        if (!have_range) {
            vmin = vmax = v;
            have_range = true;
        } else {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    const double nudge = 1e-12 * std::max(1.0, vmax - vmin);
    for (double& v : vals)
        if (v == lv) v = lv + nudge;

    auto value_at = [&](int i, int j, int k) { return vals[grid.index(i, j, k)]; };

    const int cx = d.nx - 1, cy = d.ny - 1, cz = d.nz - 1;
    std::vector<CubeOut> layers(cz);

    parallel_for(cz, [&](int64_t kk) {
        const int k = static_cast<int>(kk);
        CubeOut& out = layers[k];
        double v[8];
        for (int j = 0; j < cy; ++j) {
            for (int i = 0; i < cx; ++i) {
                bool invalid = false;
                for (int n = 0; n < 8; ++n) {
                    v[n] = value_at(i + (n & 1), j + ((n >> 1) & 1), k + ((n >> 2) & 1));
                    if (std::isnan(v[n])) invalid = true;
                }
                if (invalid) continue;
                if (circular) {
                    // Mask cubes whose edges straddle the branch cut.
                    bool cut = false;
                    for (const CubeEdge& e : kEdges) {
                        const int other = e.corner | (1 << e.axis);
                        if (std::abs(v[e.corner] - v[other]) > 0.5) {
                            cut = true;
                            break;
                        }
                    }
                    if (cut) continue;
                }
                bool inside[8];
                int n_in = 0;
                for (int n = 0; n < 8; ++n) {
                    inside[n] = v[n] > lv;
                    n_in += inside[n];
                }
                if (n_in == 0 || n_in == 8) continue;

                // Face contour segments as pairs of cube-edge ids.
                int seg_a[12], seg_b[12];
                int n_seg = 0;
                for (const Face& f : faces()) {
                    int cross_e[4];
                    int n_cross = 0;
                    for (int s = 0; s < 4; ++s) {
                        const int ca = f.corners[s];
                        const int cb = f.corners[(s + 1) % 4];
                        if (inside[ca] != inside[cb]) cross_e[n_cross++] = s;
                    }
                    if (n_cross == 0) continue;
                    if (n_cross == 2) {
                        seg_a[n_seg] = f.edges[cross_e[0]];
                        seg_b[n_seg] = f.edges[cross_e[1]];
                        ++n_seg;
                        continue;
                    }
                    // Ambiguous face: all four edges cross. Asymptotic decider
                    // on the bilinear interpolant.
                    const double A = v[f.corners[0]] - lv;
                    const double B = v[f.corners[1]] - lv;
                    const double C = v[f.corners[2]] - lv;
                    const double Dv = v[f.corners[3]] - lv;
                    const double denom = A + C - B - Dv;
                    const double saddle = denom != 0.0 ? (A * C - B * Dv) / denom : 0.0;
                    // Corners 0 and 2 share one sign, 1 and 3 the other.
                    const bool diag02 = (saddle > 0.0) == (A > 0.0);
                    if (diag02) {
                        // corners 0,2 connected: segments isolate corners 1 and 3
                        seg_a[n_seg] = f.edges[0]; seg_b[n_seg] = f.edges[1]; ++n_seg;
                        seg_a[n_seg] = f.edges[2]; seg_b[n_seg] = f.edges[3]; ++n_seg;
                    } else {
                        // corners 1,3 connected: segments isolate corners 0 and 2
                        seg_a[n_seg] = f.edges[3]; seg_b[n_seg] = f.edges[0]; ++n_seg;
                        seg_a[n_seg] = f.edges[1]; seg_b[n_seg] = f.edges[2]; ++n_seg;
                    }
                }
                if (n_seg == 0) continue;

                // Stitch segments into rings: every crossing edge has exactly
                // two incident segments.
                int partner[12][2];
                int n_partner[12] = {0};
                for (int s = 0; s < n_seg; ++s) {
                    partner[seg_a[s]][n_partner[seg_a[s]]++] = seg_b[s];
                    partner[seg_b[s]][n_partner[seg_b[s]]++] = seg_a[s];
                }
                bool used[12] = {false};
                bool malformed = false;
                for (int e = 0; e < 12; ++e)
                    if (n_partner[e] != 0 && n_partner[e] != 2) malformed = true;
                if (malformed) continue;
                // Edge crossing parameter and position.
                auto edge_point = [&](int e) {
                    const CubeEdge& ce = kEdges[e];
                    const int other = ce.corner | (1 << ce.axis);
                    const double t = (lv - v[ce.corner]) / (v[other] - v[ce.corner]);
                    Point3 p0 = grid.position(i + (ce.corner & 1), j + ((ce.corner >> 1) & 1),
                                              k + ((ce.corner >> 2) & 1));
                    Point3 p1 = grid.position(i + (other & 1), j + ((other >> 1) & 1),
                                              k + ((other >> 2) & 1));
                    return p0 + t * (p1 - p0);
                };
                // Trilinear gradient at the cube centre (world units).
                const Vec3 h = grid.spacing();
                Vec3 gc{};
                for (int n = 0; n < 8; ++n) {
                    const double sx = (n & 1) ? 1.0 : -1.0;
                    const double sy = (n & 2) ? 1.0 : -1.0;
                    const double sz = (n & 4) ? 1.0 : -1.0;
                    gc.x += sx * v[n];
                    gc.y += sy * v[n];
                    gc.z += sz * v[n];
                }
                gc.x /= 4.0 * h.x;
                gc.y /= 4.0 * h.y;
                gc.z /= 4.0 * h.z;

                for (int start = 0; start < 12; ++start) {
                    if (used[start] || n_partner[start] == 0) continue;
                    int ring[12];
                    int len = 0;
                    int cur = start;
                    int prev = -1;
                    while (true) {
                        ring[len++] = cur;
                        used[cur] = true;
                        const int p0 = partner[cur][0];
                        const int p1 = partner[cur][1];
                        int nxt = (p0 != prev && !used[p0]) ? p0 : p1;
                        if (used[nxt]) break;
                        prev = cur;
                        cur = nxt;
                    }
                    if (len < 3) continue;
                    // Orient the ring so the normal points down-gradient
                    // (outward from the region above the level).
                    Point3 pts[12];
                    for (int s = 0; s < len; ++s) pts[s] = edge_point(ring[s]);
                    Vec3 newell{};
                    for (int s = 0; s < len; ++s) {
                        const Point3& a = pts[s];
                        const Point3& b = pts[(s + 1) % len];
                        newell.x += (a.y - b.y) * (a.z + b.z);
                        newell.y += (a.z - b.z) * (a.x + b.x);
                        newell.z += (a.x - b.x) * (a.y + b.y);
                    }
                    const bool flip = dot(newell, gc) > 0.0;
                    auto emit = [&](int a, int b, int c) {
                        const uint64_t ka = edge_key(i + (kEdges[ring[a]].corner & 1),
                                                     j + ((kEdges[ring[a]].corner >> 1) & 1),
                                                     k + ((kEdges[ring[a]].corner >> 2) & 1),
                                                     kEdges[ring[a]].axis, d);
                        const uint64_t kb = edge_key(i + (kEdges[ring[b]].corner & 1),
                                                     j + ((kEdges[ring[b]].corner >> 1) & 1),
                                                     k + ((kEdges[ring[b]].corner >> 2) & 1),
                                                     kEdges[ring[b]].axis, d);
                        const uint64_t kc = edge_key(i + (kEdges[ring[c]].corner & 1),
                                                     j + ((kEdges[ring[c]].corner >> 1) & 1),
                                                     k + ((kEdges[ring[c]].corner >> 2) & 1),
                                                     kEdges[ring[c]].axis, d);
                        if (ka == kb || kb == kc || ka == kc) return;
                        out.tris.push_back({ka, kb, kc});
                    };
                    for (int s = 1; s + 1 < len; ++s) {
                        if (flip)
                            emit(0, s + 1, s);
                        else
                            emit(0, s, s + 1);
                    }
                }
            }
        }
    });

    // Deterministic vertex numbering in first-use order.
    TriMesh mesh;
    std::map<uint64_t, int> vertex_of;
    auto position_of_key = [&](uint64_t key) {
        const int axis = static_cast<int>(key % 3);
        uint64_t p = key / 3;
        const int i = static_cast<int>(p % d.nx);
        p /= d.nx;
        const int j = static_cast<int>(p % d.ny);
        const int k = static_cast<int>(p / d.ny);
        const double v0 = value_at(i, j, k);
        const double v1 = value_at(i + (axis == 0), j + (axis == 1), k + (axis == 2));
        const double t = (lv - v0) / (v1 - v0);
        const Point3 p0 = grid.position(i, j, k);
        const Point3 p1 = grid.position(i + (axis == 0), j + (axis == 1), k + (axis == 2));
        return p0 + t * (p1 - p0);
    };
    for (const CubeOut& layer : layers) {
        for (const auto& t : layer.tris) {
            std::array<int, 3> tri{};
            for (int s = 0; s < 3; ++s) {
                auto it = vertex_of.find(t[s]);
                if (it == vertex_of.end()) {
                    it = vertex_of.emplace(t[s], static_cast<int>(mesh.vertices.size())).first;
                    mesh.vertices.push_back(position_of_key(t[s]));
                }
                tri[s] = it->second;
            }
            if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
            mesh.triangles.push_back(tri);
        }
    }
    orient_consistently(mesh);
    return mesh;
}

}  // namespace kf
