#include "kf/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kf {

namespace {

double point_segment_distance(const Point3& p, const Point3& a, const Point3& b) {
    const Vec3 ab = b - a;
    const double len2 = norm2(ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + t * ab);
}

// Ordered pair of consecutive vertices for segment index i.
void segment(const Curve& c, size_t i, Point3& a, Point3& b) {
    a = c.vertices[i];
    b = c.vertices[(i + 1) % c.vertices.size()];
}

}  // namespace

void Curve::recompute_metrics() {
    arc_length = 0.0;
    closure_gap = 0.0;
    if (vertices.size() < 2) return;
    for (size_t i = 0; i + 1 < vertices.size(); ++i)
        arc_length += distance(vertices[i], vertices[i + 1]);
    closure_gap = distance(vertices.back(), vertices.front());
    if (closed) arc_length += closure_gap;
}

Curve resample_uniform(const Curve& c, size_t n) {
    if (c.vertices.size() < 2 || n < 2) return c;
    // cumulative arc coordinates over segment_count() segments
    const size_t nseg = c.segment_count();
    std::vector<double> cum(nseg + 1, 0.0);
    for (size_t i = 0; i < nseg; ++i) {
        Point3 a, b;
        segment(c, i, a, b);
        cum[i + 1] = cum[i] + distance(a, b);
    }
    const double total = cum.back();
    if (total == 0.0) return c;

    Curve out = c;
    out.vertices.clear();
    out.vertices.reserve(n);
    const size_t steps = c.closed ? n : n - 1;
    size_t seg_i = 0;
    for (size_t k = 0; k < n; ++k) {
        const double s = total * static_cast<double>(k) / static_cast<double>(steps);
        while (seg_i + 1 < nseg && cum[seg_i + 1] < s) ++seg_i;
        Point3 a, b;
        segment(c, seg_i, a, b);
        const double seg_len = cum[seg_i + 1] - cum[seg_i];
        const double t = seg_len > 0.0 ? (s - cum[seg_i]) / seg_len : 0.0;
        out.vertices.push_back(a + t * (b - a));
    }
    out.recompute_metrics();
    return out;
}

Curve reversed(const Curve& c) {
    Curve out = c;
    std::reverse(out.vertices.begin(), out.vertices.end());
    out.recompute_metrics();
    return out;
}

double point_to_curve_distance(const Point3& p, const Curve& c) {
    if (c.vertices.empty()) return std::numeric_limits<double>::infinity();
    if (c.vertices.size() == 1) return distance(p, c.vertices[0]);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < c.segment_count(); ++i) {
        Point3 a, b;
        segment(c, i, a, b);
        best = std::min(best, point_segment_distance(p, a, b));
    }
    return best;
}

double min_curve_distance(const Curve& a, const Curve& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point3& p : a.vertices) best = std::min(best, point_to_curve_distance(p, b));
    for (const Point3& p : b.vertices) best = std::min(best, point_to_curve_distance(p, a));
    return best;
}

double hausdorff_distance(const Curve& a, const Curve& b) {
    double ab = 0.0, ba = 0.0;
    for (const Point3& p : a.vertices) ab = std::max(ab, point_to_curve_distance(p, b));
    for (const Point3& p : b.vertices) ba = std::max(ba, point_to_curve_distance(p, a));
    return std::max(ab, ba);
}

double max_segment_length(const Curve& c) {
    double m = 0.0;
    for (size_t i = 0; i < c.segment_count(); ++i) {
        Point3 a, b;
        segment(c, i, a, b);
        m = std::max(m, distance(a, b));
    }
    return m;
}

int projected_crossing_count(const Curve& c, const Vec3& dir) {
    if (!c.closed || c.vertices.size() < 4) return 0;
    // Build an orthonormal basis of the projection plane.
    const Vec3 n = normalized(dir);
    Vec3 e1 = std::abs(n.z) < 0.9 ? cross(n, Vec3{0, 0, 1}) : cross(n, Vec3{1, 0, 0});
    e1 = normalized(e1);
    const Vec3 e2 = cross(n, e1);

    const size_t ns = c.segment_count();
    std::vector<std::pair<double, double>> pts(c.vertices.size());
    for (size_t i = 0; i < c.vertices.size(); ++i)
        pts[i] = {dot(c.vertices[i], e1), dot(c.vertices[i], e2)};

    auto seg2d = [&](size_t i, std::pair<double, double>& a, std::pair<double, double>& b) {
        a = pts[i];
        b = pts[(i + 1) % pts.size()];
    };
    int crossings = 0;
    for (size_t i = 0; i < ns; ++i) {
        for (size_t j = i + 2; j < ns; ++j) {
            if (i == 0 && j == ns - 1) continue;  // adjacent around the closure
            std::pair<double, double> a, b, p, q;
            seg2d(i, a, b);
            seg2d(j, p, q);
            const double d1x = b.first - a.first, d1y = b.second - a.second;
            const double d2x = q.first - p.first, d2y = q.second - p.second;
            const double denom = d1x * d2y - d1y * d2x;
            if (denom == 0.0) continue;
            const double rx = p.first - a.first, ry = p.second - a.second;
            const double t = (rx * d2y - ry * d2x) / denom;
            const double s = (rx * d1y - ry * d1x) / denom;
            if (t > 0.0 && t < 1.0 && s > 0.0 && s < 1.0) ++crossings;
        }
    }
    return crossings;
}

}  // namespace kf
