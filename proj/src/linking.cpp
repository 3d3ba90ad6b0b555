#include "kf/linking.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "kf/parallel.hpp"

namespace kf {

namespace {

struct SegmentSet {
    std::vector<Point3> mid;
    std::vector<Vec3> dl;
};

SegmentSet segments_of(const Curve& c) {
    SegmentSet s;
    const size_t n = c.segment_count();
    s.mid.reserve(n);
    s.dl.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const Point3& a = c.vertices[i];
        const Point3& b = c.vertices[(i + 1) % c.vertices.size()];
        s.mid.push_back(a + 0.5 * (b - a));
        s.dl.push_back(b - a);
    }
    return s;
}

double gauss_double_sum(const SegmentSet& s1, const SegmentSet& s2) {
    const size_t n1 = s1.mid.size();
    std::vector<double> rows(n1, 0.0);
    parallel_for(static_cast<int64_t>(n1), [&](int64_t i) {
        double acc = 0.0;
        const Point3 mi = s1.mid[i];
        const Vec3 di = s1.dl[i];
        for (size_t j = 0; j < s2.mid.size(); ++j) {
            const Vec3 r = mi - s2.mid[j];
            const double r2 = norm2(r);
            const double inv = 1.0 / (r2 * std::sqrt(r2));
            acc += dot(r, cross(di, s2.dl[j])) * inv;
        }
        rows[i] = acc;
    });
    double total = 0.0;
    for (double v : rows) total += v;  // fixed order
    return total / (4.0 * std::numbers::pi);
}

}  // namespace

LinkingResult gauss_linking(const Curve& c1, const Curve& c2) {
    if (!c1.closed || !c2.closed) throw std::runtime_error("linking: open curve");
    if (c1.vertices.size() < 3 || c2.vertices.size() < 3)
        throw std::runtime_error("linking: degenerate curve (fewer than 3 vertices)");
    const double seg = std::max(max_segment_length(c1), max_segment_length(c2));
    const double d = min_curve_distance(c1, c2);
    if (!(d > 10.0 * seg)) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "linking: curves too close for the discretization (min distance %.3g, max "
                      "segment %.3g); resample finer",
                      d, seg);
        throw std::runtime_error(buf);
    }
    LinkingResult out;
    out.raw = gauss_double_sum(segments_of(c1), segments_of(c2));
    out.value = std::llround(out.raw);
    if (std::abs(out.raw - static_cast<double>(out.value)) > 0.05) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "linking: integral %.6g is not within 0.05 of an integer", out.raw);
        throw std::runtime_error(buf);
    }
    return out;
}

namespace {

// Resample a pair so the discretized integral certifies: segment length at
// most min_distance/16, vertex count in [256, 4096].
void resample_pair(Curve& a, Curve& b) {
    const double d = min_curve_distance(a, b);
    if (!(d > 0.0)) throw std::runtime_error("linking: intersecting preimage components");
    auto pick_n = [&](const Curve& c) {
        const double target = d / 16.0;
        double n = c.arc_length / target;
        return static_cast<size_t>(std::clamp(n, 256.0, 4096.0));
    };
    const size_t na = pick_n(a), nb = pick_n(b);
    a = resample_uniform(a, na);
    b = resample_uniform(b, nb);
    const double seg = std::max(max_segment_length(a), max_segment_length(b));
    if (!(min_curve_distance(a, b) > 10.0 * seg))
        throw std::runtime_error(
            "linking: preimage components too close to certify the Gauss integral");
}

std::vector<Curve> closed_components_for_value(const RationalMap& map, Complex c,
                                               const NodalScanSpec& scan,
                                               const TraceParams& params) {
    NodalTraceResult res = level_curve_components(map, c, scan, params);
    if (res.curves.empty()) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "linking: no level-curve components found for c = %.6g%+.6gi", c.real(),
                      c.imag());
        throw std::runtime_error(buf);
    }
    for (size_t i = 0; i < res.curves.size(); ++i) {
        if (!res.curves[i].closed) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "linking: component %zu of psi = %.6g%+.6gi failed to close (gap %.3g)",
                          i, c.real(), c.imag(), res.curves[i].closure_gap);
            throw std::runtime_error(buf);
        }
    }
    for (const std::string& w : res.warnings) {
        if (w.find("rank-deficient") != std::string::npos)
            throw std::runtime_error("linking: value is not regular: " + w);
    }
    return res.curves;
}

}  // namespace

HopfInvariantResult hopf_invariant_linking(const RationalMap& map, Complex c1, Complex c2,
                                           const NodalScanSpec& scan, const TraceParams& params) {
    HopfInvariantResult out;
    std::string last_error;
    for (int attempt = 0; attempt < 3; ++attempt) {
        // nudge the values on retry (rotate and stretch slightly)
        const Complex rot = std::polar(1.0 + 0.07 * attempt, 0.37 * attempt);
        const Complex v1 = c1 * rot;
        const Complex v2 = c2 * rot;
        try {
            std::vector<Curve> f1 = closed_components_for_value(map, v1, scan, params);
            std::vector<Curve> f2 = closed_components_for_value(map, v2, scan, params);
            double raw = 0.0;
            long long total = 0;
            for (const Curve& a : f1) {
                for (const Curve& b : f2) {
                    Curve ra = a, rb = b;
                    resample_pair(ra, rb);
                    const LinkingResult lk = gauss_linking(ra, rb);
                    raw += lk.raw;
                    total += lk.value;
                }
            }
            out.value = total;
            out.raw = raw;
            out.components_c1 = static_cast<int>(f1.size());
            out.components_c2 = static_cast<int>(f2.size());
            out.c1 = v1;
            out.c2 = v2;
            return out;
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    throw std::runtime_error("linking: Hopf invariant failed for all attempted regular values; " +
                             last_error);
}

}  // namespace kf
