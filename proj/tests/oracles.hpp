#pragma once

// Independent numerical oracles used by the tests: plain finite differences
// and quadrature-free reference constructions. These deliberately avoid the
// library's analytic gradient paths so each assertion checks two routes.

#include <cmath>
#include <functional>
#include <random>

#include "kf/field.hpp"
#include "kf/ratmap.hpp"
#include "kf/vec.hpp"

namespace oracle {

using kf::Complex;
using kf::CVec3;
using kf::Point3;
using kf::Vec3;

inline Point3 shifted(const Point3& x, int axis, double s) {
    Point3 p = x;
    (axis == 0 ? p.x : axis == 1 ? p.y : p.z) += s;
    return p;
}

// 2-point central difference of a complex-valued function.
inline CVec3 fd_gradient_complex(const std::function<Complex(const Point3&)>& f, const Point3& x,
                                 double h) {
    CVec3 g;
    for (int a = 0; a < 3; ++a) {
        const Complex d = (f(shifted(x, a, h)) - f(shifted(x, a, -h))) / (2.0 * h);
        (a == 0 ? g.x : a == 1 ? g.y : g.z) = d;
    }
    return g;
}

// 4th-order central difference stencils.
inline double fd4(const std::function<double(const Point3&)>& f, const Point3& x, int axis,
                  double h) {
    return (-f(shifted(x, axis, 2 * h)) + 8 * f(shifted(x, axis, h)) -
            8 * f(shifted(x, axis, -h)) + f(shifted(x, axis, -2 * h))) /
           (12 * h);
}

inline double fd_divergence(const std::function<Vec3(const Point3&)>& f, const Point3& x,
                            double h) {
    double div = 0.0;
    for (int a = 0; a < 3; ++a) {
        auto comp = [&](const Point3& p) {
            const Vec3 v = f(p);
            return a == 0 ? v.x : a == 1 ? v.y : v.z;
        };
        div += fd4(comp, x, a, h);
    }
    return div;
}

inline Vec3 fd_curl(const std::function<Vec3(const Point3&)>& f, const Point3& x, double h) {
    auto d = [&](int comp, int axis) {
        auto c = [&](const Point3& p) {
            const Vec3 v = f(p);
            return comp == 0 ? v.x : comp == 1 ? v.y : v.z;
        };
        return fd4(c, x, axis, h);
    };
    return {d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)};
}

inline Vec3 fd_gradient(const std::function<double(const Point3&)>& f, const Point3& x, double h) {
    return {fd4(f, x, 0, h), fd4(f, x, 1, h), fd4(f, x, 2, h)};
}

// gradient of a circle-valued quantity (turns), unwrapped around the center
inline Vec3 fd_gradient_circular(const std::function<double(const Point3&)>& f, const Point3& x,
                                 double h) {
    const double fc = f(x);
    auto unwrapped = [&](const Point3& p) { return fc + kf::turn_diff(f(p), fc); };
    return fd_gradient(unwrapped, x, h);
}

struct PointSampler {
    std::mt19937_64 rng;
    double extent;
    explicit PointSampler(uint64_t seed, double e = 2.5) : rng(seed), extent(e) {}
    Point3 next() {
        std::uniform_real_distribution<double> d(-extent, extent);
        const double x = d(rng), y = d(rng), z = d(rng);
        return {x, y, z};
    }
    Point3 next_where(const kf::RationalMap& map,
                      const std::function<bool(const kf::MapEval&)>& pred) {
        for (int i = 0; i < 100000; ++i) {
            const Point3 p = next();
            if (pred(kf::eval_map(map, p))) return p;
        }
        throw std::runtime_error("oracle: sampler failed");
    }
};

inline bool nonsingular(const kf::MapEval& ev) {
    const double chi = std::norm(ev.P) / ev.norm2_sum;
    return chi > 0.05 && chi < 0.95;
}

inline bool away_from_pole(const kf::MapEval& ev) {
    return std::norm(ev.P) / ev.norm2_sum < 0.7;
}

}  // namespace oracle
