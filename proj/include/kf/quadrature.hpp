#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "kf/parallel.hpp"
#include "kf/vec.hpp"

namespace kf {

struct QuadratureSpec {
    int radial = 24;    // Gauss-Legendre nodes in the compactified radius
    int polar = 24;     // Gauss-Legendre nodes in cos(theta)
    int azimuth = 32;   // uniform nodes in phi (exact for bounded harmonics)
    double r0 = 2.0;    // compactification scale of r = r0 tan(t/2)
    int levels = 3;     // successive refinements (node counts double per level)
    double tol = 5e-3;  // convergence target for the error estimate

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // half the difference of the last two refinement levels
    bool converged = true;
    std::vector<std::pair<int, double>> history;  // (radial node count, value)
};

// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Integral of f over the ball |x| < radius (default: all of 3-space) in
// spherical coordinates with the radial substitution r = r0 tan(t/2). The
// reduction order is fixed, so results do not depend on the thread count.
template <typename F>
QuadratureResult integrate_ball(F&& f, const QuadratureSpec& spec,
                                double radius = std::numeric_limits<double>::infinity()) {
    spec.validate();
    QuadratureResult result;
    const double t_max = std::isfinite(radius) ? 2.0 * std::atan(radius / spec.r0)
                                               : std::numbers::pi;
    for (int level = 0; level < spec.levels; ++level) {
        const int scale = 1 << level;
        const int nr = spec.radial * scale;
        const int np = spec.polar * scale;
        const int na = spec.azimuth * scale;

        std::vector<double> tn, tw, cn, cw;
        gauss_legendre(nr, tn, tw);
        gauss_legendre(np, cn, cw);

        const double dphi = 2.0 * std::numbers::pi / na;
        std::vector<double> shell(static_cast<size_t>(nr) * np, 0.0);
        parallel_for(static_cast<int64_t>(nr) * np, [&](int64_t idx) {
            const int i = static_cast<int>(idx / np);
            const int j = static_cast<int>(idx % np);
            const double t = 0.5 * t_max * (tn[i] + 1.0);
            const double half = 0.5 * t;
            const double tanh_ = std::tan(half);
            const double r = spec.r0 * tanh_;
            const double sec2 = 1.0 + tanh_ * tanh_;
            // dr = (r0/2) sec^2(t/2) dt, times r^2 from the volume element,
            // times the [0,t_max] -> [-1,1] interval scale.
            const double wr = tw[i] * (0.5 * t_max) * (0.5 * spec.r0 * sec2) * r * r;
            const double ct = cn[j];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            double az = 0.0;
            for (int k = 0; k < na; ++k) {
                const double phi = dphi * (k + 0.5);
                const Vec3 x{r * st * std::cos(phi), r * st * std::sin(phi), r * ct};
                az += f(x);
            }
            shell[idx] = wr * cw[j] * dphi * az;
        });
        double total = 0.0;
        for (double s : shell) total += s;  // fixed order
        result.history.emplace_back(nr, total);
    }
    const size_t L = result.history.size();
    result.value = result.history[L - 1].second;
    result.error = 0.5 * std::abs(result.history[L - 1].second - result.history[L - 2].second);
    result.converged = result.error <= spec.tol;
    return result;
}

}  // namespace kf
