#include "kf/quadrature.hpp"

#include <numbers>
#include <stdexcept>

namespace kf {

void QuadratureSpec::validate() const {
    if (radial < 8 || polar < 8 || azimuth < 8)
        throw std::invalid_argument("quadrature: node counts must be >= 8");
    if (levels < 2)
        throw std::invalid_argument("quadrature: at least 2 refinement levels required");
    if (!(r0 > 0.0)) throw std::invalid_argument("quadrature: r0 must be positive");
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    // Newton iteration from the Chebyshev-angle initial guess; exact symmetry
    // is enforced by computing only half the nodes.
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

}  // namespace kf
