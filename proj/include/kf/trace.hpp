#pragma once

#include <functional>
#include <vector>

#include "kf/curve.hpp"
#include "kf/field.hpp"
#include "kf/ratmap.hpp"

namespace kf {

struct TraceParams {
    double initial_step = 1e-2;
    double step_tol = 1e-8;       // embedded-pair error tolerance per step
    double corrector_tol = 1e-9;  // |g| target for implicit-curve correctors
    int max_steps = 200000;
    double closure_tol = 1e-4;
    double max_arc = 400.0;

    void validate() const;
};

// Integrates dx/ds = +/- B/|B| with an adaptive Dormand-Prince 5(4) pair.
// Terminates on closure (proximity + tangent alignment), max steps, or max
// arc length. Closed curves do not repeat the seed vertex.
Curve trace_fieldline(const RationalMap& map, const Point3& seed, const TraceParams& params,
                      int direction = +1);

// Level curve of psi through `seed` for the regular value c. The seed is
// first refined onto the curve; every emitted vertex satisfies
// |psi - c| < corrector_tol.
Curve trace_level_curve(const RationalMap& map, Complex c, const Point3& seed,
                        const TraceParams& params);

struct NodalScanSpec {
    int lattice = 48;        // seed lattice resolution per axis
    double extent = 3.0;     // lattice and tracing box is [-extent, extent]^3
    double refine_tol = 1e-10;
    double seed_spacing = 0.1;      // thinning distance between candidate seeds
    double curve_proximity = 2e-2;  // seeds closer than this to an accepted curve are dropped
    double dedupe_hausdorff = 1e-3;
};

struct NodalTraceResult {
    std::vector<Curve> curves;
    std::vector<std::string> warnings;  // e.g. rank-deficient zero points
};

// All components of poly = 0 inside the scan box. Closed components are
// closed polylines; curves that leave the box are clipped and flagged open.
NodalTraceResult trace_nodal_curve(const ComplexPolynomial& poly, const NodalScanSpec& scan,
                                   const TraceParams& params);

// All components of psi = c, traced as nodal curves of P - c Q (identical
// point sets, orientation along B).
NodalTraceResult level_curve_components(const RationalMap& map, Complex c,
                                        const NodalScanSpec& scan, const TraceParams& params);

// Bisect chi(x0 + t dir) = target for t in (0, t_max]; used to place seeds on
// a chosen flux surface. Throws if the target is not bracketed.
Point3 seed_on_chi_surface(const RationalMap& map, const Point3& x0, const Vec3& dir,
                           double chi_target, double t_max = 4.0);

}  // namespace kf
