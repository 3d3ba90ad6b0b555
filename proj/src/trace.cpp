#include "kf/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "kf/parallel.hpp"

namespace kf {

namespace {

constexpr double kMinStep = 1e-12;

void TraceParamsCheck(const TraceParams& p) {
    if (!(p.initial_step > 0) || !(p.step_tol > 0) || !(p.corrector_tol > 0) ||
        p.max_steps <= 0 || !(p.closure_tol > 0) || !(p.max_arc > 0))
        throw std::invalid_argument("trace: all trace parameters must be positive");
}

// Closure detection shared by the field-line and implicit-curve tracers.
// Requires proximity to the seed plus tangent alignment; once captured, the
// step size is shrunk and the crossing of the plane through the seed normal
// to the flow marks the closest approach.
struct ClosureDetector {
    Point3 seed;
    Vec3 seed_dir;
    double closure_tol = 1e-4;
    double capture_radius = 2e-2;
    double min_arc = 0.1;

    bool landing = false;
    double g_prev = 0.0;
    double cooldown_until = 0.0;

    // Returns true when the curve closed; may shrink *h for upcoming steps.
    bool update(const Point3& x, const Vec3& dir, double arc, double* h, double* gap_out) {
        if (arc < min_arc || arc < cooldown_until) return false;
        const double d = distance(x, seed);
        const bool aligned = dot(dir, seed_dir) > 0.9;
        if (!landing) {
            if (aligned && d < capture_radius) {
                landing = true;
                g_prev = dot(dir, x - seed);
                *h = std::min(*h, std::max(0.25 * closure_tol, 0.1 * d));
            }
            return false;
        }
        const double g = dot(dir, x - seed);
        if (g_prev < 0.0 && g >= 0.0) {
            landing = false;
            if (aligned && d <= closure_tol) {
                *gap_out = d;
                return true;
            }
            cooldown_until = arc + 4.0 * capture_radius;  // near-miss on an adjacent strand
            return false;
        }
        g_prev = g;
        if (d > 1.5 * capture_radius) {
            landing = false;
            cooldown_until = arc + capture_radius;
            return false;
        }
        *h = std::min(*h, std::max(0.25 * closure_tol, 0.1 * d));
        return false;
    }
};

}  // namespace

void TraceParams::validate() const { TraceParamsCheck(*this); }

// ---------------------------------------------------------------------------
// Field lines: adaptive Dormand-Prince 5(4) on the unit tangent field.

namespace {

Vec3 unit_tangent(const RationalMap& map, const Point3& x, int direction) {
    const Vec3 B = bfield(map, x);
    const double nb = norm(B);
    if (nb < 1e-14)
        throw std::runtime_error("trace: field magnitude vanished during integration");
    return B * (static_cast<double>(direction) / nb);
}

}  // namespace

Curve trace_fieldline(const RationalMap& map, const Point3& seed, const TraceParams& params,
                      int direction) {
    params.validate();
    {
        const double nb = norm(bfield(map, seed));
        if (nb <= 1e-12) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "trace: zero-field seed (|B| = %.3g)", nb);
            throw std::runtime_error(buf);
        }
    }

    // Dormand-Prince coefficients.
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                     e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

    const double h_max = 0.05;
    double h = std::min(params.initial_step, h_max);

    Curve curve;
    curve.vertices.push_back(seed);

    const Vec3 dir0 = unit_tangent(map, seed, direction);
    ClosureDetector closure;
    closure.seed = seed;
    closure.seed_dir = dir0;
    closure.closure_tol = params.closure_tol;
    closure.capture_radius = std::max(10.0 * params.closure_tol, 2e-2);
    closure.min_arc = 10.0 * params.initial_step;

    double chi_min = 1.0, chi_max = 0.0, eta_drift = 0.0;
    double eta_ref = 0.0, eta_acc = 0.0;
    bool eta_ref_set = false;
    auto track_tags = [&](const Point3& x) {
        const EulerPotentials ep = euler_potentials(map, x);
        chi_min = std::min(chi_min, ep.chi);
        chi_max = std::max(chi_max, ep.chi);
        if (ep.eta_valid) {
            if (!eta_ref_set) {
                eta_ref = ep.eta;
                eta_acc = 0.0;
                eta_ref_set = true;
            } else {
                eta_acc += turn_diff(ep.eta, wrap_turn(eta_ref + eta_acc));
                eta_drift = std::max(eta_drift, std::abs(eta_acc));
            }
        }
    };
    track_tags(seed);

    Point3 x = seed;
    double arc = 0.0;
    bool closed = false;
    double gap = 0.0;
    int steps = 0;

    while (steps < params.max_steps && arc < params.max_arc) {
        if (h < kMinStep)
            throw std::runtime_error("trace: step-size underflow near singular structure");
        const Vec3 k1 = unit_tangent(map, x, direction);
        const Vec3 k2 = unit_tangent(map, x + h * (a21 * k1), direction);
        const Vec3 k3 = unit_tangent(map, x + h * (a31 * k1 + a32 * k2), direction);
        const Vec3 k4 = unit_tangent(map, x + h * (a41 * k1 + a42 * k2 + a43 * k3), direction);
        const Vec3 k5 =
            unit_tangent(map, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), direction);
        const Vec3 k6 = unit_tangent(
            map, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), direction);
        const Point3 x5 = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec3 k7 = unit_tangent(map, x5, direction);
        const Point3 x4 =
            x + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err = distance(x5, x4);
        ++steps;
        if (err > params.step_tol) {
            h *= std::max(0.2, 0.9 * std::pow(params.step_tol / err, 0.2));
            continue;
        }
        arc += h;
        x = x5;
        curve.vertices.push_back(x);
        track_tags(x);
        double grow = err > 0.0 ? 0.9 * std::pow(params.step_tol / err, 0.2) : 5.0;
        h = std::min(h * std::clamp(grow, 0.2, 5.0), h_max);
        if (closure.update(x, k7, arc, &h, &gap)) {
            closed = true;
            break;
        }
    }

    curve.closed = closed;
    curve.recompute_metrics();
    curve.tags["chi_seed"] = euler_potentials(map, seed).chi;
    curve.tags["chi_min"] = chi_min;
    curve.tags["chi_max"] = chi_max;
    curve.tags["eta_drift"] = eta_drift;
    curve.tags["steps"] = static_cast<double>(steps);
    return curve;
}

// ---------------------------------------------------------------------------
// Implicit curves g(x) = 0 for complex-valued g: predictor along
// grad(Re g) x grad(Im g), Gauss-Newton corrector.

namespace {

struct ImplicitFn {
    // value and gradient of the complex scalar at a point
    std::function<void(const Point3&, Complex&, CVec3&)> eval;
};

// Minimum-norm Gauss-Newton step onto the curve. Returns false on failure;
// rank_deficient reports a (locally) singular zero set.
bool refine_to_curve(const ImplicitFn& fn, Point3& x, double tol, int max_iter,
                     bool* rank_deficient = nullptr) {
    if (rank_deficient) *rank_deficient = false;
    for (int it = 0; it < max_iter; ++it) {
        Complex val;
        CVec3 grad;
        fn.eval(x, val, grad);
        if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) return false;
        if (std::abs(val) <= tol) {
            if (rank_deficient) {
                const Vec3 gr = real(grad), gi = imag(grad);
                const double a = dot(gr, gr), b = dot(gr, gi), c = dot(gi, gi);
                const double tr = a + c;
                const double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4.0 * b * b));
                const double lam_min = 0.5 * (tr - disc);
                *rank_deficient = lam_min <= 1e-16 * std::max(tr, 1e-300);
            }
            return true;
        }
        const Vec3 gr = real(grad), gi = imag(grad);
        const double a = dot(gr, gr), b = dot(gr, gi), c = dot(gi, gi);
        const double det = a * c - b * b;
        if (det <= 1e-30 * std::max(a * c, 1e-300)) return false;
        // delta = -J^T (J J^T)^{-1} r
        const double r1 = val.real(), r2 = val.imag();
        const double l1 = (c * r1 - b * r2) / det;
        const double l2 = (a * r2 - b * r1) / det;
        x = x - (l1 * gr + l2 * gi);
    }
    return false;
}

bool curve_tangent(const ImplicitFn& fn, const Point3& x, Vec3& t, double* resid = nullptr) {
    Complex val;
    CVec3 grad;
    fn.eval(x, val, grad);
    if (resid) *resid = std::abs(val);
    const Vec3 tv = cross(real(grad), imag(grad));
    const double n = norm(tv);
    if (!(n > 1e-30)) return false;
    t = tv / n;
    return true;
}

// Corrector restricted to the plane normal to the predictor tangent.
bool correct_in_plane(const ImplicitFn& fn, Point3& x, const Vec3& t_hat, double tol,
                      int max_iter, double* moved) {
    Vec3 e1 = std::abs(t_hat.z) < 0.9 ? cross(t_hat, Vec3{0, 0, 1}) : cross(t_hat, Vec3{1, 0, 0});
    e1 = normalized(e1);
    const Vec3 e2 = cross(t_hat, e1);
    const Point3 x_start = x;
    for (int it = 0; it < max_iter; ++it) {
        Complex val;
        CVec3 grad;
        fn.eval(x, val, grad);
        if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) return false;
        if (std::abs(val) <= tol) {
            if (moved) *moved = distance(x, x_start);
            return true;
        }
        const Vec3 gr = real(grad), gi = imag(grad);
        const double j11 = dot(gr, e1), j12 = dot(gr, e2);
        const double j21 = dot(gi, e1), j22 = dot(gi, e2);
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-30) return false;
        const double d1 = (-val.real() * j22 + val.imag() * j12) / det;
        const double d2 = (-j11 * val.imag() + j21 * val.real()) / det;
        x = x + d1 * e1 + d2 * e2;
    }
    return false;
}

struct ImplicitTraceOutcome {
    Curve curve;
    bool hit_box = false;
};

// Trace from a point already on the curve. Stops on closure, box exit, or
// the step/arc limits (curve returned open in the latter case).
ImplicitTraceOutcome trace_implicit(const ImplicitFn& fn, const Point3& start,
                                    const TraceParams& params, double box_extent,
                                    int direction) {
    ImplicitTraceOutcome out;
    Curve& curve = out.curve;
    curve.vertices.push_back(start);

    Vec3 t0;
    if (!curve_tangent(fn, start, t0))
        throw std::runtime_error("trace: zero tangent at seed (critical point of the map)");
    t0 = t0 * static_cast<double>(direction);

    ClosureDetector closure;
    closure.seed = start;
    closure.seed_dir = t0;
    closure.closure_tol = params.closure_tol;
    closure.capture_radius = std::max(10.0 * params.closure_tol, 2e-2);
    closure.min_arc = 10.0 * params.initial_step;

    const double h_max = std::max(params.initial_step, 3e-2);
    double h = params.initial_step;
    Point3 x = start;
    Vec3 t_cur = t0;
    double arc = 0.0;
    int steps = 0;
    double max_resid = 0.0;

    auto inside_box = [&](const Point3& p) {
        return std::abs(p.x) <= box_extent && std::abs(p.y) <= box_extent &&
               std::abs(p.z) <= box_extent;
    };

    while (steps < params.max_steps && arc < params.max_arc) {
        if (h < kMinStep)
            throw std::runtime_error("trace: step-size underflow while tracing implicit curve");
        ++steps;
        Point3 x_new = x + h * t_cur;
        double moved = 0.0;
        bool ok = correct_in_plane(fn, x_new, t_cur, params.corrector_tol, 12, &moved);
        Vec3 t_new;
        if (ok) ok = curve_tangent(fn, x_new, t_new);
        if (ok) t_new = t_new * static_cast<double>(direction);
        if (!ok || moved > 0.5 * h || dot(t_new, t_cur) <= 0.0) {
            h *= 0.5;
            continue;
        }
        arc += distance(x_new, x);
        x = x_new;
        t_cur = t_new;
        curve.vertices.push_back(x);
        {
            Complex val;
            CVec3 grad;
            fn.eval(x, val, grad);
            max_resid = std::max(max_resid, std::abs(val));
        }
        if (!inside_box(x)) {
            // clip the final vertex onto the box
            const Point3 prev = curve.vertices[curve.vertices.size() - 2];
            const Vec3 d = x - prev;
            double tcut = 1.0;
            for (int axis = 0; axis < 3; ++axis) {
                const double pc = axis == 0 ? prev.x : (axis == 1 ? prev.y : prev.z);
                const double dc = axis == 0 ? d.x : (axis == 1 ? d.y : d.z);
                if (dc > 0 && pc + dc > box_extent) tcut = std::min(tcut, (box_extent - pc) / dc);
                if (dc < 0 && pc + dc < -box_extent)
                    tcut = std::min(tcut, (-box_extent - pc) / dc);
            }
            curve.vertices.back() = prev + std::max(0.0, tcut) * d;
            out.hit_box = true;
            break;
        }
        if (moved < 0.05 * h) h = std::min(h * 1.4, h_max);
        double gap = 0.0;
        if (closure.update(x, t_cur, arc, &h, &gap)) {
            curve.closed = true;
            break;
        }
    }
    curve.recompute_metrics();
    curve.tags["max_resid"] = max_resid;
    curve.tags["steps"] = static_cast<double>(steps);
    return out;
}

ImplicitFn level_fn(const RationalMap& map, Complex c) {
    return ImplicitFn{[&map, c](const Point3& p, Complex& val, CVec3& grad) {
        const MapEval ev = eval_map(map, p);
        if (ev.pole) {
            val = Complex(std::numeric_limits<double>::infinity(), 0.0);
            grad = CVec3{};
            return;
        }
        val = ev.psi - c;
        grad = ev.grad_psi;
    }};
}

struct PolyImplicit {
    ComplexPolynomial poly;
    std::array<ComplexPolynomial, 4> partials;

    explicit PolyImplicit(const ComplexPolynomial& p) : poly(p) {
        for (int i = 0; i < 4; ++i) partials[i] = poly.partial(static_cast<Var>(i));
    }
    ImplicitFn fn() const {
        return ImplicitFn{[this](const Point3& p, Complex& val, CVec3& grad) {
            const SurfaceCoords sc = stereographic(p);
            val = poly_eval(poly, sc);
            grad = poly_gradient(poly, partials, sc);
        }};
    }
};

}  // namespace

Curve trace_level_curve(const RationalMap& map, Complex c, const Point3& seed,
                        const TraceParams& params) {
    params.validate();
    const ImplicitFn fn = level_fn(map, c);
    Point3 x = seed;
    if (!refine_to_curve(fn, x, params.corrector_tol, 50)) {
        throw std::runtime_error(
            "trace: level-curve seed refinement failed (value may be critical near the seed)");
    }
    ImplicitTraceOutcome out = trace_implicit(fn, x, params, 1e6, +1);
    if (!out.curve.closed) {
        throw std::runtime_error(
            "trace: level curve did not close within the step/arc limits (gap = " +
            std::to_string(out.curve.closure_gap) + ")");
    }
    return out.curve;
}

namespace {

NodalTraceResult trace_all_components(const PolyImplicit& pimp, const NodalScanSpec& scan,
                                      const TraceParams& params) {
    params.validate();
    if (scan.lattice < 4) throw std::invalid_argument("trace: scan lattice too small");
    NodalTraceResult result;
    const ImplicitFn fn = pimp.fn();

    const int n = scan.lattice;
    const double e = scan.extent;
    // cell-centred lattice: every sample is strictly interior, so seeds that
    // refine onto a boundary-crossing component stay inside the box
    const double spacing = 2.0 * e / n;
    auto lattice_point = [&](int i, int j, int k) {
        return Point3{-e + spacing * (i + 0.5), -e + spacing * (j + 0.5),
                      -e + spacing * (k + 0.5)};
    };
    std::vector<double> mag(static_cast<size_t>(n) * n * n);
    parallel_for(static_cast<int64_t>(n) * n * n, [&](int64_t idx) {
        const int i = static_cast<int>(idx % n);
        const int j = static_cast<int>((idx / n) % n);
        const int k = static_cast<int>(idx / (static_cast<int64_t>(n) * n));
        const SurfaceCoords sc = stereographic(lattice_point(i, j, k));
        mag[idx] = std::abs(poly_eval(pimp.poly, sc));
    });

    auto at = [&](int i, int j, int k) {
        return mag[static_cast<size_t>(i) + static_cast<size_t>(n) * (j + static_cast<size_t>(n) * k)];
    };

    // Local minima of |poly| on the lattice (strict against at least one
    // neighbour so constant fields yield nothing).
    std::vector<Point3> candidates;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const double v0 = at(i, j, k);
                bool le_all = true, lt_one = false;
                for (int dk = -1; dk <= 1 && le_all; ++dk) {
                    for (int dj = -1; dj <= 1 && le_all; ++dj) {
                        for (int di = -1; di <= 1 && le_all; ++di) {
                            if (di == 0 && dj == 0 && dk == 0) continue;
                            const int ii = i + di, jj = j + dj, kk = k + dk;
                            if (ii < 0 || jj < 0 || kk < 0 || ii >= n || jj >= n || kk >= n)
                                continue;
                            const double vn = at(ii, jj, kk);
                            if (vn < v0) le_all = false;
                            if (vn > v0) lt_one = true;
                        }
                    }
                }
                if (le_all && lt_one) candidates.push_back(lattice_point(i, j, k));
            }
        }
    }

    // Refine candidates onto the zero set.
    std::vector<Point3> seeds;
    int rank_deficient_count = 0;
    for (const Point3& cand : candidates) {
        Point3 x = cand;
        bool rank_def = false;
        if (!refine_to_curve(fn, x, scan.refine_tol, 60, &rank_def)) continue;
        if (rank_def) {
            ++rank_deficient_count;
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "trace: rank-deficient zero at (%.6g, %.6g, %.6g); zero set is not a "
                          "smooth curve there",
                          x.x, x.y, x.z);
            result.warnings.push_back(buf);
            continue;
        }
        const double margin = e - 1e-9;
        if (std::abs(x.x) > margin || std::abs(x.y) > margin || std::abs(x.z) > margin) continue;
        bool keep = true;
        for (const Point3& s : seeds) {
            if (distance(s, x) < scan.seed_spacing) {
                keep = false;
                break;
            }
        }
        if (keep) seeds.push_back(x);
    }

    for (const Point3& seed : seeds) {
        bool near_existing = false;
        for (const Curve& c : result.curves) {
            if (point_to_curve_distance(seed, c) < scan.curve_proximity) {
                near_existing = true;
                break;
            }
        }
        if (near_existing) continue;

        ImplicitTraceOutcome fwd = trace_implicit(fn, seed, params, scan.extent, +1);
        Curve traced;
        if (fwd.curve.closed) {
            traced = std::move(fwd.curve);
        } else if (fwd.hit_box) {
            // open component: extend backwards and splice
            ImplicitTraceOutcome bwd = trace_implicit(fn, seed, params, scan.extent, -1);
            traced.vertices.assign(bwd.curve.vertices.rbegin(), bwd.curve.vertices.rend() - 1);
            traced.vertices.insert(traced.vertices.end(), fwd.curve.vertices.begin(),
                                   fwd.curve.vertices.end());
            traced.closed = false;
            traced.recompute_metrics();
            traced.tags = fwd.curve.tags;
        } else {
            result.warnings.push_back("trace: component from seed did not close within limits");
            traced = std::move(fwd.curve);
        }

        bool duplicate = false;
        for (const Curve& c : result.curves) {
            if (hausdorff_distance(traced, c) < scan.dedupe_hausdorff) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) result.curves.push_back(std::move(traced));
    }
    (void)rank_deficient_count;
    return result;
}

}  // namespace

NodalTraceResult trace_nodal_curve(const ComplexPolynomial& poly, const NodalScanSpec& scan,
                                   const TraceParams& params) {
    PolyImplicit pimp(poly);
    return trace_all_components(pimp, scan, params);
}

NodalTraceResult level_curve_components(const RationalMap& map, Complex c,
                                        const NodalScanSpec& scan, const TraceParams& params) {
    // psi = c  <=>  P - c Q = 0 away from the degenerate set; the traced
    // orientation matches the field direction.
    std::vector<PolyTerm> terms = map.P.terms();
    for (PolyTerm t : map.Q.terms()) {
        t.coeff *= -c;
        terms.push_back(t);
    }
    PolyImplicit pimp(ComplexPolynomial(std::move(terms)));
    return trace_all_components(pimp, scan, params);
}

Point3 seed_on_chi_surface(const RationalMap& map, const Point3& x0, const Vec3& dir,
                           double chi_target, double t_max) {
    const Vec3 d = normalized(dir);
    auto chi_at = [&](double t) { return euler_potentials(map, x0 + t * d).chi; };
    const int n_scan = 400;
    double t_prev = 0.0;
    double c_prev = chi_at(0.0);
    for (int i = 1; i <= n_scan; ++i) {
        const double t = t_max * i / n_scan;
        const double c = chi_at(t);
        if ((c_prev - chi_target) * (c - chi_target) <= 0.0) {
            double lo = t_prev, hi = t;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((chi_at(lo) - chi_target) * (chi_at(mid) - chi_target) <= 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            return x0 + 0.5 * (lo + hi) * d;
        }
        t_prev = t;
        c_prev = c;
    }
    throw std::runtime_error("trace: chi target not bracketed along the given direction");
}

}  // namespace kf
