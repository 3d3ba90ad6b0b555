#include "kf/helicity.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "kf/trace.hpp"

namespace kf {

namespace {

HelicityResult from_quadrature(const QuadratureResult& q) {
    HelicityResult h;
    h.value = q.value;
    h.error_estimate = q.error;
    h.method = HelicityMethod::volume_quadrature;
    h.converged = q.converged;
    h.convergence = q.history;
    return h;
}

}  // namespace

HelicityResult helicity_volume(const RationalMap& map, const QuadratureSpec& spec) {
    auto integrand = [&map](const Vec3& x) { return helicity_integrand(map, x); };
    return from_quadrature(integrate_ball(integrand, spec));
}

std::optional<long long> helicity_formula(const RationalMap& map) {
    if (map.tuning) {
        const TorusTuning& t = *map.tuning;
        return static_cast<long long>(t.alpha) * t.p + static_cast<long long>(t.beta) * t.q;
    }
    // P = c u^alpha (single term), Q free of vbar  =>  H = alpha * deg_v(Q)
    const auto& terms = map.P.terms();
    if (terms.size() == 1 && terms[0].e[1] == 0 && terms[0].e[2] == 0 && terms[0].e[3] == 0 &&
        terms[0].e[0] >= 1 && !map.Q.depends_on(Var::vbar)) {
        return static_cast<long long>(terms[0].e[0]) * map.Q.deg_v();
    }
    return std::nullopt;
}

HelicityResult fluxtube_helicity(const RationalMap& map, double chi0, const QuadratureSpec& spec) {
    if (chi0 < 0.0 || chi0 > 1.0)
        throw std::invalid_argument("helicity: chi0 must lie in [0, 1]");
    // The tube field B restricted to chi > chi0 has vector potential
    // (chi - chi0) grad eta + (1 - chi0) grad f (continuous across the tube
    // boundary, gauge-fixed at the core). Since A = chi grad eta is exactly
    // orthogonal to B, the tube helicity reduces to (1 - chi0) times the
    // restricted integral of A_smooth . B.
    auto integrand = [&map, chi0](const Vec3& x) {
        const MapEval ev = eval_map(map, x);
        const double chi = std::norm(ev.P) / ev.norm2_sum;
        if (chi <= chi0) return 0.0;
        return dot(vecpot_smooth(ev, x), bfield(ev, x));
    };
    HelicityResult res = from_quadrature(integrate_ball(integrand, spec));
    const double scale = 1.0 - chi0;
    res.value *= scale;
    res.error_estimate *= scale;
    for (auto& [n, v] : res.convergence) v *= scale;
    return res;
}

namespace {

// chi and its in-plane gradient at plane coordinates (w1, w2).
struct PlaneChi {
    const RationalMap& map;
    Point3 origin;
    Vec3 e1, e2;

    Point3 at(double w1, double w2) const { return origin + w1 * e1 + w2 * e2; }
    void eval(double w1, double w2, double& chi, double& g1, double& g2) const {
        const MapEval ev = eval_map(map, at(w1, w2));
        const EulerGradients eg = euler_gradients(ev);
        chi = std::norm(ev.P) / ev.norm2_sum;
        g1 = dot(eg.grad_chi, e1);
        g2 = dot(eg.grad_chi, e2);
    }
};

// Trace the closed level loop chi = chi0 in the section plane, starting from
// a point on the loop. 2D predictor-corrector with the same closure scheme
// as the 3D tracers. h_max and max_arc scale with the loop size.
std::vector<Point3> trace_plane_loop(const PlaneChi& plane, double chi0, double w1_start,
                                     const CrossSectionSpec& spec, double h_max,
                                     double max_arc) {
    double w1 = w1_start, w2 = 0.0;

    auto tangent = [&](double a, double b, double& t1, double& t2) {
        double chi, g1, g2;
        plane.eval(a, b, chi, g1, g2);
        const double n = std::hypot(g1, g2);
        if (!(n > 1e-14)) throw std::runtime_error("helicity: vanishing chi gradient on section");
        t1 = -g2 / n;
        t2 = g1 / n;
    };
    auto correct = [&](double& a, double& b) {
        for (int it = 0; it < 12; ++it) {
            double chi, g1, g2;
            plane.eval(a, b, chi, g1, g2);
            const double r = chi - chi0;
            if (std::abs(r) <= spec.closure_tol * 0.1 + 1e-14) return true;
            const double n2 = g1 * g1 + g2 * g2;
            if (!(n2 > 1e-28)) return false;
            a -= r * g1 / n2;
            b -= r * g2 / n2;
        }
        return false;
    };

    if (!correct(w1, w2))
        throw std::runtime_error("helicity: could not land on the chi0 level in the section plane");

    const double a0 = w1, b0 = w2;
    double t1, t2;
    tangent(a0, b0, t1, t2);
    const double dir10 = t1, dir20 = t2;

    std::vector<Point3> loop;
    loop.push_back(plane.at(w1, w2));

    double h = spec.step;
    double arc = 0.0;
    bool closed = false;
    bool landing = false;
    double g_prev = 0.0;
    const double capture = std::max(20.0 * spec.closure_tol, 4.0 * h_max);
    int steps = 0;
    while (steps < spec.max_steps && arc < max_arc) {
        ++steps;
        double ct1, ct2;
        tangent(w1, w2, ct1, ct2);
        double a = w1 + h * ct1, b = w2 + h * ct2;
        if (!correct(a, b)) {
            h *= 0.5;
            if (h < 1e-12) throw std::runtime_error("helicity: section tracer step underflow");
            continue;
        }
        arc += std::hypot(a - w1, b - w2);
        w1 = a;
        w2 = b;
        loop.push_back(plane.at(w1, w2));
        h = std::min(h * 1.2, h_max);
        if (arc < 10.0 * h_max) continue;
        const double dx = w1 - a0, dy = w2 - b0;
        const double d = std::hypot(dx, dy);
        double lt1, lt2;
        tangent(w1, w2, lt1, lt2);
        const double align = lt1 * dir10 + lt2 * dir20;
        if (!landing) {
            if (align > 0.9 && d < capture) {
                landing = true;
                g_prev = lt1 * dx + lt2 * dy;
                h = std::min(h, std::max(0.25 * spec.closure_tol, 0.1 * d));
            }
            continue;
        }
        const double g = lt1 * dx + lt2 * dy;
        if (g_prev < 0.0 && g >= 0.0) {
            closed = true;
            break;
        }
        g_prev = g;
        if (d > 1.5 * capture) landing = false;
        else h = std::min(h, std::max(0.25 * spec.closure_tol, 0.1 * d));
    }
    if (!closed)
        throw std::runtime_error("helicity: cross-section boundary loop failed to close");
    return loop;
}

}  // namespace

double fluxtube_flux(const RationalMap& map, double chi0, const Curve& core,
                     const CrossSectionSpec& spec) {
    if (!(chi0 >= 0.0 && chi0 < 1.0))
        throw std::invalid_argument("helicity: chi0 must lie in [0, 1) for the flux computation");
    if (core.vertices.size() < 8 || !core.closed)
        throw std::runtime_error("helicity: flux computation needs a closed core curve");

    // As chi0 -> 0 the section boundary degenerates onto the P = 0 set, so
    // evaluate small chi0 by extrapolating nearby sections toward chi0.
    if (chi0 < 0.02) {
        const double f1 = fluxtube_flux(map, chi0 + 0.025, core, spec);
        const double f2 = fluxtube_flux(map, chi0 + 0.05, core, spec);
        return 2.0 * f1 - f2;
    }

    std::string last_error = "no anchor worked";
    const size_t n = core.vertices.size();
    for (size_t attempt = 0; attempt < 3; ++attempt) {
        const size_t i0 = (attempt * n) / 3;
        const Point3 anchor = core.vertices[i0];
        const Vec3 tangent =
            normalized(core.vertices[(i0 + 1) % n] - core.vertices[(i0 + n - 1) % n]);
        Vec3 e1 = std::abs(tangent.z) < 0.9 ? cross(tangent, Vec3{0, 0, 1})
                                            : cross(tangent, Vec3{1, 0, 0});
        e1 = normalized(e1);
        const Vec3 e2 = cross(tangent, e1);

        PlaneChi plane{map, anchor, e1, e2};
        try {
            // First crossing of chi0 along +e1 brackets our strand's boundary;
            // the scan range expands until the level is found.
            double chi, g1, g2;
            plane.eval(0.0, 0.0, chi, g1, g2);
            if (chi <= chi0)
                throw std::runtime_error("helicity: anchor is not inside the flux tube");
            double w_cross = -1.0;
            for (double range = spec.max_extent; range <= 400.0 && w_cross < 0.0; range *= 2.0) {
                double w_prev = 0.0;
                const int n_scan = 800;
                for (int i = 1; i <= n_scan; ++i) {
                    const double w = range * i / n_scan;
                    plane.eval(w, 0.0, chi, g1, g2);
                    if (chi <= chi0) {
                        double lo = w_prev, hi = w;
                        for (int it = 0; it < 60; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            double cm;
                            plane.eval(mid, 0.0, cm, g1, g2);
                            (cm > chi0 ? lo : hi) = mid;
                        }
                        w_cross = 0.5 * (lo + hi);
                        break;
                    }
                    w_prev = w;
                }
            }
            if (w_cross < 0.0)
                throw std::runtime_error(
                    "helicity: chi0 level not found in the section plane");

            const double h_max = std::max(spec.step, w_cross / 200.0);
            const double max_arc = std::max(spec.max_loop_len, 40.0 * w_cross);
            std::vector<Point3> loop = trace_plane_loop(plane, chi0, w_cross, spec, h_max, max_arc);

            // The loop must wind exactly once around the anchor strand.
            double winding = 0.0;
            for (size_t i = 0; i < loop.size(); ++i) {
                const Point3& a = loop[i];
                const Point3& b = loop[(i + 1) % loop.size()];
                const double a1 = dot(a - anchor, e1), a2 = dot(a - anchor, e2);
                const double b1 = dot(b - anchor, e1), b2 = dot(b - anchor, e2);
                winding += std::atan2(a1 * b2 - a2 * b1, a1 * b1 + a2 * b2);
            }
            winding /= 2.0 * std::numbers::pi;
            if (std::llround(std::abs(winding)) != 1)
                throw std::runtime_error(
                    "helicity: section boundary does not enclose the core exactly once");

            // Resample the polygon uniformly and integrate A_smooth along it
            // (Stokes: flux through the flat section spanned by the loop).
            Curve poly;
            poly.vertices = std::move(loop);
            poly.closed = true;
            poly.recompute_metrics();
            poly = resample_uniform(poly, static_cast<size_t>(spec.resample));

            double flux = 0.0;
            Vec3 area{};
            const size_t m = poly.vertices.size();
            for (size_t i = 0; i < m; ++i) {
                const Point3& a = poly.vertices[i];
                const Point3& b = poly.vertices[(i + 1) % m];
                const Point3 mid = a + 0.5 * (b - a);
                flux += dot(vecpot_smooth(map, mid), b - a);
                area += cross(a - anchor, b - anchor);
            }
            // Orient the section along B at the anchor.
            const double orient = dot(0.5 * area, bfield(map, anchor));
            if (orient < 0.0) flux = -flux;
            return flux;
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    throw std::runtime_error("helicity: cross-section flux failed at all anchors; " + last_error);
}

double fluxtube_flux(const RationalMap& map, double chi0, const CrossSectionSpec& spec) {
    NodalTraceResult nodal = trace_nodal_curve(map.Q, NodalScanSpec{}, TraceParams{});
    const Curve* best = nullptr;
    for (const Curve& c : nodal.curves) {
        if (!c.closed) continue;
        if (!best || c.arc_length > best->arc_length) best = &c;
    }
    if (!best)
        throw std::runtime_error(
            "helicity: no closed nodal curve of Q found (flux tube undefined)");
    return fluxtube_flux(map, chi0, *best, spec);
}

QuadratureResult total_energy(const RationalMap& map, double radius, const QuadratureSpec& spec) {
    if (!(radius > 0.0)) throw std::invalid_argument("helicity: energy radius must be positive");
    auto integrand = [&map](const Vec3& x) { return energy_density(map, x); };
    return integrate_ball(integrand, spec, radius);
}

double energy_decay_slope(const RationalMap& map, double r_lo, double r_hi, int n_r, int n_dirs) {
    if (!(r_hi > r_lo) || n_r < 2) throw std::invalid_argument("helicity: bad decay-slope range");
    // Fibonacci sphere directions: deterministic, roughly uniform.
    std::vector<Vec3> dirs;
    dirs.reserve(n_dirs);
    const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n_dirs; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n_dirs;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = ga * i;
        dirs.push_back(Vec3{rho * std::cos(phi), rho * std::sin(phi), z});
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < n_r; ++k) {
        const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(k) / (n_r - 1));
        double peak = 0.0;
        for (const Vec3& d : dirs) peak = std::max(peak, energy_density(map, r * d));
        const double lx = std::log(r), ly = std::log(peak);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n_r * sxy - sx * sy) / (n_r * sxx - sx * sx);
}

}  // namespace kf
