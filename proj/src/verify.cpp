#include "kf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

#include "kf/field.hpp"
#include "kf/helicity.hpp"
#include "kf/linking.hpp"
#include "kf/trace.hpp"

namespace kf {

namespace {

std::string fmt(const char* pattern, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b);
    return buf;
}

struct Sampler {
    std::mt19937_64 rng;
    double extent;
    explicit Sampler(uint64_t seed, double e) : rng(seed), extent(e) {}

    Point3 point() {
        std::uniform_real_distribution<double> d(-extent, extent);
        const double x = d(rng), y = d(rng), z = d(rng);
        return {x, y, z};
    }
    // rejection sampling with a predicate on the map evaluation
    Point3 point_where(const RationalMap& map, const std::function<bool(const MapEval&)>& pred) {
        for (int tries = 0; tries < 100000; ++tries) {
            const Point3 p = point();
            if (pred(eval_map(map, p))) return p;
        }
        throw std::runtime_error("verify: rejection sampling failed to find admissible points");
    }
};

double chi_of(const MapEval& ev) { return std::norm(ev.P) / ev.norm2_sum; }

// 4th-order central differences, fixed step.
Vec3 fd_gradient(const std::function<double(const Point3&)>& f, const Point3& x, double h) {
    Vec3 g;
    for (int axis = 0; axis < 3; ++axis) {
        auto shift = [&](double s) {
            Point3 p = x;
            (axis == 0 ? p.x : axis == 1 ? p.y : p.z) += s;
            return f(p);
        };
        const double d =
            (-shift(2 * h) + 8 * shift(h) - 8 * shift(-h) + shift(-2 * h)) / (12 * h);
        (axis == 0 ? g.x : axis == 1 ? g.y : g.z) = d;
    }
    return g;
}

double fd_divergence(const std::function<Vec3(const Point3&)>& f, const Point3& x, double h) {
    double div = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
        auto shift = [&](double s) {
            Point3 p = x;
            (axis == 0 ? p.x : axis == 1 ? p.y : p.z) += s;
            const Vec3 v = f(p);
            return axis == 0 ? v.x : axis == 1 ? v.y : v.z;
        };
        div += (-shift(2 * h) + 8 * shift(h) - 8 * shift(-h) + shift(-2 * h)) / (12 * h);
    }
    return div;
}

Vec3 fd_curl(const std::function<Vec3(const Point3&)>& f, const Point3& x, double h) {
    auto deriv = [&](int comp, int axis) {
        auto shift = [&](double s) {
            Point3 p = x;
            (axis == 0 ? p.x : axis == 1 ? p.y : p.z) += s;
            const Vec3 v = f(p);
            return comp == 0 ? v.x : comp == 1 ? v.y : v.z;
        };
        return (-shift(2 * h) + 8 * shift(h) - 8 * shift(-h) + shift(-2 * h)) / (12 * h);
    };
    return {deriv(2, 1) - deriv(1, 2), deriv(0, 2) - deriv(2, 0), deriv(1, 0) - deriv(0, 1)};
}

// gradient of a circle-valued scalar (turns), unwrapped around the center value
Vec3 fd_gradient_circular(const std::function<double(const Point3&)>& f, const Point3& x,
                          double h) {
    const double fc = f(x);
    auto unwrapped = [&](const Point3& p) { return fc + turn_diff(f(p), fc); };
    return fd_gradient(unwrapped, x, h);
}

std::vector<Vec3> fibonacci_sphere(int n) {
    std::vector<Vec3> dirs;
    dirs.reserve(n);
    const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        dirs.push_back(Vec3{rho * std::cos(ga * i), rho * std::sin(ga * i), z});
    }
    return dirs;
}

Curve make_circle(const Point3& center, double radius, int plane, int n) {
    // plane 0: xy, plane 1: xz
    Curve c;
    c.closed = true;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        Point3 p = center;
        if (plane == 0) {
            p.x += radius * std::cos(t);
            p.y += radius * std::sin(t);
        } else {
            p.x += radius * std::cos(t);
            p.z += radius * std::sin(t);
        }
        c.vertices.push_back(p);
    }
    c.recompute_metrics();
    return c;
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& checks) {
    for (const CheckResult& c : checks)
        if (!c.pass && !c.skipped) return false;
    return true;
}

std::vector<CheckResult> run_verify(const RationalMap& map, const VerifySpec& spec) {
    std::vector<CheckResult> out;
    auto add = [&](const std::string& name, bool pass, const std::string& detail,
                   bool skipped = false) {
        out.push_back(CheckResult{name, pass, skipped, detail});
    };

    const int N = spec.points;
    const double h = spec.fd_step;

    auto nondeg = [](const MapEval& ev) { return !ev.degenerate(); };
    auto nonsingular = [](const MapEval& ev) {
        const double chi = std::norm(ev.P) / ev.norm2_sum;
        return chi > 0.05 && chi < 0.95;
    };
    auto away_from_pole = [](const MapEval& ev) {
        return std::norm(ev.P) / ev.norm2_sum < 0.7;  // |psi|^2 < 7/3
    };
    auto on_shell = [](const MapEval& ev) {
        const double chi = std::norm(ev.P) / ev.norm2_sum;
        return chi > 0.2 && chi < 0.8;  // 0.5 < |psi| < 2
    };

    // --- surface coordinates -----------------------------------------------
    {
        Sampler s(spec.seed, spec.box_extent * 4.0);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const SurfaceCoords sc = stereographic(s.point());
            worst = std::max(worst, std::abs(std::norm(sc.u) + std::norm(sc.v) - 1.0));
        }
        add("surface_identity", worst < 1e-12,
            fmt("max ||u|^2+|v|^2 - 1| = %.3g (tol %.3g)", worst, 1e-12));
    }

    // --- analytic map gradient vs central differences ----------------------
    {
        Sampler s(spec.seed + 1, spec.box_extent);
        double worst = 0.0;
        const double hh = 1e-5;
        for (int i = 0; i < 100; ++i) {
            const Point3 p = s.point_where(map, away_from_pole);
            const MapEval ev = eval_map(map, p);
            CVec3 fd{};
            for (int axis = 0; axis < 3; ++axis) {
                Point3 pp = p, pm = p;
                (axis == 0 ? pp.x : axis == 1 ? pp.y : pp.z) += hh;
                (axis == 0 ? pm.x : axis == 1 ? pm.y : pm.z) -= hh;
                const Complex d =
                    (eval_map(map, pp).psi - eval_map(map, pm).psi) / (2.0 * hh);
                (axis == 0 ? fd.x : axis == 1 ? fd.y : fd.z) = d;
            }
            const CVec3 diff = fd - ev.grad_psi;
            const double scale = std::max({std::abs(ev.grad_psi.x), std::abs(ev.grad_psi.y),
                                           std::abs(ev.grad_psi.z), 1e-12});
            worst = std::max(worst,
                             std::max({std::abs(diff.x), std::abs(diff.y), std::abs(diff.z)}) /
                                 scale);
        }
        add("map_gradient_fd", worst < 1e-6, fmt("max rel err %.3g (tol %.3g)", worst, 1e-6));
    }

    // --- formal partials vs complex-step differences -----------------------
    {
        Sampler s(spec.seed + 2, 1.0);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        double worst = 0.0;
        const double hh = 1e-6;
        for (const ComplexPolynomial* poly : {&map.P, &map.Q}) {
            for (int var = 0; var < 4; ++var) {
                const ComplexPolynomial dp = poly->partial(static_cast<Var>(var));
                for (int i = 0; i < 25; ++i) {
                    Complex w[4] = {Complex(d(s.rng), d(s.rng)), Complex(d(s.rng), d(s.rng)),
                                    Complex(d(s.rng), d(s.rng)), Complex(d(s.rng), d(s.rng))};
                    Complex wp[4], wm[4];
                    for (int k = 0; k < 4; ++k) wp[k] = wm[k] = w[k];
                    wp[var] += hh;
                    wm[var] -= hh;
                    const Complex fd = (poly->eval_free(wp[0], wp[1], wp[2], wp[3]) -
                                        poly->eval_free(wm[0], wm[1], wm[2], wm[3])) /
                                       (2.0 * hh);
                    const Complex an = dp.eval_free(w[0], w[1], w[2], w[3]);
                    const double scale = std::max(std::abs(an), 1.0);
                    worst = std::max(worst, std::abs(fd - an) / scale);
                }
            }
        }
        add("poly_partial_fd", worst < 1e-8, fmt("max rel err %.3g (tol %.3g)", worst, 1e-8));
    }

    // --- serialization round trip ------------------------------------------
    {
        bool ok = true;
        for (const ComplexPolynomial* poly : {&map.P, &map.Q}) {
            const std::string t1 = poly->to_text();
            const ComplexPolynomial back = ComplexPolynomial::parse_text(t1);
            const std::string t2 = back.to_text();
            ok = ok && (back == *poly) && (t1 == t2);
        }
        add("poly_serialization", ok, ok ? "byte-identical round trips" : "round trip mismatch");
    }

    // --- B = grad chi x grad eta (analytic) ---------------------------------
    {
        Sampler s(spec.seed + 3, spec.box_extent);
        double worst = 0.0;
        for (int i = 0; i < N; ++i) {
            const Point3 p = s.point_where(map, nonsingular);
            const MapEval ev = eval_map(map, p);
            const Vec3 B = bfield(ev, p);
            const EulerGradients eg = euler_gradients(ev);
            const Vec3 Bx = cross(eg.grad_chi, eg.grad_eta);
            worst = std::max(worst, norm(B - Bx) / std::max(norm(B), 1e-300));
        }
        add("euler_identity_analytic", worst < 1e-6,
            fmt("max rel err %.3g (tol %.3g)", worst, 1e-6));
    }

    // --- B = grad chi x grad eta (finite differences, unwrapped eta) --------
    {
        Sampler s(spec.seed + 4, spec.box_extent);
        double worst = 0.0;
        auto chif = [&](const Point3& p) { return euler_potentials(map, p).chi; };
        auto etaf = [&](const Point3& p) { return euler_potentials(map, p).eta; };
        for (int i = 0; i < std::min(N, 100); ++i) {
            const Point3 p = s.point_where(map, nonsingular);
            const Vec3 B = bfield(map, p);
            const Vec3 gc = fd_gradient(chif, p, h);
            const Vec3 ge = fd_gradient_circular(etaf, p, h);
            worst = std::max(worst, norm(B - cross(gc, ge)) / std::max(norm(B), 1e-300));
        }
        add("euler_identity_fd", worst < 1e-4, fmt("max rel err %.3g (tol %.3g)", worst, 1e-4));
    }

    // --- divergence-free ----------------------------------------------------
    {
        Sampler s(spec.seed + 5, spec.box_extent);
        auto bf = [&](const Point3& p) { return bfield(map, p); };
        double worst = 0.0;
        for (int i = 0; i < N; ++i) {
            const Point3 p = s.point_where(map, nondeg);
            const double div = std::abs(fd_divergence(bf, p, h));
            const double bound = 1e-5 * norm(bfield(map, p)) / h;
            worst = std::max(worst, div / std::max(bound, 1e-300));
        }
        add("divergence_free", worst < 1.0,
            fmt("max |div|/(1e-5 |B|/h) = %.3g (tol %.3g)", worst, 1.0));
    }

    // --- curl of the smooth potential ---------------------------------------
    {
        Sampler s(spec.seed + 6, spec.box_extent);
        auto af = [&](const Point3& p) { return vecpot_smooth(map, p); };
        double worst = 0.0;
        for (int i = 0; i < N; ++i) {
            const Point3 p = s.point_where(map, nondeg);
            const Vec3 B = bfield(map, p);
            worst = std::max(worst, norm(fd_curl(af, p, h) - B) / std::max(norm(B), 1e-300));
        }
        add("curl_smooth_potential", worst < 1e-4,
            fmt("max rel err %.3g (tol %.3g)", worst, 1e-4));
    }

    // --- curl of the naive potential away from Q = 0 ------------------------
    {
        Sampler s(spec.seed + 7, spec.box_extent);
        auto af = [&](const Point3& p) {
            const PotentialSample ps = vecpot_naive(map, p);
            if (!ps.valid) throw std::runtime_error("verify: naive potential invalid at sample");
            return ps.A;
        };
        double worst = 0.0;
        for (int i = 0; i < N; ++i) {
            const Point3 p = s.point_where(map, away_from_pole);
            const Vec3 B = bfield(map, p);
            worst = std::max(worst, norm(fd_curl(af, p, h) - B) / std::max(norm(B), 1e-300));
        }
        add("curl_naive_potential", worst < 1e-4,
            fmt("max rel err %.3g (tol %.3g)", worst, 1e-4));
    }

    // --- gauge identity A + grad f = A_smooth --------------------------------
    {
        Sampler s(spec.seed + 8, spec.box_extent);
        auto ff = [&](const Point3& p) { return gauge_phase(map, p).f; };
        double worst = 0.0;
        for (int i = 0; i < std::min(N, 200); ++i) {
            const Point3 p = s.point_where(map, away_from_pole);
            const Vec3 A = vecpot_naive(map, p).A;
            const Vec3 As = vecpot_smooth(map, p);
            const Vec3 gf = fd_gradient_circular(ff, p, h);
            worst = std::max(worst, norm(A + gf - As) / std::max(norm(As), 1e-12));
        }
        add("gauge_identity", worst < 1e-4, fmt("max rel err %.3g (tol %.3g)", worst, 1e-4));
    }

    // --- direct vs reciprocal evaluation on the overlap shell ---------------
    {
        Sampler s(spec.seed + 9, spec.box_extent);
        double worst = 0.0;
        for (int i = 0; i < N; ++i) {
            const Point3 p = s.point_where(map, on_shell);
            const Vec3 bd = bfield_form(map, p, BForm::direct);
            const Vec3 br = bfield_form(map, p, BForm::reciprocal);
            worst = std::max(worst, norm(bd - br) / std::max(norm(bd), 1e-300));
        }
        add("reciprocal_consistency", worst < 1e-8,
            fmt("max rel err %.3g (tol %.3g)", worst, 1e-8));
    }

    // --- tangency to the chi and eta foliations -----------------------------
    {
        Sampler s(spec.seed + 10, spec.box_extent);
        double worst = 0.0;
        for (int i = 0; i < N; ++i) {
            const Point3 p = s.point_where(map, nonsingular);
            const MapEval ev = eval_map(map, p);
            const Vec3 B = bfield(ev, p);
            const EulerGradients eg = euler_gradients(ev);
            const double nb = norm(B);
            const double r1 = std::abs(dot(B, eg.grad_chi)) /
                              std::max(1e-8 * nb * norm(eg.grad_chi), 1e-300);
            const double r2 = std::abs(dot(B, eg.grad_eta)) /
                              std::max(1e-8 * nb * norm(eg.grad_eta), 1e-300);
            worst = std::max({worst, r1, r2});
        }
        add("tangency", worst < 1.0,
            fmt("max |B.grad|/(1e-8 |B||grad|) = %.3g (tol %.3g)", worst, 1.0));
    }

    // --- chi range and decay -------------------------------------------------
    {
        Sampler s(spec.seed + 11, spec.box_extent);
        double lo = 1.0, hi = 0.0;
        for (int i = 0; i < N; ++i) {
            const double chi = chi_of(eval_map(map, s.point()));
            lo = std::min(lo, chi);
            hi = std::max(hi, chi);
        }
        add("chi_range", lo >= 0.0 && hi <= 1.0, fmt("chi in [%.3g, %.3g]", lo, hi));

        // decay applies when psi -> 0 at infinity, i.e. P(0,i) = 0 != Q(0,i)
        const Complex Pinf = map.P.eval(Complex(0, 0), Complex(0, 1));
        const Complex Qinf = map.Q.eval(Complex(0, 0), Complex(0, 1));
        if (std::abs(Pinf) < 1e-14 && std::abs(Qinf) > 1e-14) {
            double worst = 0.0;
            for (const Vec3& d : fibonacci_sphere(16))
                worst = std::max(worst, chi_of(eval_map(map, 1000.0 * d)));
            add("chi_decay_far_field", worst < 1e-2,
                fmt("max chi at r=1e3: %.3g (tol %.3g)", worst, 1e-2));
        } else {
            add("chi_decay_far_field", true, "not applicable (psi does not vanish at infinity)",
                true);
        }
    }

    // --- naive potential blows up at Q = 0, smooth potential stays bounded --
    {
        if (map.Q.is_constant()) {
            add("vecpot_nodal_blowup", true, "not applicable (Q is constant)", true);
        } else {
            NodalTraceResult nodal = trace_nodal_curve(map.Q, NodalScanSpec{}, TraceParams{});
            const Curve* core = nullptr;
            for (const Curve& c : nodal.curves)
                if (c.closed && (!core || c.arc_length > core->arc_length)) core = &c;
            if (!core) {
                add("vecpot_nodal_blowup", true, "not applicable (no closed nodal curve found)",
                    true);
            } else {
                double med_naive, med_smooth;
                {
                    std::vector<double> va, vs;
                    for (const Vec3& d : fibonacci_sphere(64)) {
                        const Point3 p = 2.0 * d;
                        const MapEval ev = eval_map(map, p);
                        const PotentialSample ps = vecpot_naive(ev);
                        if (ps.valid) va.push_back(norm(ps.A));
                        vs.push_back(norm(vecpot_smooth(ev, p)));
                    }
                    std::sort(va.begin(), va.end());
                    std::sort(vs.begin(), vs.end());
                    med_naive = va[va.size() / 2];
                    med_smooth = vs[vs.size() / 2];
                }
                const size_t i0 = core->vertices.size() / 4;
                const Point3 x0 = core->vertices[i0];
                const size_t nn = core->vertices.size();
                const Vec3 t = normalized(core->vertices[(i0 + 1) % nn] -
                                          core->vertices[(i0 + nn - 1) % nn]);
                Vec3 nrm = std::abs(t.z) < 0.9 ? cross(t, Vec3{0, 0, 1}) : cross(t, Vec3{1, 0, 0});
                nrm = normalized(nrm);
                const double a2 = norm(vecpot_naive(map, x0 + 1e-2 * nrm).A);
                const double a3 = norm(vecpot_naive(map, x0 + 1e-3 * nrm).A);
                double max_smooth_on_curve = 0.0;
                for (const Point3& p : core->vertices)
                    max_smooth_on_curve = std::max(max_smooth_on_curve, norm(vecpot_smooth(map, p)));
                const bool blowup = a3 > a2 && a2 > 10.0 * med_naive;
                const bool bounded = max_smooth_on_curve < 10.0 * med_smooth;
                add("vecpot_nodal_blowup", blowup,
                    fmt("|A| at d=1e-3: %.3g, at d=1e-2: %.3g vs 10*median", a3, a2));
                add("vecpot_smooth_bounded", bounded,
                    fmt("max |A_smooth| on nodal curve %.3g vs 10*median %.3g",
                        max_smooth_on_curve, 10.0 * med_smooth));
            }
        }
    }

    // --- linking integral symmetries (map-independent) ----------------------
    {
        const Curve a = make_circle({0, 0, 0}, 1.0, 0, 256);
        const Curve b = make_circle({1, 0, 0}, 1.0, 1, 256);
        const Curve far = make_circle({5, 0, 0}, 1.0, 0, 256);
        const LinkingResult ab = gauss_linking(a, b);
        const LinkingResult ba = gauss_linking(b, a);
        const LinkingResult rev = gauss_linking(reversed(a), b);
        const LinkingResult unl = gauss_linking(a, far);
        const bool sym = std::abs(ab.raw - ba.raw) < 1e-10;
        const bool anti = std::abs(rev.raw + ab.raw) < 1e-10;
        const bool hopf_pair = std::llabs(ab.value) == 1;
        const bool unlinked = unl.value == 0;
        add("linking_symmetry", sym && anti,
            fmt("|lk(a,b)-lk(b,a)| = %.3g, |lk(-a,b)+lk(a,b)| = %.3g", std::abs(ab.raw - ba.raw),
                std::abs(rev.raw + ab.raw)));
        add("linking_reference_values", hopf_pair && unlinked,
            fmt("hopf pair -> %+.3g, distant pair -> %+.3g", ab.raw, unl.raw));
    }

    return out;
}

}  // namespace kf
