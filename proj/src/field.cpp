#include "kf/field.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace kf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void throw_degenerate(const Point3& p) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "field: map degenerate at point (%.9g, %.9g, %.9g)", p.x, p.y,
                  p.z);
    throw std::runtime_error(buf);
}

// Componentwise Re(conj(a) * b); gradient of |a|^2 is 2 * real_herm(a, grad a).
Vec3 real_herm(const Complex& a, const CVec3& b) {
    const Complex ca = std::conj(a);
    return {(ca * b.x).real(), (ca * b.y).real(), (ca * b.z).real()};
}

// Eq.-1 expression evaluated for an explicit complex scalar gradient g and
// modulus-squared m2 = |psi|^2: Im(conj(g) x g) / (2 pi (1+m2)^2).
Vec3 bfield_from_gradient(const CVec3& g, double m2) {
    const Vec3 w = imag(cross(conj(g), g));
    const double denom = kTwoPi * (1.0 + m2) * (1.0 + m2);
    return w / denom;
}

}  // namespace

double wrap_turn(double t) {
    double r = t - std::floor(t);
    if (r >= 1.0) r -= 1.0;
    return r;
}

double turn_diff(double a, double b) {
    double d = a - b;
    d -= std::round(d);
    if (d <= -0.5) d += 1.0;
    return d;
}

Vec3 bfield_form(const RationalMap& map, const Point3& p, BForm form) {
    const MapEval ev = eval_map(map, p);
    if (ev.degenerate()) throw_degenerate(p);
    if (form == BForm::direct) {
        if (ev.pole) throw std::runtime_error("field: direct form requested at a pole of psi");
        return bfield_from_gradient(ev.grad_psi, std::norm(ev.psi));
    }
    const double aP = std::abs(ev.P);
    const double aQ = std::abs(ev.Q);
    if (aP < kPoleTolFactor * (1.0 + aQ))
        throw std::runtime_error("field: reciprocal form requested at a zero of psi");
    const Complex phi = ev.Q / ev.P;
    const CVec3 grad_phi = (ev.P * ev.grad_Q - ev.Q * ev.grad_P) * (1.0 / (ev.P * ev.P));
    return bfield_from_gradient(grad_phi, std::norm(phi));
}

Vec3 bfield(const MapEval& ev, const Point3& p) {
    if (ev.degenerate()) throw_degenerate(p);
    // |psi| <= 1: evaluate in psi; otherwise in 1/psi = Q/P, which is the
    // same expression and avoids cancellation near Q = 0.
    if (!ev.pole && std::abs(ev.P) <= std::abs(ev.Q)) {
        return bfield_from_gradient(ev.grad_psi, std::norm(ev.psi));
    }
    const Complex phi = ev.Q / ev.P;
    const CVec3 grad_phi = (ev.P * ev.grad_Q - ev.Q * ev.grad_P) * (1.0 / (ev.P * ev.P));
    return bfield_from_gradient(grad_phi, std::norm(phi));
}

Vec3 bfield(const RationalMap& map, const Point3& p) { return bfield(eval_map(map, p), p); }

EulerPotentials euler_potentials(const MapEval& ev) {
    EulerPotentials out;
    const double p2 = std::norm(ev.P);
    out.chi = p2 / ev.norm2_sum;  // equals 1 exactly at poles (Q = 0)
    const bool at_zero = std::abs(ev.P) < kPoleTolFactor * (1.0 + std::abs(ev.Q));
    out.eta_valid = !ev.pole && !at_zero;
    if (out.eta_valid) out.eta = wrap_turn(std::arg(ev.P * std::conj(ev.Q)) / kTwoPi);
    return out;
}

EulerPotentials euler_potentials(const RationalMap& map, const Point3& p) {
    return euler_potentials(eval_map(map, p));
}

EulerGradients euler_gradients(const MapEval& ev) {
    EulerGradients out;
    const double p2 = std::norm(ev.P);
    const double q2 = std::norm(ev.Q);
    const double s = ev.norm2_sum;
    const Vec3 gp2 = 2.0 * real_herm(ev.P, ev.grad_P);
    const Vec3 gq2 = 2.0 * real_herm(ev.Q, ev.grad_Q);
    out.grad_chi = (q2 * gp2 - p2 * gq2) / (s * s);
    out.eta_valid = p2 > 0.0 && q2 > 0.0;
    if (out.eta_valid) {
        out.grad_eta =
            (imag_herm(ev.P, ev.grad_P) / p2 - imag_herm(ev.Q, ev.grad_Q) / q2) / kTwoPi;
    }
    return out;
}

PotentialSample vecpot_naive(const MapEval& ev) {
    PotentialSample out;
    out.valid = !ev.pole;
    if (out.valid) {
        out.A = imag_herm(ev.psi, ev.grad_psi) / (kTwoPi * (1.0 + std::norm(ev.psi)));
    }
    return out;
}

PotentialSample vecpot_naive(const RationalMap& map, const Point3& p) {
    return vecpot_naive(eval_map(map, p));
}

Vec3 vecpot_smooth(const MapEval& ev, const Point3& p) {
    if (ev.degenerate()) throw_degenerate(p);
    const Vec3 num = imag_herm(ev.P, ev.grad_P) + imag_herm(ev.Q, ev.grad_Q);
    return num / (kTwoPi * ev.norm2_sum);
}

Vec3 vecpot_smooth(const RationalMap& map, const Point3& p) {
    return vecpot_smooth(eval_map(map, p), p);
}

GaugePhase gauge_phase(const MapEval& ev) {
    GaugePhase out;
    out.valid = !ev.pole;
    if (out.valid) out.f = wrap_turn(std::arg(ev.Q) / kTwoPi);
    return out;
}

GaugePhase gauge_phase(const RationalMap& map, const Point3& p) {
    return gauge_phase(eval_map(map, p));
}

double energy_density(const RationalMap& map, const Point3& p) {
    return norm2(bfield(map, p));
}

FieldSample sample_field(const RationalMap& map, const Point3& p) {
    const MapEval ev = eval_map(map, p);
    FieldSample s;
    s.point = p;
    s.B = bfield(ev, p);
    const PotentialSample an = vecpot_naive(ev);
    s.A_naive = an.A;
    s.A_naive_valid = an.valid;
    s.A_smooth = vecpot_smooth(ev, p);
    const EulerPotentials ep = euler_potentials(ev);
    s.chi = ep.chi;
    s.eta = ep.eta;
    s.eta_valid = ep.eta_valid;
    const GaugePhase gp = gauge_phase(ev);
    s.f = gp.f;
    s.f_valid = gp.valid;
    s.energy_density = norm2(s.B);
    return s;
}

double helicity_integrand(const RationalMap& map, const Point3& p) {
    const MapEval ev = eval_map(map, p);
    return dot(vecpot_smooth(ev, p), bfield(ev, p));
}

}  // namespace kf
