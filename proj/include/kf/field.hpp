#pragma once

#include "kf/ratmap.hpp"
#include "kf/vec.hpp"

namespace kf {

// All quantities derived from a rational map at one point of 3-space.
// Validity flags mark quantities undefined on the zero/pole sets; nothing
// here aborts except at points where P and Q vanish simultaneously.
struct FieldSample {
    Point3 point{};
    Vec3 B{};
    Vec3 A_naive{};
    bool A_naive_valid = false;
    Vec3 A_smooth{};
    double chi = 0.0;
    double eta = 0.0;
    bool eta_valid = false;
    double f = 0.0;
    bool f_valid = false;
    double energy_density = 0.0;
};

struct EulerPotentials {
    double chi = 0.0;
    double eta = 0.0;  // arg(psi) in turns, [0,1)
    bool eta_valid = false;
};

struct PotentialSample {
    Vec3 A{};
    bool valid = false;
};

struct GaugePhase {
    double f = 0.0;  // arg(Q) in turns, [0,1)
    bool valid = false;
};

enum class BForm { direct, reciprocal };

// Tangent field of the level curves of psi, normalized so its helicity equals
// the Hopf invariant. Direct form evaluates in psi; the reciprocal form swaps
// the roles of P and Q (the expression is invariant under psi -> 1/psi) and
// stays finite across poles.
Vec3 bfield(const RationalMap& map, const Point3& p);
Vec3 bfield(const MapEval& ev, const Point3& p);
Vec3 bfield_form(const RationalMap& map, const Point3& p, BForm form);

EulerPotentials euler_potentials(const RationalMap& map, const Point3& p);
EulerPotentials euler_potentials(const MapEval& ev);

// Analytic gradients of chi and eta (chain rule through P,Q); eta gradient is
// invalid on the zero and pole sets.
struct EulerGradients {
    Vec3 grad_chi{};
    Vec3 grad_eta{};
    bool eta_valid = false;
};
EulerGradients euler_gradients(const MapEval& ev);

PotentialSample vecpot_naive(const RationalMap& map, const Point3& p);
PotentialSample vecpot_naive(const MapEval& ev);

Vec3 vecpot_smooth(const RationalMap& map, const Point3& p);
Vec3 vecpot_smooth(const MapEval& ev, const Point3& p);

GaugePhase gauge_phase(const RationalMap& map, const Point3& p);
GaugePhase gauge_phase(const MapEval& ev);

double energy_density(const RationalMap& map, const Point3& p);

FieldSample sample_field(const RationalMap& map, const Point3& p);

// Fused integrand dot(A_smooth, B) used by the helicity quadrature (one map
// evaluation per point).
double helicity_integrand(const RationalMap& map, const Point3& p);

// Wrap a real into [0,1) turns.
double wrap_turn(double t);
// Signed circle-metric difference a-b in turns, in (-0.5, 0.5].
double turn_diff(double a, double b);

}  // namespace kf
