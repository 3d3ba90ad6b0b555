#pragma once

#include <optional>

#include "kf/curve.hpp"
#include "kf/field.hpp"
#include "kf/quadrature.hpp"
#include "kf/ratmap.hpp"

namespace kf {

enum class HelicityMethod { volume_quadrature, preimage_linking };

struct HelicityResult {
    double value = 0.0;
    double error_estimate = 0.0;
    HelicityMethod method = HelicityMethod::volume_quadrature;
    bool converged = true;
    std::vector<std::pair<int, double>> convergence;  // (resolution, value)
};

// H = integral of A_smooth . B over all of 3-space (compactified quadrature).
HelicityResult helicity_volume(const RationalMap& map, const QuadratureSpec& spec = {});

// Closed-form helicity: alpha*p + beta*q for the torus family (tuning
// present), alpha * deg_v(Q) for maps P = c u^alpha with Q free of vbar.
// Returns nullopt when neither template applies.
std::optional<long long> helicity_formula(const RationalMap& map);

// Helicity restricted to the flux tube chi > chi0 (sharp indicator).
HelicityResult fluxtube_helicity(const RationalMap& map, double chi0,
                                 const QuadratureSpec& spec = {});

struct CrossSectionSpec {
    double step = 5e-3;         // in-plane boundary tracer step
    double closure_tol = 1e-6;
    double max_extent = 3.0;    // search radius for the chi0 crossing
    double max_loop_len = 64.0;
    int resample = 4096;        // boundary polygon size for the line integral
    int max_steps = 400000;
};

// Flux of B through a cross-section of the tube chi > chi0: the section is
// cut in the plane normal to the traced Q = 0 core curve and bounded by the
// in-plane chi = chi0 level loop; the flux is evaluated as the loop integral
// of the smooth vector potential (Stokes), oriented along B.
double fluxtube_flux(const RationalMap& map, double chi0, const Curve& core,
                     const CrossSectionSpec& spec = {});
// Convenience overload that traces the Q = 0 nodal curve itself.
double fluxtube_flux(const RationalMap& map, double chi0, const CrossSectionSpec& spec = {});

// Total field energy in the ball |x| < radius.
QuadratureResult total_energy(const RationalMap& map, double radius,
                              const QuadratureSpec& spec = {});

// Least-squares slope of log max_{|x|=r} |B|^2 versus log r, sampled over
// n_r log-spaced radii and a deterministic direction set.
double energy_decay_slope(const RationalMap& map, double r_lo, double r_hi, int n_r = 8,
                          int n_dirs = 256);

}  // namespace kf
