#pragma once

#include <array>
#include <optional>
#include <string>

#include "kf/polynomial.hpp"
#include "kf/vec.hpp"

namespace kf {

// Complex coordinates (u,v) on the unit 3-sphere obtained by inverse
// stereographic projection of (x,y,z), together with their analytic gradients.
// |u|^2 + |v|^2 = 1 holds identically.
struct SurfaceCoords {
    Complex u{}, v{};
    CVec3 grad_u{}, grad_v{};
};

SurfaceCoords stereographic(const Point3& p);

struct TorusTuning {
    int alpha = 0, beta = 0, p = 0, q = 0;
};

// Rational map psi = P/Q with the partials of P and Q precomputed so that
// evaluation of gradients needs no symbolic work per point. Immutable.
struct RationalMap {
    ComplexPolynomial P, Q;
    std::array<ComplexPolynomial, 4> dP, dQ;  // partials in (u, ubar, v, vbar)
    std::string label;
    std::optional<TorusTuning> tuning;

    static RationalMap make(ComplexPolynomial P, ComplexPolynomial Q, std::string label = "",
                            std::optional<TorusTuning> tuning = std::nullopt);
};

// |Q| < kPoleTolFactor * (1 + |P|) flags a pole of psi.
inline constexpr double kPoleTolFactor = 1e-13;

struct MapEval {
    Complex P{}, Q{};
    CVec3 grad_P{}, grad_Q{};
    bool pole = false;   // psi/grad_psi are invalid when set
    Complex psi{};
    CVec3 grad_psi{};
    double norm2_sum = 0.0;  // |P|^2 + |Q|^2

    bool degenerate() const;  // P and Q simultaneously (numerically) zero
};

MapEval eval_map(const RationalMap& map, const Point3& p);
// Gradient of a polynomial through the chain rule, given surface coordinates.
CVec3 poly_gradient(const ComplexPolynomial& poly, const std::array<ComplexPolynomial, 4>& partials,
                    const SurfaceCoords& sc);

// Preset catalogue.
//   hopf           psi = u / v
//   torus          psi = u^alpha v^beta / (u^q + v^p), requires tuning parameters
//   trefoil        psi = u^3 / (u^3 + v^2)
//   fig8_a         figure-8 knot, asymmetric form (P = v)
//   fig8_d         figure-8 knot, symmetric form (P = u)
//   cable_23_32    C^{2,3}_{3,2} cable knot
//   unknot_P_only  psi = u (Q = 1), zero total helicity
RationalMap preset(const std::string& name);
RationalMap preset_torus(int alpha, int beta, int p, int q);
const std::array<std::string, 7>& preset_names();

enum class MapPart { P, Q };
RationalMap conjugate_map(const RationalMap& map, MapPart which);

}  // namespace kf
