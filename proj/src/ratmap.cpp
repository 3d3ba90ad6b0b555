#include "kf/ratmap.hpp"

#include <numeric>
#include <stdexcept>

namespace kf {

SurfaceCoords stereographic(const Point3& p) {
    const double r2 = p.r2();
    const double d = 1.0 + r2;
    const double inv = 1.0 / d;
    const double inv2 = inv * inv;

    SurfaceCoords sc;
    sc.u = Complex(2.0 * p.x, 2.0 * p.y) * inv;
    sc.v = Complex(2.0 * p.z, r2 - 1.0) * inv;

    // d/dx of 2(x+iy)/(1+r^2) etc.; gradients of the denominator give the
    // -2*coord/(1+r^2)^2 terms.
    const Complex num_u(2.0 * p.x, 2.0 * p.y);
    sc.grad_u.x = Complex(2.0, 0.0) * inv - num_u * (2.0 * p.x * inv2);
    sc.grad_u.y = Complex(0.0, 2.0) * inv - num_u * (2.0 * p.y * inv2);
    sc.grad_u.z = -num_u * (2.0 * p.z * inv2);

    const Complex num_v(2.0 * p.z, r2 - 1.0);
    sc.grad_v.x = Complex(0.0, 2.0 * p.x) * inv - num_v * (2.0 * p.x * inv2);
    sc.grad_v.y = Complex(0.0, 2.0 * p.y) * inv - num_v * (2.0 * p.y * inv2);
    sc.grad_v.z = Complex(2.0, 2.0 * p.z) * inv - num_v * (2.0 * p.z * inv2);
    return sc;
}

RationalMap RationalMap::make(ComplexPolynomial P, ComplexPolynomial Q, std::string label,
                              std::optional<TorusTuning> tuning) {
    if (Q.is_zero()) throw std::invalid_argument("ratmap: Q is the zero polynomial");
    RationalMap m;
    m.P = std::move(P);
    m.Q = std::move(Q);
    for (int i = 0; i < 4; ++i) {
        m.dP[i] = m.P.partial(static_cast<Var>(i));
        m.dQ[i] = m.Q.partial(static_cast<Var>(i));
    }
    m.label = std::move(label);
    m.tuning = tuning;
    return m;
}

CVec3 poly_gradient(const ComplexPolynomial& poly,
                    const std::array<ComplexPolynomial, 4>& partials, const SurfaceCoords& sc) {
    (void)poly;
    // grad ubar = conj(grad u) componentwise, same for vbar.
    const CVec3 grads[4] = {sc.grad_u, conj(sc.grad_u), sc.grad_v, conj(sc.grad_v)};
    CVec3 g;
    for (int i = 0; i < 4; ++i) {
        if (partials[i].is_zero()) continue;
        g += poly_eval(partials[i], sc) * grads[i];
    }
    return g;
}

bool MapEval::degenerate() const {
    return std::abs(P) < 1e-12 && std::abs(Q) < 1e-12;
}

MapEval eval_map(const RationalMap& map, const Point3& p) {
    const SurfaceCoords sc = stereographic(p);
    MapEval ev;
    ev.P = poly_eval(map.P, sc);
    ev.Q = poly_eval(map.Q, sc);
    ev.grad_P = poly_gradient(map.P, map.dP, sc);
    ev.grad_Q = poly_gradient(map.Q, map.dQ, sc);
    const double aP = std::abs(ev.P);
    const double aQ = std::abs(ev.Q);
    ev.norm2_sum = aP * aP + aQ * aQ;
    ev.pole = aQ < kPoleTolFactor * (1.0 + aP);
    if (!ev.pole) {
        ev.psi = ev.P / ev.Q;
        const Complex invQ2 = 1.0 / (ev.Q * ev.Q);
        ev.grad_psi = (ev.Q * ev.grad_P - ev.P * ev.grad_Q) * invQ2;
    }
    return ev;
}

namespace {

ComplexPolynomial parse_terms(std::initializer_list<PolyTerm> ts) {
    return ComplexPolynomial(std::vector<PolyTerm>(ts));
}

}  // namespace

RationalMap preset_torus(int alpha, int beta, int p, int q) {
    if (p < 1 || q < 1)
        throw std::invalid_argument("ratmap: torus preset requires p,q >= 1");
    if (std::gcd(p, q) != 1)
        throw std::invalid_argument("ratmap: torus preset requires coprime (p,q), got gcd(" +
                                    std::to_string(p) + "," + std::to_string(q) + ") != 1");
    if (alpha < 0 || beta < 0 || (alpha == 0 && beta == 0))
        throw std::invalid_argument(
            "ratmap: torus preset requires alpha,beta >= 0 and not both zero");
    auto P = ComplexPolynomial::monomial(1.0, alpha, 0, beta, 0);
    auto Q = parse_terms({PolyTerm{1.0, {q, 0, 0, 0}}, PolyTerm{1.0, {0, 0, p, 0}}});
    return RationalMap::make(std::move(P), std::move(Q),
                             "torus(alpha=" + std::to_string(alpha) + ",beta=" + std::to_string(beta) +
                                 ",p=" + std::to_string(p) + ",q=" + std::to_string(q) + ")",
                             TorusTuning{alpha, beta, p, q});
}

const std::array<std::string, 7>& preset_names() {
    static const std::array<std::string, 7> names = {
        "hopf", "torus", "trefoil", "fig8_a", "fig8_d", "cable_23_32", "unknot_P_only"};
    return names;
}

RationalMap preset(const std::string& name) {
    if (name == "hopf") {
        return RationalMap::make(ComplexPolynomial::monomial(1.0, 1, 0, 0, 0),
                                 ComplexPolynomial::monomial(1.0, 0, 0, 1, 0), "hopf");
    }
    if (name == "trefoil") {
        return RationalMap::make(
            ComplexPolynomial::monomial(1.0, 3, 0, 0, 0),
            parse_terms({PolyTerm{1.0, {3, 0, 0, 0}}, PolyTerm{1.0, {0, 0, 2, 0}}}), "trefoil",
            TorusTuning{3, 0, 2, 3});
    }
    if (name == "fig8_a") {
        // P = v, Q = 64 u^3 - 12 u (3 - 2 v^2 + 2 vbar^2) + 14 v^2 + 14 vbar^2 - v^4 + vbar^4
        auto Q = parse_terms({
            PolyTerm{64.0, {3, 0, 0, 0}},
            PolyTerm{-36.0, {1, 0, 0, 0}},
            PolyTerm{24.0, {1, 0, 2, 0}},
            PolyTerm{-24.0, {1, 0, 0, 2}},
            PolyTerm{14.0, {0, 0, 2, 0}},
            PolyTerm{14.0, {0, 0, 0, 2}},
            PolyTerm{-1.0, {0, 0, 4, 0}},
            PolyTerm{1.0, {0, 0, 0, 4}},
        });
        return RationalMap::make(ComplexPolynomial::monomial(1.0, 0, 0, 1, 0), std::move(Q),
                                 "fig8_a");
    }
    if (name == "fig8_d") {
        // P = u, Q = 64 v^3 - 12 v (3 + 2 u^2 - 2 ubar^2) - (14 u^2 + 14 ubar^2 + u^4 - ubar^4)
        auto Q = parse_terms({
            PolyTerm{64.0, {0, 0, 3, 0}},
            PolyTerm{-36.0, {0, 0, 1, 0}},
            PolyTerm{-24.0, {2, 0, 1, 0}},
            PolyTerm{24.0, {0, 2, 1, 0}},
            PolyTerm{-14.0, {2, 0, 0, 0}},
            PolyTerm{-14.0, {0, 2, 0, 0}},
            PolyTerm{-1.0, {4, 0, 0, 0}},
            PolyTerm{1.0, {0, 4, 0, 0}},
        });
        return RationalMap::make(ComplexPolynomial::monomial(1.0, 1, 0, 0, 0), std::move(Q),
                                 "fig8_d");
    }
    if (name == "cable_23_32") {
        // P = u v, Q = v^4 - 2 u^3 v^2 - 2i u^3 v + u^6 + (1/4) u^3
        auto Q = parse_terms({
            PolyTerm{1.0, {0, 0, 4, 0}},
            PolyTerm{-2.0, {3, 0, 2, 0}},
            PolyTerm{Complex(0.0, -2.0), {3, 0, 1, 0}},
            PolyTerm{1.0, {6, 0, 0, 0}},
            PolyTerm{0.25, {3, 0, 0, 0}},
        });
        return RationalMap::make(ComplexPolynomial::monomial(1.0, 1, 0, 1, 0), std::move(Q),
                                 "cable_23_32");
    }
    if (name == "unknot_P_only") {
        return RationalMap::make(ComplexPolynomial::monomial(1.0, 1, 0, 0, 0),
                                 ComplexPolynomial::constant(1.0), "unknot_P_only");
    }
    if (name == "torus") {
        throw std::invalid_argument("ratmap: preset 'torus' requires (alpha,beta,p,q) parameters");
    }
    throw std::invalid_argument("ratmap: unknown preset '" + name + "'");
}

RationalMap conjugate_map(const RationalMap& map, MapPart which) {
    ComplexPolynomial P = map.P;
    ComplexPolynomial Q = map.Q;
    if (which == MapPart::P)
        P = P.conjugated();
    else
        Q = Q.conjugated();
    std::string label = map.label + (which == MapPart::P ? "|conjP" : "|conjQ");
    return RationalMap::make(std::move(P), std::move(Q), std::move(label), map.tuning);
}

}  // namespace kf
