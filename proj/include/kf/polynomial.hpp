#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kf/vec.hpp"

namespace kf {

// Formal variables of the polynomial ring: u, conj(u), v, conj(v) are treated
// as four independent variables (Wirtinger-style).
enum class Var : int { u = 0, ubar = 1, v = 2, vbar = 3 };

struct PolyTerm {
    Complex coeff{};
    int e[4] = {0, 0, 0, 0};  // exponents of (u, ubar, v, vbar)
};

// Sparse multivariate polynomial in (u, ubar, v, vbar) with complex
// coefficients. Canonical form: no zero coefficients, no repeated exponent
// tuples, terms sorted lexicographically on the exponent tuple.
class ComplexPolynomial {
  public:
    ComplexPolynomial() = default;
    explicit ComplexPolynomial(std::vector<PolyTerm> terms) { assign(std::move(terms)); }

    static ComplexPolynomial constant(Complex c);
    static ComplexPolynomial monomial(Complex c, int eu, int eub, int ev, int evb);

    const std::vector<PolyTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;

    int max_exponent(Var var) const;
    // Highest power of v present (0 for polynomials without v).
    int deg_v() const { return max_exponent(Var::v); }
    bool depends_on(Var var) const { return max_exponent(var) > 0; }

    Complex eval(Complex u, Complex v) const;
    // Evaluation with all four formal variables independent (ubar, vbar not
    // tied to conjugates); used by derivative checks.
    Complex eval_free(Complex u, Complex ubar, Complex v, Complex vbar) const;

    // Exact formal partial derivative with respect to one of the four variables.
    ComplexPolynomial partial(Var var) const;

    // Conjugate every coefficient and swap u<->ubar, v<->vbar exponents.
    ComplexPolynomial conjugated() const;

    // Rough magnitude scale of the coefficients (sum of |coeff|); used for
    // relative tolerances downstream.
    double coeff_scale() const;

    // Text format: one term per line, "re im e_u e_ubar e_v e_vbar",
    // '#' starts a comment. Output is deterministic (canonical term order).
    std::string to_text() const;
    static ComplexPolynomial parse_text(const std::string& text);

    bool operator==(const ComplexPolynomial& o) const;

  private:
    void assign(std::vector<PolyTerm> terms);
    std::vector<PolyTerm> terms_;
};

struct SurfaceCoords;  // ratmap.hpp

// Spec-level evaluation entry point (sum of coeff * u^eu * ubar^eub * v^ev * vbar^evb).
Complex poly_eval(const ComplexPolynomial& poly, const SurfaceCoords& coords);
inline ComplexPolynomial poly_partial(const ComplexPolynomial& poly, Var var) {
    return poly.partial(var);
}

}  // namespace kf
