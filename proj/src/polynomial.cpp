#include "kf/polynomial.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "kf/ratmap.hpp"

namespace kf {

namespace {

bool exp_less(const PolyTerm& a, const PolyTerm& b) {
    for (int i = 0; i < 4; ++i) {
        if (a.e[i] != b.e[i]) return a.e[i] < b.e[i];
    }
    return false;
}

bool exp_equal(const PolyTerm& a, const PolyTerm& b) {
    return a.e[0] == b.e[0] && a.e[1] == b.e[1] && a.e[2] == b.e[2] && a.e[3] == b.e[3];
}

}  // namespace

void ComplexPolynomial::assign(std::vector<PolyTerm> terms) {
    for (const PolyTerm& t : terms) {
        for (int i = 0; i < 4; ++i) {
            if (t.e[i] < 0) throw std::invalid_argument("polynomial: negative exponent");
        }
    }
    std::sort(terms.begin(), terms.end(), exp_less);
    terms_.clear();
    for (const PolyTerm& t : terms) {
        if (!terms_.empty() && exp_equal(terms_.back(), t)) {
            terms_.back().coeff += t.coeff;
        } else {
            terms_.push_back(t);
        }
    }
    std::erase_if(terms_, [](const PolyTerm& t) { return t.coeff == Complex(0.0, 0.0); });
}

ComplexPolynomial ComplexPolynomial::constant(Complex c) {
    return ComplexPolynomial({PolyTerm{c, {0, 0, 0, 0}}});
}

ComplexPolynomial ComplexPolynomial::monomial(Complex c, int eu, int eub, int ev, int evb) {
    return ComplexPolynomial({PolyTerm{c, {eu, eub, ev, evb}}});
}

bool ComplexPolynomial::is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && terms_[0].e[0] == 0 && terms_[0].e[1] == 0 &&
            terms_[0].e[2] == 0 && terms_[0].e[3] == 0);
}

int ComplexPolynomial::max_exponent(Var var) const {
    int m = 0;
    for (const PolyTerm& t : terms_) m = std::max(m, t.e[static_cast<int>(var)]);
    return m;
}

Complex ComplexPolynomial::eval(Complex u, Complex v) const {
    return eval_free(u, std::conj(u), v, std::conj(v));
}

Complex ComplexPolynomial::eval_free(Complex u, Complex ubar, Complex v, Complex vbar) const {
    // Power tables keep evaluation O(degree + terms); preset degrees are <= 6.
    const Complex vals[4] = {u, ubar, v, vbar};
    std::array<std::vector<Complex>, 4> pow;
    for (int i = 0; i < 4; ++i) {
        int m = max_exponent(static_cast<Var>(i));
        pow[i].resize(m + 1);
        pow[i][0] = Complex(1.0, 0.0);
        for (int k = 1; k <= m; ++k) pow[i][k] = pow[i][k - 1] * vals[i];
    }
    Complex sum(0.0, 0.0);
    for (const PolyTerm& t : terms_) {
        sum += t.coeff * pow[0][t.e[0]] * pow[1][t.e[1]] * pow[2][t.e[2]] * pow[3][t.e[3]];
    }
    return sum;
}

ComplexPolynomial ComplexPolynomial::partial(Var var) const {
    const int iv = static_cast<int>(var);
    std::vector<PolyTerm> out;
    for (const PolyTerm& t : terms_) {
        if (t.e[iv] == 0) continue;
        PolyTerm d = t;
        d.coeff *= static_cast<double>(t.e[iv]);
        d.e[iv] -= 1;
        out.push_back(d);
    }
    return ComplexPolynomial(std::move(out));
}

ComplexPolynomial ComplexPolynomial::conjugated() const {
    std::vector<PolyTerm> out;
    for (const PolyTerm& t : terms_) {
        PolyTerm c;
        c.coeff = std::conj(t.coeff);
        c.e[0] = t.e[1];
        c.e[1] = t.e[0];
        c.e[2] = t.e[3];
        c.e[3] = t.e[2];
        out.push_back(c);
    }
    return ComplexPolynomial(std::move(out));
}

double ComplexPolynomial::coeff_scale() const {
    double s = 0.0;
    for (const PolyTerm& t : terms_) s += std::abs(t.coeff);
    return s;
}

std::string ComplexPolynomial::to_text() const {
    std::string out;
    char buf[160];
    for (const PolyTerm& t : terms_) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %d %d %d %d\n", t.coeff.real(),
                      t.coeff.imag(), t.e[0], t.e[1], t.e[2], t.e[3]);
        out += buf;
    }
    return out;
}

ComplexPolynomial ComplexPolynomial::parse_text(const std::string& text) {
    std::vector<PolyTerm> terms;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double re, im;
        int e[4];
        if (!(ls >> re)) continue;  // blank or comment-only line
        if (!(ls >> im >> e[0] >> e[1] >> e[2] >> e[3])) {
            throw std::runtime_error("polynomial: malformed term on line " +
                                     std::to_string(lineno) + ": '" + line + "'");
        }
        std::string extra;
        if (ls >> extra) {
            throw std::runtime_error("polynomial: trailing tokens on line " +
                                     std::to_string(lineno) + ": '" + extra + "'");
        }
        if (e[0] < 0 || e[1] < 0 || e[2] < 0 || e[3] < 0) {
            throw std::runtime_error("polynomial: negative exponent on line " +
                                     std::to_string(lineno));
        }
        terms.push_back(PolyTerm{Complex(re, im), {e[0], e[1], e[2], e[3]}});
    }
    return ComplexPolynomial(std::move(terms));
}

bool ComplexPolynomial::operator==(const ComplexPolynomial& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    for (size_t i = 0; i < terms_.size(); ++i) {
        if (!exp_equal(terms_[i], o.terms_[i]) || terms_[i].coeff != o.terms_[i].coeff)
            return false;
    }
    return true;
}

Complex poly_eval(const ComplexPolynomial& poly, const SurfaceCoords& coords) {
    return poly.eval(coords.u, coords.v);
}

}  // namespace kf
