#pragma once

#include "kf/curve.hpp"
#include "kf/ratmap.hpp"
#include "kf/trace.hpp"

namespace kf {

struct LinkingResult {
    double raw = 0.0;
    long long value = 0;  // nearest integer; |raw - value| <= 0.05 is enforced
};

// Discretized Gauss double integral over all segment pairs of two closed,
// disjoint polylines. Requires minimum distance > 10x the longest segment.
LinkingResult gauss_linking(const Curve& c1, const Curve& c2);

struct HopfInvariantResult {
    long long value = 0;
    double raw = 0.0;
    int components_c1 = 0;
    int components_c2 = 0;
    Complex c1{}, c2{};  // the regular values actually used
};

// Default regular values for the preimage-linking computation. Chosen off
// the real axis and at distinct moduli; critical values of the presets
// (e.g. psi = 1 for the torus family, where P - Q degenerates) are avoided.
inline constexpr Complex kDefaultLevel1 = Complex(0.92106099400288508, 0.38941834230865050);  // exp(0.4i)
inline constexpr Complex kDefaultLevel2 = Complex(1.0, 1.7320508075688772);                   // 2 exp(i pi/3)

// Hopf invariant as the total linking between the preimages of two regular
// values: all components of psi = c1 against all components of psi = c2,
// each oriented along B. If tracing fails for a value, the value is nudged
// (a few retries) before giving up.
HopfInvariantResult hopf_invariant_linking(const RationalMap& map, Complex c1 = kDefaultLevel1,
                                           Complex c2 = kDefaultLevel2,
                                           const NodalScanSpec& scan = {},
                                           const TraceParams& params = {});

}  // namespace kf
