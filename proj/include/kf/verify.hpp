#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kf/ratmap.hpp"

namespace kf {

struct CheckResult {
    std::string name;
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

struct VerifySpec {
    uint64_t seed = 12345;
    int points = 1000;        // sample count for the per-point identities
    double box_extent = 2.5;  // sampling box half-width
    double fd_step = 1e-4;    // finite-difference step for the 4th-order stencils
};

// Point-wise invariant suite for one map: surface-coordinate identity,
// analytic-vs-finite-difference gradients, the Euler-potential identity,
// divergence-freeness, curl of both vector potentials, gauge-phase identity,
// reciprocal-form consistency, tangency, chi range and decay, potential
// boundedness near the nodal curve, serialization round trips, and the
// linking-integral symmetries. Deterministic for a fixed seed.
std::vector<CheckResult> run_verify(const RationalMap& map, const VerifySpec& spec = {});

bool all_passed(const std::vector<CheckResult>& checks);

}  // namespace kf
