#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kf/grid.hpp"
#include "kf/helicity.hpp"
#include "kf/linking.hpp"
#include "kf/quadrature.hpp"
#include "kf/ratmap.hpp"
#include "kf/trace.hpp"
#include "kf/verify.hpp"

namespace kf {

// One job per process. All keys are flat "section.key" strings; the CLI
// mirrors them as --section.key=value. Unknown keys are hard errors.
struct JobConfig {
    std::string action;

    // map source: either a preset name (plus torus/conjugate options) or
    // inline polynomial text (';' separates terms of "re im eu eub ev evb").
    std::string map_preset;
    int map_alpha = 0, map_beta = 0, map_p = 0, map_q = 0;
    std::string map_conjugate = "none";  // none | P | Q
    std::string map_P_inline, map_Q_inline;

    std::string out_dir = "out";
    std::string out_format;  // per-action default when empty
    int threads = 0;
    uint64_t seed = 12345;

    QuadratureSpec quad;
    double chi0 = 0.5;
    bool helicity_linking = false;
    Complex link_c1 = kDefaultLevel1;
    Complex link_c2 = kDefaultLevel2;

    Box3 grid_bounds;
    GridDims grid_dims{64, 64, 64};
    std::string grid_quantity = "chi";

    double surface_level = 0.5;
    std::string surface_quantity = "chi";

    Point3 trace_seed{0.5, 0.0, 0.0};
    TraceParams trace;
    Complex level_c{1.0, 0.0};

    std::string nodal_which = "Q";
    NodalScanSpec nodal;

    double energy_radius = 20.0;
    int verify_points = 1000;

    CrossSectionSpec flux;

    // resolved key/value echo for the manifest, in sorted key order
    std::vector<std::pair<std::string, std::string>> echo;

    RationalMap build_map() const;
};

// Parse flat key=value text ('#' comments). Duplicate keys within one source
// are errors; later sources (CLI flags) override earlier ones (config file).
std::map<std::string, std::string> parse_kv_text(const std::string& text);

JobConfig make_config(const std::map<std::string, std::string>& kv);

// argv: [config-file] [--key=value ...]
JobConfig parse_cli(int argc, const char* const* argv);

std::string usage_text();

}  // namespace kf
