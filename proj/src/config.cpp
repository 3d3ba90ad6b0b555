#include "kf/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kf {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "action",
        "map.preset", "map.alpha", "map.beta", "map.p", "map.q", "map.conjugate",
        "map.P", "map.Q",
        "out", "out.format", "threads", "seed",
        "quad.radial", "quad.polar", "quad.azimuth", "quad.r0", "quad.levels", "quad.tol",
        "chi0", "helicity.linking", "link.c1", "link.c2",
        "grid.dims", "grid.extent", "grid.bounds", "grid.quantity",
        "surface.level", "surface.quantity",
        "trace.seed", "trace.step", "trace.tol", "trace.ctol", "trace.max_steps",
        "trace.closure_tol", "trace.max_arc",
        "level.c",
        "nodal.which", "nodal.lattice", "nodal.extent",
        "energy.radius", "verify.points",
        "flux.step", "flux.resample", "flux.max_extent",
    };
    return keys;
}

const std::set<std::string>& known_actions() {
    static const std::set<std::string> actions = {
        "sample", "helicity", "fluxtube", "trace", "level-curve",
        "nodal",  "surface",  "energy",   "verify"};
    return actions;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("config: " + msg); }

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (...) {
        fail("key '" + key + "' expects a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return i;
    } catch (...) {
        fail("key '" + key + "' expects an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail("key '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v, size_t n) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.size() != n)
        fail("key '" + key + "' expects " + std::to_string(n) + " comma-separated numbers");
    return out;
}

ComplexPolynomial parse_inline_poly(const std::string& key, const std::string& v) {
    std::string text = v;
    std::replace(text.begin(), text.end(), ';', '\n');
    try {
        return ComplexPolynomial::parse_text(text);
    } catch (const std::exception& e) {
        fail("key '" + key + "': " + e.what());
    }
}

}  // namespace

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail("line " + std::to_string(lineno) + " is not key=value: '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail("empty key on line " + std::to_string(lineno));
        if (kv.count(key)) fail("duplicate key '" + key + "' on line " + std::to_string(lineno));
        kv[key] = value;
    }
    return kv;
}

JobConfig make_config(const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) {
        (void)v;
        if (!known_keys().count(k)) fail("unknown key '" + k + "'");
    }
    auto get = [&](const char* key, const std::string& def) {
        auto it = kv.find(key);
        return it == kv.end() ? def : it->second;
    };
    auto has = [&](const char* key) { return kv.count(key) != 0; };

    JobConfig cfg;
    cfg.action = get("action", "");
    if (cfg.action.empty()) fail("missing required key 'action'");
    if (!known_actions().count(cfg.action)) fail("unknown action '" + cfg.action + "'");

    cfg.map_preset = get("map.preset", "");
    cfg.map_alpha = static_cast<int>(to_int("map.alpha", get("map.alpha", "0")));
    cfg.map_beta = static_cast<int>(to_int("map.beta", get("map.beta", "0")));
    cfg.map_p = static_cast<int>(to_int("map.p", get("map.p", "0")));
    cfg.map_q = static_cast<int>(to_int("map.q", get("map.q", "0")));
    cfg.map_conjugate = get("map.conjugate", "none");
    if (cfg.map_conjugate != "none" && cfg.map_conjugate != "P" && cfg.map_conjugate != "Q")
        fail("key 'map.conjugate' expects none|P|Q");
    cfg.map_P_inline = get("map.P", "");
    cfg.map_Q_inline = get("map.Q", "");
    if (cfg.map_preset.empty() && (cfg.map_P_inline.empty() || cfg.map_Q_inline.empty()))
        fail("map source required: map.preset, or both map.P and map.Q");
    if (!cfg.map_preset.empty() && (!cfg.map_P_inline.empty() || !cfg.map_Q_inline.empty()))
        fail("map.preset and inline map.P/map.Q are mutually exclusive");

    cfg.out_dir = get("out", "out");
    cfg.out_format = get("out.format", "");
    cfg.threads = static_cast<int>(to_int("threads", get("threads", "0")));
    cfg.seed = static_cast<uint64_t>(to_int("seed", get("seed", "12345")));

    cfg.quad.radial = static_cast<int>(to_int("quad.radial", get("quad.radial", "24")));
    cfg.quad.polar = static_cast<int>(to_int("quad.polar", get("quad.polar", "24")));
    cfg.quad.azimuth = static_cast<int>(to_int("quad.azimuth", get("quad.azimuth", "32")));
    cfg.quad.r0 = to_double("quad.r0", get("quad.r0", "2"));
    cfg.quad.levels = static_cast<int>(to_int("quad.levels", get("quad.levels", "3")));
    cfg.quad.tol = to_double("quad.tol", get("quad.tol", "5e-3"));

    cfg.chi0 = to_double("chi0", get("chi0", "0.5"));
    cfg.helicity_linking = to_bool("helicity.linking", get("helicity.linking", "false"));
    {
        const auto c1 = to_doubles("link.c1", get("link.c1", "0.92106099400288508,0.3894183423086505"), 2);
        const auto c2 = to_doubles("link.c2", get("link.c2", "1,1.7320508075688772"), 2);
        cfg.link_c1 = Complex(c1[0], c1[1]);
        cfg.link_c2 = Complex(c2[0], c2[1]);
    }

    if (has("grid.bounds")) {
        const auto b = to_doubles("grid.bounds", kv.at("grid.bounds"), 6);
        cfg.grid_bounds = Box3{{b[0], b[1], b[2]}, {b[3], b[4], b[5]}};
    } else {
        const double e = to_double("grid.extent", get("grid.extent", "3"));
        cfg.grid_bounds = Box3{{-e, -e, -e}, {e, e, e}};
    }
    {
        const std::string dims = get("grid.dims", "64");
        std::stringstream ss(dims);
        std::string item;
        std::vector<long long> v;
        while (std::getline(ss, item, ',')) v.push_back(to_int("grid.dims", trim(item)));
        if (v.size() == 1) {
            cfg.grid_dims = GridDims{static_cast<int>(v[0]), static_cast<int>(v[0]),
                                     static_cast<int>(v[0])};
        } else if (v.size() == 3) {
            cfg.grid_dims =
                GridDims{static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
        } else {
            fail("key 'grid.dims' expects one or three integers");
        }
    }
    cfg.grid_quantity = get("grid.quantity", "chi");
    cfg.surface_level = to_double("surface.level", get("surface.level", "0.5"));
    cfg.surface_quantity = get("surface.quantity", "chi");

    {
        const auto s = to_doubles("trace.seed", get("trace.seed", "0.5,0,0"), 3);
        cfg.trace_seed = Point3{s[0], s[1], s[2]};
    }
    cfg.trace.initial_step = to_double("trace.step", get("trace.step", "0.01"));
    cfg.trace.step_tol = to_double("trace.tol", get("trace.tol", "1e-8"));
    cfg.trace.corrector_tol = to_double("trace.ctol", get("trace.ctol", "1e-9"));
    cfg.trace.max_steps = static_cast<int>(to_int("trace.max_steps", get("trace.max_steps", "200000")));
    cfg.trace.closure_tol = to_double("trace.closure_tol", get("trace.closure_tol", "1e-4"));
    cfg.trace.max_arc = to_double("trace.max_arc", get("trace.max_arc", "400"));

    {
        const auto c = to_doubles("level.c", get("level.c", "1,0"), 2);
        cfg.level_c = Complex(c[0], c[1]);
    }

    cfg.nodal_which = get("nodal.which", "Q");
    if (cfg.nodal_which != "P" && cfg.nodal_which != "Q")
        fail("key 'nodal.which' expects P|Q");
    cfg.nodal.lattice = static_cast<int>(to_int("nodal.lattice", get("nodal.lattice", "48")));
    cfg.nodal.extent = to_double("nodal.extent", get("nodal.extent", "3"));

    cfg.energy_radius = to_double("energy.radius", get("energy.radius", "20"));
    cfg.verify_points = static_cast<int>(to_int("verify.points", get("verify.points", "1000")));

    cfg.flux.step = to_double("flux.step", get("flux.step", "5e-3"));
    cfg.flux.resample = static_cast<int>(to_int("flux.resample", get("flux.resample", "4096")));
    cfg.flux.max_extent = to_double("flux.max_extent", get("flux.max_extent", "3"));

    // resolved echo: every known key with its effective value
    std::map<std::string, std::string> resolved;
    for (const std::string& k : known_keys()) resolved[k] = "";
    char buf[64];
    auto put = [&](const std::string& k, const std::string& v) { resolved[k] = v; };
    auto putd = [&](const std::string& k, double v) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        resolved[k] = buf;
    };
    auto puti = [&](const std::string& k, long long v) { resolved[k] = std::to_string(v); };
    put("action", cfg.action);
    put("map.preset", cfg.map_preset);
    puti("map.alpha", cfg.map_alpha);
    puti("map.beta", cfg.map_beta);
    puti("map.p", cfg.map_p);
    puti("map.q", cfg.map_q);
    put("map.conjugate", cfg.map_conjugate);
    put("map.P", cfg.map_P_inline);
    put("map.Q", cfg.map_Q_inline);
    put("out", cfg.out_dir);
    put("out.format", cfg.out_format);
    puti("threads", cfg.threads);
    puti("seed", static_cast<long long>(cfg.seed));
    puti("quad.radial", cfg.quad.radial);
    puti("quad.polar", cfg.quad.polar);
    puti("quad.azimuth", cfg.quad.azimuth);
    putd("quad.r0", cfg.quad.r0);
    puti("quad.levels", cfg.quad.levels);
    putd("quad.tol", cfg.quad.tol);
    putd("chi0", cfg.chi0);
    put("helicity.linking", cfg.helicity_linking ? "true" : "false");
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g", cfg.link_c1.real(), cfg.link_c1.imag());
    put("link.c1", buf);
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g", cfg.link_c2.real(), cfg.link_c2.imag());
    put("link.c2", buf);
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g", cfg.grid_bounds.lo.x,
                  cfg.grid_bounds.lo.y, cfg.grid_bounds.lo.z, cfg.grid_bounds.hi.x,
                  cfg.grid_bounds.hi.y, cfg.grid_bounds.hi.z);
    put("grid.bounds", buf);
    put("grid.extent", "");
    std::snprintf(buf, sizeof(buf), "%d,%d,%d", cfg.grid_dims.nx, cfg.grid_dims.ny,
                  cfg.grid_dims.nz);
    put("grid.dims", buf);
    put("grid.quantity", cfg.grid_quantity);
    putd("surface.level", cfg.surface_level);
    put("surface.quantity", cfg.surface_quantity);
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g", cfg.trace_seed.x, cfg.trace_seed.y,
                  cfg.trace_seed.z);
    put("trace.seed", buf);
    putd("trace.step", cfg.trace.initial_step);
    putd("trace.tol", cfg.trace.step_tol);
    putd("trace.ctol", cfg.trace.corrector_tol);
    puti("trace.max_steps", cfg.trace.max_steps);
    putd("trace.closure_tol", cfg.trace.closure_tol);
    putd("trace.max_arc", cfg.trace.max_arc);
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g", cfg.level_c.real(), cfg.level_c.imag());
    put("level.c", buf);
    put("nodal.which", cfg.nodal_which);
    puti("nodal.lattice", cfg.nodal.lattice);
    putd("nodal.extent", cfg.nodal.extent);
    putd("energy.radius", cfg.energy_radius);
    puti("verify.points", cfg.verify_points);
    putd("flux.step", cfg.flux.step);
    puti("flux.resample", cfg.flux.resample);
    putd("flux.max_extent", cfg.flux.max_extent);

    cfg.echo.assign(resolved.begin(), resolved.end());
    return cfg;
}

RationalMap JobConfig::build_map() const {
    RationalMap m = [&]() {
        if (!map_preset.empty()) {
            if (map_preset == "torus") return preset_torus(map_alpha, map_beta, map_p, map_q);
            return preset(map_preset);
        }
        ComplexPolynomial P = parse_inline_poly("map.P", map_P_inline);
        ComplexPolynomial Q = parse_inline_poly("map.Q", map_Q_inline);
        return RationalMap::make(std::move(P), std::move(Q), "inline");
    }();
    if (map_conjugate == "P") return conjugate_map(m, MapPart::P);
    if (map_conjugate == "Q") return conjugate_map(m, MapPart::Q);
    return m;
}

JobConfig parse_cli(int argc, const char* const* argv) {
    std::map<std::string, std::string> kv;
    bool have_file = false;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--help" || arg == "-h") throw std::runtime_error(usage_text());
        if (arg.rfind("--", 0) == 0) {
            const auto eq = arg.find('=');
            if (eq == std::string::npos)
                fail("flag '" + arg + "' must have the form --key=value");
            const std::string key = arg.substr(2, eq - 2);
            const std::string value = arg.substr(eq + 1);
            if (key == "out") {
                kv["out"] = value;
                continue;
            }
            kv[key] = value;  // flags override the config file
        } else {
            if (have_file) fail("more than one positional config file given");
            have_file = true;
            std::ifstream in(arg);
            if (!in) fail("cannot open config file '" + arg + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            auto file_kv = parse_kv_text(ss.str());
            for (auto& [k, v] : kv) file_kv[k] = v;  // flags win
            file_kv.swap(kv);
        }
    }
    return make_config(kv);
}

std::string usage_text() {
    return "usage: knotfield [config-file] [--key=value ...]\n"
           "  actions: sample | helicity | fluxtube | trace | level-curve | nodal |\n"
           "           surface | energy | verify\n"
           "  examples:\n"
           "    knotfield --action=helicity --map.preset=hopf --out=out\n"
           "    knotfield --action=fluxtube --map.preset=trefoil --chi0=0.5\n"
           "    knotfield job.cfg --seed=7\n"
           "  see README.md for the full key reference.\n";
}

}  // namespace kf
