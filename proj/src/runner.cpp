#include "kf/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kf/export.hpp"
#include "kf/marching.hpp"
#include "kf/meshdiag.hpp"
#include "kf/parallel.hpp"

namespace kf {

namespace {

std::string fmtd(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

Quantity quantity_from_name(const std::string& name) {
    for (Quantity q : {Quantity::chi, Quantity::f, Quantity::eta, Quantity::energy, Quantity::B,
                       Quantity::A_smooth, Quantity::A_naive, Quantity::custom})
        if (quantity_name(q) == name) return q;
    throw std::runtime_error("config: unknown quantity '" + name + "'");
}

std::string inline_poly_echo(const ComplexPolynomial& p) {
    std::string text = p.to_text();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    std::string out;
    for (char c : text) out += (c == '\n') ? ';' : c;
    return out;
}

struct ManifestWriter {
    std::ostringstream out;
    void kv(const std::string& key, const std::string& value) {
        out << key << " = " << value << '\n';
    }
    void kvd(const std::string& key, double value) { kv(key, fmtd(value)); }
};

}  // namespace

std::string manifest_stable_text(const std::string& manifest) {
    std::istringstream in(manifest);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("timestamp = ", 0) == 0 || line.rfind("wall_ms = ", 0) == 0) continue;
        out << line << '\n';
    }
    return out.str();
}

RunOutput run_job(const JobConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    set_default_thread_count(cfg.threads);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec)
        throw std::runtime_error("runner: cannot create output directory '" + cfg.out_dir +
                                 "': " + ec.message());

    RunOutput result;
    const RationalMap map = cfg.build_map();
    const std::string seed_note = "seed=" + std::to_string(cfg.seed);

    ManifestWriter mf;
    mf.kv("manifest.version", "1");
    {
        const auto now = std::chrono::system_clock::now();
        const std::time_t tt = std::chrono::system_clock::to_time_t(now);
        char buf[64];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
        mf.kv("timestamp", buf);
    }
    for (const auto& [k, v] : cfg.echo) mf.kv("config." + k, v);
    mf.kv("map.label", map.label);
    mf.kv("map.P.terms", inline_poly_echo(map.P));
    mf.kv("map.Q.terms", inline_poly_echo(map.Q));
    {
        const auto formula = helicity_formula(map);
        mf.kv("map.helicity_formula", formula ? std::to_string(*formula) : "not applicable");
    }

    auto artifact = [&](const std::string& name) {
        const std::string path = (fs::path(cfg.out_dir) / name).string();
        result.artifacts.push_back(path);
        mf.kv("artifact." + std::to_string(result.artifacts.size() - 1), path);
        return path;
    };

    bool checks_failed = false;

    if (cfg.action == "sample") {
        const Quantity q = quantity_from_name(cfg.grid_quantity);
        const std::string format = cfg.out_format.empty() ? "vtk" : cfg.out_format;
        if (quantity_is_vector(q)) {
            const VectorGrid g = sample_vector_grid(map, q, cfg.grid_bounds, cfg.grid_dims);
            if (format == "vtk")
                write_vtk(g, artifact("grid_" + cfg.grid_quantity + ".vtk"), seed_note);
            else if (format == "csv")
                write_csv(g, artifact("grid_" + cfg.grid_quantity + ".csv"), seed_note);
            else
                throw std::runtime_error("runner: sample supports out.format vtk|csv");
        } else {
            const ScalarGrid g = sample_scalar_grid(map, q, cfg.grid_bounds, cfg.grid_dims);
            if (format == "vtk")
                write_vtk(g, artifact("grid_" + cfg.grid_quantity + ".vtk"), seed_note);
            else if (format == "csv")
                write_csv(g, artifact("grid_" + cfg.grid_quantity + ".csv"), seed_note);
            else
                throw std::runtime_error("runner: sample supports out.format vtk|csv");
        }
        mf.kv("result.samples", std::to_string(cfg.grid_dims.count()));
    } else if (cfg.action == "helicity") {
        const HelicityResult h = helicity_volume(map, cfg.quad);
        mf.kv("result.helicity.method", "volume-quadrature");
        mf.kvd("result.helicity.value", h.value);
        mf.kvd("result.helicity.error", h.error_estimate);
        mf.kv("result.helicity.converged", h.converged ? "true" : "false");
        for (size_t i = 0; i < h.convergence.size(); ++i)
            mf.kv("result.helicity.convergence." + std::to_string(i),
                  std::to_string(h.convergence[i].first) + " -> " + fmtd(h.convergence[i].second));
        if (!h.converged)
            mf.kv("warning.helicity", "quadrature error estimate above tolerance");
        if (cfg.helicity_linking) {
            const HopfInvariantResult lk =
                hopf_invariant_linking(map, cfg.link_c1, cfg.link_c2, cfg.nodal, cfg.trace);
            mf.kv("result.linking.method", "preimage-linking");
            mf.kv("result.linking.value", std::to_string(lk.value));
            mf.kvd("result.linking.raw", lk.raw);
            mf.kv("result.linking.components",
                  std::to_string(lk.components_c1) + "+" + std::to_string(lk.components_c2));
        }
    } else if (cfg.action == "fluxtube") {
        const HelicityResult total = helicity_volume(map, cfg.quad);
        const HelicityResult tube = fluxtube_helicity(map, cfg.chi0, cfg.quad);
        mf.kvd("result.fluxtube.chi0", cfg.chi0);
        mf.kvd("result.fluxtube.helicity", tube.value);
        mf.kvd("result.fluxtube.helicity_error", tube.error_estimate);
        mf.kvd("result.total.helicity", total.value);
        mf.kvd("result.fluxtube.ratio", total.value != 0.0 ? tube.value / total.value : 0.0);
        mf.kvd("result.fluxtube.ratio_law", (1.0 - cfg.chi0) * (1.0 - cfg.chi0));
        if (cfg.chi0 < 1.0) {
            const double flux = fluxtube_flux(map, cfg.chi0, cfg.flux);
            mf.kvd("result.fluxtube.flux", flux);
            mf.kvd("result.fluxtube.flux_law", 1.0 - cfg.chi0);
        }
    } else if (cfg.action == "trace") {
        const Curve c = trace_fieldline(map, cfg.trace_seed, cfg.trace);
        const std::string format = cfg.out_format.empty() ? "csv" : cfg.out_format;
        if (format == "csv")
            write_csv(c, artifact("fieldline.csv"), seed_note);
        else if (format == "vtk")
            write_vtk({c}, {}, artifact("fieldline.vtk"), seed_note);
        else
            throw std::runtime_error("runner: trace supports out.format csv|vtk");
        mf.kv("result.trace.closed", c.closed ? "true" : "false");
        mf.kvd("result.trace.closure_gap", c.closure_gap);
        mf.kvd("result.trace.arc_length", c.arc_length);
        for (const auto& [k, v] : c.tags) mf.kvd("result.trace.tag." + k, v);
    } else if (cfg.action == "level-curve") {
        const Curve c = trace_level_curve(map, cfg.level_c, cfg.trace_seed, cfg.trace);
        const std::string format = cfg.out_format.empty() ? "csv" : cfg.out_format;
        if (format == "csv")
            write_csv(c, artifact("level_curve.csv"), seed_note);
        else if (format == "vtk")
            write_vtk({c}, {}, artifact("level_curve.vtk"), seed_note);
        else
            throw std::runtime_error("runner: level-curve supports out.format csv|vtk");
        mf.kv("result.level_curve.closed", c.closed ? "true" : "false");
        mf.kvd("result.level_curve.closure_gap", c.closure_gap);
        mf.kvd("result.level_curve.arc_length", c.arc_length);
    } else if (cfg.action == "nodal") {
        const ComplexPolynomial& poly = cfg.nodal_which == "P" ? map.P : map.Q;
        const NodalTraceResult res = trace_nodal_curve(poly, cfg.nodal, cfg.trace);
        mf.kv("result.nodal.components", std::to_string(res.curves.size()));
        const std::string format = cfg.out_format.empty() ? "csv" : cfg.out_format;
        for (size_t i = 0; i < res.curves.size(); ++i) {
            const Curve& c = res.curves[i];
            const std::string base = "nodal_" + cfg.nodal_which + "_" + std::to_string(i);
            if (format == "csv")
                write_csv(c, artifact(base + ".csv"), seed_note);
            else if (format == "vtk")
                write_vtk({c}, {}, artifact(base + ".vtk"), seed_note);
            else
                throw std::runtime_error("runner: nodal supports out.format csv|vtk");
            mf.kv("result.nodal." + std::to_string(i) + ".closed", c.closed ? "true" : "false");
            mf.kvd("result.nodal." + std::to_string(i) + ".arc_length", c.arc_length);
        }
        for (size_t i = 0; i < res.warnings.size(); ++i)
            mf.kv("warning.nodal." + std::to_string(i), res.warnings[i]);
    } else if (cfg.action == "surface") {
        const Quantity q = quantity_from_name(cfg.surface_quantity);
        if (quantity_is_vector(q))
            throw std::runtime_error("runner: surface quantity must be scalar");
        const ScalarGrid g = sample_scalar_grid(map, q, cfg.grid_bounds, cfg.grid_dims);
        const TriMesh mesh = isosurface(g, cfg.surface_level);
        const std::string format = cfg.out_format.empty() ? "obj" : cfg.out_format;
        if (format == "obj")
            write_obj(mesh, artifact("surface_" + cfg.surface_quantity + ".obj"), seed_note);
        else if (format == "vtk")
            write_vtk({}, {mesh}, artifact("surface_" + cfg.surface_quantity + ".vtk"), seed_note);
        else
            throw std::runtime_error("runner: surface supports out.format obj|vtk");
        const MeshDiagnostics diag = mesh_diagnostics(mesh);
        mf.kv("result.surface.vertices", std::to_string(mesh.vertices.size()));
        mf.kv("result.surface.triangles", std::to_string(mesh.triangles.size()));
        mf.kv("result.surface.components", std::to_string(diag.component_count()));
        mf.kv("result.surface.non_manifold_edges", std::to_string(diag.non_manifold_edges));
        mf.kvd("result.surface.area", diag.total_area);
        for (size_t i = 0; i < diag.components.size(); ++i) {
            const ComponentDiagnostics& c = diag.components[i];
            mf.kv("result.surface.component." + std::to_string(i),
                  "euler=" + std::to_string(c.euler_characteristic) +
                      " boundary_loops=" + std::to_string(c.boundary_loops) +
                      " area=" + fmtd(c.area));
        }
    } else if (cfg.action == "energy") {
        const QuadratureResult e = total_energy(map, cfg.energy_radius, cfg.quad);
        mf.kvd("result.energy.radius", cfg.energy_radius);
        mf.kvd("result.energy.value", e.value);
        mf.kvd("result.energy.error", e.error);
        const double slope = energy_decay_slope(map, 10.0, 100.0);
        mf.kvd("result.energy.decay_slope", slope);
    } else if (cfg.action == "verify") {
        VerifySpec vs;
        vs.seed = cfg.seed;
        vs.points = cfg.verify_points;
        const std::vector<CheckResult> checks = run_verify(map, vs);
        int passed = 0, failed = 0, skipped = 0;
        for (const CheckResult& c : checks) {
            std::string status = c.skipped ? "skip" : (c.pass ? "pass" : "FAIL");
            mf.kv("check." + c.name, status + " : " + c.detail);
            if (c.skipped)
                ++skipped;
            else if (c.pass)
                ++passed;
            else
                ++failed;
        }
        mf.kv("result.verify.passed", std::to_string(passed));
        mf.kv("result.verify.failed", std::to_string(failed));
        mf.kv("result.verify.skipped", std::to_string(skipped));
        checks_failed = failed > 0;
    } else {
        throw std::runtime_error("runner: unhandled action '" + cfg.action + "'");
    }

    const auto t_end = std::chrono::steady_clock::now();
    const double wall_ms =
        std::chrono::duration_cast<std::chrono::microseconds>(t_end - t_start).count() / 1000.0;
    mf.kvd("wall_ms", wall_ms);
    mf.kv("result.status", checks_failed ? "checks-failed" : "ok");
    mf.kv("note.seed", seed_note);

    result.manifest_text = mf.out.str();
    result.manifest_path = (fs::path(cfg.out_dir) / "manifest.txt").string();
    {
        std::ofstream out(result.manifest_path);
        if (!out)
            throw std::runtime_error("runner: cannot write manifest '" + result.manifest_path +
                                     "'");
        out << result.manifest_text;
    }
    result.exit_code = checks_failed ? 1 : 0;
    return result;
}

}  // namespace kf
