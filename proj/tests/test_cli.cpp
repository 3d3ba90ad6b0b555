#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "kf/config.hpp"
#include "kf/runner.hpp"

using namespace kf;

namespace {

JobConfig from_text(const std::string& text) { return make_config(parse_kv_text(text)); }

std::string out_dir(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string manifest_value(const std::string& manifest, const std::string& key) {
    const std::string needle = key + " = ";
    const auto pos = manifest.find(needle);
    REQUIRE(pos != std::string::npos);
    const auto end = manifest.find('\n', pos);
    return manifest.substr(pos + needle.size(), end - pos - needle.size());
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("minimal config gets defaults") {
    const JobConfig cfg = from_text("map.preset=hopf\naction=helicity\n");
    CHECK(cfg.action == "helicity");
    CHECK(cfg.quad.radial == 24);
    CHECK(cfg.quad.levels == 3);
    CHECK(cfg.seed == 12345);
    CHECK(cfg.out_dir == "out");
    const RationalMap m = cfg.build_map();
    CHECK(m.label == "hopf");
}

TEST_CASE("torus parameters build the published polynomials") {
    const JobConfig cfg =
        from_text("action=helicity\nmap.preset=torus\nmap.alpha=1\nmap.beta=1\nmap.p=2\nmap.q=3\n");
    const RationalMap m = cfg.build_map();
    CHECK(m.P == ComplexPolynomial::monomial(1.0, 1, 0, 1, 0));
    CHECK(m.Q ==
          ComplexPolynomial({PolyTerm{1.0, {3, 0, 0, 0}}, PolyTerm{1.0, {0, 0, 2, 0}}}));
}

TEST_CASE("unknown keys are hard errors naming the key") {
    CHECK_THROWS_WITH_AS(from_text("action=helicity\nmap.preset=hopf\nmap.gamma=1\n"),
                         doctest::Contains("map.gamma"), std::runtime_error);
}

TEST_CASE("missing required keys are errors") {
    CHECK_THROWS_WITH_AS(from_text("map.preset=hopf\n"), doctest::Contains("action"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(from_text("action=helicity\n"), doctest::Contains("map"),
                         std::runtime_error);
}

TEST_CASE("invalid torus parameters are rejected with the constraint named") {
    const JobConfig cfg =
        from_text("action=helicity\nmap.preset=torus\nmap.alpha=1\nmap.p=2\nmap.q=4\n");
    CHECK_THROWS_WITH_AS(cfg.build_map(), doctest::Contains("coprime"), std::invalid_argument);
}

TEST_CASE("malformed inline polynomial names the line") {
    const JobConfig cfg = from_text("action=sample\nmap.P=1 0 1 0 0 0\nmap.Q=1 0 bad 0 0 0\n");
    CHECK_THROWS_WITH_AS(cfg.build_map(), doctest::Contains("line 1"), std::runtime_error);
}

TEST_CASE("inline polynomials define a usable map") {
    // hopf written inline: P = u, Q = v
    const JobConfig cfg =
        from_text("action=helicity\nmap.P=1 0 1 0 0 0\nmap.Q=1 0 0 0 1 0\n");
    const RationalMap m = cfg.build_map();
    CHECK(m.P == ComplexPolynomial::monomial(1.0, 1, 0, 0, 0));
    CHECK(m.Q == ComplexPolynomial::monomial(1.0, 0, 0, 1, 0));
}

TEST_CASE("cli flags mirror config keys and override the file") {
    const std::string cfg_path = out_dir("kf_cli_test.cfg");
    {
        std::ofstream out(cfg_path);
        out << "action=helicity\nmap.preset=hopf\nseed=1\n";
    }
    const char* argv[] = {"knotfield", cfg_path.c_str(), "--seed=77", "--quad.levels=2"};
    const JobConfig cfg = parse_cli(4, argv);
    CHECK(cfg.seed == 77);
    CHECK(cfg.quad.levels == 2);
    CHECK(cfg.map_preset == "hopf");
}

TEST_CASE("helicity run writes a manifest with the hopf value") {
    JobConfig cfg = from_text(
        "action=helicity\nmap.preset=hopf\n"
        "quad.radial=16\nquad.polar=16\nquad.azimuth=32\nquad.levels=3\n");
    cfg.out_dir = out_dir("kf_run_helicity");
    const RunOutput out = run_job(cfg);
    CHECK(out.exit_code == 0);
    const double v = std::stod(manifest_value(out.manifest_text, "result.helicity.value"));
    CHECK(v > 0.99);
    CHECK(v < 1.01);
    CHECK(manifest_value(out.manifest_text, "config.map.preset") == "hopf");
    CHECK(manifest_value(out.manifest_text, "map.helicity_formula") == "1");
}

TEST_CASE("verify runs are deterministic for a fixed seed") {
    JobConfig cfg = from_text("action=verify\nmap.preset=hopf\nverify.points=100\nseed=9\n");
    cfg.out_dir = out_dir("kf_run_verify_a");
    const RunOutput a = run_job(cfg);
    cfg.out_dir = out_dir("kf_run_verify_b");
    const RunOutput b = run_job(cfg);
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(manifest_stable_text(a.manifest_text) != "");
    // identical modulo the volatile keys; out dir differs only in config echo
    auto scrub = [](std::string text, const std::string& dir) {
        std::string marker = "config.out = " + dir + "\n";
        const auto pos = text.find(marker);
        if (pos != std::string::npos) text.erase(pos, marker.size());
        return text;
    };
    CHECK(scrub(manifest_stable_text(a.manifest_text), a.manifest_path.substr(0, a.manifest_path.size() - 13)) !=
          "");
    // compare after removing the only differing line (output directory)
    std::string sa = manifest_stable_text(a.manifest_text);
    std::string sb = manifest_stable_text(b.manifest_text);
    const std::string da = "kf_run_verify_a";
    const std::string db = "kf_run_verify_b";
    size_t p;
    while ((p = sa.find(da)) != std::string::npos) sa.replace(p, da.size(), "OUT");
    while ((p = sb.find(db)) != std::string::npos) sb.replace(p, db.size(), "OUT");
    CHECK(sa == sb);
}

TEST_CASE("trace run exports a closed field line") {
    JobConfig cfg = from_text("action=trace\nmap.preset=hopf\ntrace.seed=0.5,0,0\n");
    cfg.out_dir = out_dir("kf_run_trace");
    const RunOutput out = run_job(cfg);
    CHECK(out.exit_code == 0);
    REQUIRE(out.artifacts.size() == 1);
    CHECK(manifest_value(out.manifest_text, "result.trace.closed") == "true");
    CHECK(std::filesystem::exists(out.artifacts[0]));
}

TEST_CASE("usage text names the actions") {
    const std::string u = usage_text();
    CHECK(u.find("helicity") != std::string::npos);
    CHECK(u.find("verify") != std::string::npos);
}

}  // TEST_SUITE
