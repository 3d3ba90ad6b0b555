#include <cstdio>
#include <exception>

#include "kf/runner.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fputs(kf::usage_text().c_str(), stderr);
        return 2;
    }
    try {
        const kf::JobConfig cfg = kf::parse_cli(argc, argv);
        const kf::RunOutput out = kf::run_job(cfg);
        std::printf("manifest: %s\n", out.manifest_path.c_str());
        for (const std::string& a : out.artifacts) std::printf("artifact: %s\n", a.c_str());
        if (out.exit_code != 0) std::fprintf(stderr, "knotfield: verification checks failed\n");
        return out.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "knotfield: %s\n", e.what());
        return 1;
    }
}
