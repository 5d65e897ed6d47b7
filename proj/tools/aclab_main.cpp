// Command-line front end; all work happens behind the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aclab/aclab.h"

namespace {

// "section.key=value" -> config text lines appended after the file content,
// so command-line settings override the file.
std::string overrides_to_config(const std::vector<std::string>& sets) {
    std::ostringstream out;
    for (const auto& s : sets) {
        const size_t eq = s.find('=');
        const size_t dot = s.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
            throw CLI::ValidationError("--set", "expected section.key=value, got: " + s);
        }
        out << "\n[" << s.substr(0, dot) << "]\n"
            << s.substr(dot + 1, eq - dot - 1) << " = " << s.substr(eq + 1) << "\n";
    }
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aclab — numerical laboratory for stochastic front dynamics"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_dir;
    uint64_t seed = 1;
    int threads = 0;
    bool quiet = false;
    app.add_option("--config", config_path, "Config file (sectioned key = value text)")
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory for artifacts and the run record");
    app.add_option("--seed", seed, "Master seed (all randomness derives from it)");
    app.add_option("--threads", threads, "Worker threads (0 = hardware default)");
    app.add_flag("--quiet", quiet, "Suppress the run-record JSON on stdout");

    const char* verbs[] = {"profile",  "spectrum", "coeffs",  "dzeta",
                           "kernel",   "flow",     "simulate", "compare",
                           "verify-identities", "closeness-scan"};
    const char* help[] = {
        "Solve the standing front profile and export its tables",
        "Lowest eigenpairs of the linearization around the front",
        "Limit diffusion/drift coefficients with consistency gates",
        "Front-position derivative field for a configured state",
        "Linearized flow kernel slice (order 1 or 2)",
        "Deterministic relaxation of a configured state to the front family",
        "Stochastic paths with interface tracking (per-path CSV output)",
        "Compare stored interface paths against the limit diffusion",
        "Partition/chain-rule identity checks on random data",
        "Front-closeness scaling across a range of noise amplitudes",
    };
    std::vector<std::vector<std::string>> sets(std::size(verbs));
    for (size_t i = 0; i < std::size(verbs); ++i) {
        CLI::App* sub = app.add_subcommand(verbs[i], help[i]);
        sub->add_option("--set", sets[i],
                        "Override a config entry, section.key=value (repeatable)");
    }
    CLI::App* verify = app.add_subcommand("verify", "Re-hash the outputs of a previous run");
    std::string verify_dir;
    verify->add_option("dir", verify_dir, "Run directory containing record.json")->required();

    CLI11_PARSE(app, argc, argv);

    if (verify->parsed()) {
        char* problems = nullptr;
        const int code = aclab_verify(verify_dir.c_str(), &problems);
        if (problems) {
            if (!quiet) std::printf("%s\n", problems);
            aclab_string_free(problems);
        }
        if (code != ACLAB_OK) std::fprintf(stderr, "error: %s\n", aclab_last_error());
        return code;
    }

    std::string config_text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        config_text = buf.str();
    }
    const CLI::App* sub = app.get_subcommands().front();
    const std::string verb = sub->get_name();
    size_t verb_index = 0;
    while (verb_index < std::size(verbs) && verb != verbs[verb_index]) ++verb_index;
    try {
        config_text += overrides_to_config(sets[verb_index]);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return ACLAB_VALIDATION_ERROR;
    }
    if (out_dir.empty()) {
        std::fprintf(stderr, "error: --out is required for %s\n", verb.c_str());
        return ACLAB_VALIDATION_ERROR;
    }

    char* result = nullptr;
    const int code =
        aclab_run(verb.c_str(), config_text.c_str(), out_dir.c_str(), seed, threads, &result);
    if (result) {
        if (!quiet) std::printf("%s\n", result);
        aclab_string_free(result);
    }
    if (code != ACLAB_OK) std::fprintf(stderr, "error: %s\n", aclab_last_error());
    return code;
}
