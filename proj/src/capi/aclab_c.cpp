#include "aclab/aclab.h"

#include <cstring>
#include <string>

#include "../config.hpp"
#include "../errors.hpp"
#include "../experiments.hpp"
#include "../manifest.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int capture(const std::exception& e, int code) {
    g_last_error = e.what();
    return code;
}

}  // namespace

extern "C" {

int aclab_run(const char* verb, const char* config_text, const char* out_dir, uint64_t seed,
              int threads, char** result_json) {
    g_last_error.clear();
    if (result_json) *result_json = nullptr;
    if (!verb || !out_dir) {
        g_last_error = "verb and out_dir must be non-NULL";
        return ACLAB_VALIDATION_ERROR;
    }
    try {
        aclab::ExperimentRequest req;
        req.verb = verb;
        req.config = aclab::Config::parse(config_text ? config_text : "");
        req.out_dir = out_dir;
        req.seed = seed;
        req.threads = threads;
        const aclab::RunRecord rec = aclab::run_experiment(req);
        if (result_json) *result_json = dup_string(rec.to_json().dump(2));
        if (!rec.gates_passed) {
            g_last_error = "one or more gates failed; see " + std::string(out_dir) +
                           "/record.json";
            return ACLAB_GATE_FAILURE;
        }
        return ACLAB_OK;
    } catch (const aclab::ValidationError& e) {
        return capture(e, ACLAB_VALIDATION_ERROR);
    } catch (const aclab::NumericError& e) {
        return capture(e, ACLAB_NUMERIC_ERROR);
    } catch (const aclab::GateFailure& e) {
        return capture(e, ACLAB_GATE_FAILURE);
    } catch (const std::exception& e) {
        return capture(e, ACLAB_VALIDATION_ERROR);
    }
}

int aclab_verify(const char* out_dir, char** problems_json) {
    g_last_error.clear();
    if (problems_json) *problems_json = nullptr;
    if (!out_dir) {
        g_last_error = "out_dir must be non-NULL";
        return ACLAB_VALIDATION_ERROR;
    }
    try {
        const std::vector<std::string> bad = aclab::verify_run_record(out_dir);
        if (problems_json) {
            std::string json = "[";
            for (size_t i = 0; i < bad.size(); ++i) {
                if (i) json += ",";
                json += "\"" + bad[i] + "\"";
            }
            json += "]";
            *problems_json = dup_string(json);
        }
        if (!bad.empty()) {
            g_last_error = std::to_string(bad.size()) + " output file(s) missing or altered";
            return ACLAB_GATE_FAILURE;
        }
        return ACLAB_OK;
    } catch (const aclab::ValidationError& e) {
        return capture(e, ACLAB_VALIDATION_ERROR);
    } catch (const std::exception& e) {
        return capture(e, ACLAB_VALIDATION_ERROR);
    }
}

const char* aclab_last_error(void) { return g_last_error.c_str(); }

const char* aclab_version(void) { return "aclab 0.1.0"; }

void aclab_string_free(char* s) { delete[] s; }

}  // extern "C"
