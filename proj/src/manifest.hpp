#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "../vendor/json.hpp"

namespace aclab {

std::string sha256_bytes(const std::string& data);
std::string sha256_file(const std::string& path);

// Atomic file write: temp file in the same directory, then rename.
void atomic_write(const std::string& path, const std::string& content);

void ensure_directory(const std::string& dir);

// Everything needed to reproduce and audit one experiment run.
struct RunRecord {
    std::string experiment;
    std::string config_snapshot;  // raw config text
    uint64_t master_seed = 0;
    int threads = 1;
    std::string version = "aclab 0.1.0";
    nlohmann::json results;       // experiment-specific summary + gate status
    std::vector<std::pair<std::string, std::string>> files;  // relative path, sha256
    double wall_seconds = 0.0;
    bool gates_passed = true;

    nlohmann::json to_json() const;
};

// Writes record.json (atomically) into out_dir; the record lists every output
// file with its content hash.
void write_run_record(const RunRecord& record, const std::string& out_dir);

// Recomputes the hashes listed in out_dir/record.json; returns the list of
// missing or mismatched files (empty = verified).
std::vector<std::string> verify_run_record(const std::string& out_dir);

// Markdown gate summary next to the JSON record.
void write_report(const RunRecord& record, const std::string& out_dir);

}  // namespace aclab
