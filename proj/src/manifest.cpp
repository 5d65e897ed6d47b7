#include "manifest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace aclab {

namespace {

std::string digest_to_hex(const unsigned char* digest, unsigned len) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

}  // namespace

std::string sha256_bytes(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw NumericError("sha256: digest computation failed");
    }
    EVP_MD_CTX_free(ctx);
    return digest_to_hex(digest, len);
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("sha256: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return sha256_bytes(buf.str());
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create directory " + dir + ": " + ec.message());
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) ensure_directory(target.parent_path().string());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + tmp);
        out << content;
        if (!out) throw ValidationError("short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw ValidationError("cannot rename " + tmp + " -> " + path + ": " + ec.message());
}

nlohmann::json RunRecord::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["config_snapshot"] = config_snapshot;
    j["master_seed"] = master_seed;
    j["threads"] = threads;
    j["version"] = version;
    j["results"] = results;
    j["wall_seconds"] = wall_seconds;
    j["gates_passed"] = gates_passed;
    nlohmann::json files_json = nlohmann::json::array();
    for (const auto& [path, hash] : files)
        files_json.push_back({{"path", path}, {"sha256", hash}});
    j["files"] = files_json;
    return j;
}

void write_run_record(const RunRecord& record, const std::string& out_dir) {
    ensure_directory(out_dir);
    atomic_write(out_dir + "/record.json", record.to_json().dump(2) + "\n");
}

std::vector<std::string> verify_run_record(const std::string& out_dir) {
    std::ifstream in(out_dir + "/record.json");
    if (!in) throw ValidationError("verify: cannot open " + out_dir + "/record.json");
    nlohmann::json j;
    in >> j;
    std::vector<std::string> bad;
    for (const auto& entry : j.at("files")) {
        const std::string rel = entry.at("path").get<std::string>();
        const std::string expect = entry.at("sha256").get<std::string>();
        const std::string full = out_dir + "/" + rel;
        try {
            if (sha256_file(full) != expect) bad.push_back(rel + " (hash mismatch)");
        } catch (const ValidationError&) {
            bad.push_back(rel + " (missing)");
        }
    }
    return bad;
}

void write_report(const RunRecord& record, const std::string& out_dir) {
    std::ostringstream md;
    md << "# Run report: " << record.experiment << "\n\n";
    md << "- version: " << record.version << "\n";
    md << "- master seed: " << record.master_seed << "\n";
    md << "- threads: " << record.threads << "\n";
    md << "- wall seconds: " << record.wall_seconds << "\n";
    md << "- gates: " << (record.gates_passed ? "PASS" : "FAIL") << "\n\n";
    if (record.results.is_object() && record.results.empty())
        md << "No results recorded (empty ensemble).\n";
    else
        md << "```json\n" << record.results.dump(2) << "\n```\n";
    if (!record.files.empty()) {
        md << "\n## Output files\n\n";
        for (const auto& [path, hash] : record.files)
            md << "- `" << path << "` sha256 " << hash << "\n";
    }
    atomic_write(out_dir + "/report.md", md.str());
}

}  // namespace aclab
