#pragma once

#include <map>
#include <string>
#include <vector>

namespace aclab {

// Sectioned key-value configuration text:
//   [section]
//   key = value        # trailing comments allowed
// Unknown sections/keys are preserved verbatim (the run record snapshots the
// raw text).
class Config {
  public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long long get_int(const std::string& section, const std::string& key,
                      long long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

    const std::string& raw_text() const { return raw_; }
    std::vector<std::string> sections() const;

  private:
    std::string require(const std::string& section, const std::string& key) const;
    std::map<std::string, std::map<std::string, std::string>> data_;
    std::string raw_;
};

}  // namespace aclab
