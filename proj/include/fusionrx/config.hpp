#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fusionrx {

// Flat key=value configuration ('#' starts a comment). Values are kept as
// strings; typed getters parse on access. Unknown keys are preserved so the
// fingerprint covers everything the run saw.
class Config {
  public:
    static Config defaults();
    static Config from_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_str(const std::string& key) const;
    double get_double(const std::string& key) const;
    long get_long(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    // FNV-1a over the sorted key=value list; stable across runs and platforms.
    std::uint64_t fingerprint() const;
    std::string dump() const;

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace fusionrx
