// Content-addressed cache for job results. The key is the content hash of
// the fully canonicalized job inputs; the value is the report body the job
// produced. Because bodies are deterministic functions of the inputs, a hit
// can stand in for recomputation, and verify mode spot-checks exactly that
// claim by recomputing anyway and comparing bytes.
//
// The cache lives in the directory named by JNNF_CACHE_DIR and is disabled
// when the variable is unset or empty. Entries are written once via a
// temporary file and rename; an entry that fails to parse is reported on
// stderr, treated as a miss, and replaced by the next store.
#pragma once

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "jnnf/error.hpp"

namespace jnnf {

inline constexpr const char* kCacheEnvVar = "JNNF_CACHE_DIR";

class ResultCache {
 public:
  ResultCache() = default;
  explicit ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  static ResultCache from_environment() {
    const char* dir = std::getenv(kCacheEnvVar);
    if (dir == nullptr || *dir == '\0') return ResultCache();
    return ResultCache(std::filesystem::path(dir));
  }

  bool enabled() const { return !dir_.empty(); }

  std::optional<nlohmann::json> lookup(const std::string& key) const {
    if (!enabled()) return std::nullopt;
    const std::filesystem::path path = entry_path(key);
    std::ifstream in(path);
    if (!in.good()) return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json body = nlohmann::json::parse(buf.str(), nullptr, false);
    if (body.is_discarded()) {
      std::cerr << "warning: cache entry " << key << " is corrupted, treating as a miss\n";
      return std::nullopt;
    }
    return body;
  }

  // Write-once: a key that already holds a parseable entry is left alone.
  // A corrupted entry is replaced (the rename makes the swap atomic).
  void store(const std::string& key, const nlohmann::json& body) const {
    if (!enabled()) return;
    const std::filesystem::path path = entry_path(key);
    {
      std::ifstream existing(path);
      if (existing.good()) {
        std::stringstream buf;
        buf << existing.rdbuf();
        if (!nlohmann::json::parse(buf.str(), nullptr, false).is_discarded()) return;
      }
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      require(out.good(), "cache: cannot open " + tmp.string());
      out << body.dump() << '\n';
      require(out.good(), "cache: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  }

  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;

  std::filesystem::path entry_path(const std::string& key) const {
    // Keys look like "sha256:<hex>"; the hex part is filename-safe.
    std::string name = key;
    const std::size_t colon = name.find(':');
    if (colon != std::string::npos) name = name.substr(colon + 1);
    return dir_ / (name + ".json");
  }
};

}  // namespace jnnf
