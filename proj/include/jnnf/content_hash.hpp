// Content addressing for cache keys and report provenance. Callers render
// whatever they want hashed into a canonical byte string first; this header
// only turns bytes into digests.
#pragma once

#include <openssl/evp.h>

#include <array>
#include <string>
#include <string_view>

#include "jnnf/error.hpp"

namespace jnnf {

inline std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  require(ctx != nullptr, "sha256_hex: digest context allocation failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest.data(), &len) == 1;
  EVP_MD_CTX_free(ctx);
  require(ok, "sha256_hex: digest computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

// The prefixed form used in reports and as cache keys.
inline std::string content_hash(std::string_view bytes) { return "sha256:" + sha256_hex(bytes); }

}  // namespace jnnf
