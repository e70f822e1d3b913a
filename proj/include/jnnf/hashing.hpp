#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace jnnf {

// FNV-1a, used for in-memory hash tables only (content addressing uses SHA-256).
inline std::size_t fnv1a(const void* data, std::size_t len, std::size_t seed = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::size_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

template <class T>
std::size_t hash_span(const T* data, std::size_t n, std::size_t seed = 14695981039346656037ull) {
  return fnv1a(data, n * sizeof(T), seed);
}

inline void hash_mix(std::size_t& h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
}

// hash_value overloads so integer element types satisfy the group backend
// concept (found by ordinary lookup from inside this namespace).
inline std::size_t hash_value(uint32_t v) { return fnv1a(&v, sizeof v); }
inline std::size_t hash_value(uint64_t v) { return fnv1a(&v, sizeof v); }

}
