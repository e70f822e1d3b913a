#pragma once

#include <cstdint>
#include <vector>

#include "jnnf/error.hpp"

namespace jnnf {

// Arithmetic in Z/m for small m (fits in uint32_t, products in uint64_t).

inline bool is_prime(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline uint32_t mod_add(uint32_t a, uint32_t b, uint32_t m) { return (a + b) % m; }
inline uint32_t mod_sub(uint32_t a, uint32_t b, uint32_t m) { return (a + m - b % m) % m; }
inline uint32_t mod_mul(uint32_t a, uint32_t b, uint32_t m) {
  return static_cast<uint32_t>((static_cast<uint64_t>(a) * b) % m);
}

inline uint32_t mod_pow(uint32_t a, uint64_t e, uint32_t m) {
  uint64_t r = 1 % m, base = a % m;
  while (e) {
    if (e & 1) r = (r * base) % m;
    base = (base * base) % m;
    e >>= 1;
  }
  return static_cast<uint32_t>(r);
}

// Inverse mod prime p via Fermat.
inline uint32_t mod_inv(uint32_t a, uint32_t p) {
  require(a % p != 0, "mod_inv: zero has no inverse");
  return mod_pow(a, p - 2, p);
}

inline uint32_t element_order_mod(uint32_t a, uint32_t m) {
  require(a % m != 0, "element_order_mod: zero argument");
  uint32_t x = a % m, ord = 1;
  while (x != 1) {
    x = mod_mul(x, a, m);
    ++ord;
    require(ord <= m, "element_order_mod: not a unit");
  }
  return ord;
}

// Smallest integer representative of a primitive n-th root of unity in F_q.
inline uint32_t primitive_root_of_unity(uint32_t n, uint32_t q) {
  require(is_prime(q), "primitive_root_of_unity: q must be prime");
  require((q - 1) % n == 0, "primitive_root_of_unity: n does not divide q-1");
  for (uint32_t z = 2; z < q; ++z)
    if (element_order_mod(z, q) == n) return z;
  throw error("primitive_root_of_unity: none found");
}

// Kernel basis of an r x c matrix over F_p (row-major), by Gaussian elimination.
// Returns a list of c-dimensional vectors spanning the right kernel.
inline std::vector<std::vector<uint32_t>> kernel_basis_fp(std::vector<std::vector<uint32_t>> m,
                                                          uint32_t rows, uint32_t cols, uint32_t p) {
  std::vector<uint32_t> pivot_col;
  uint32_t rank = 0;
  for (uint32_t c = 0; c < cols && rank < rows; ++c) {
    uint32_t pr = rank;
    while (pr < rows && m[pr][c] % p == 0) ++pr;
    if (pr == rows) continue;
    std::swap(m[rank], m[pr]);
    uint32_t inv = mod_inv(m[rank][c] % p, p);
    for (uint32_t j = 0; j < cols; ++j) m[rank][j] = mod_mul(m[rank][j], inv, p);
    for (uint32_t r = 0; r < rows; ++r) {
      if (r == rank || m[r][c] % p == 0) continue;
      uint32_t f = m[r][c] % p;
      for (uint32_t j = 0; j < cols; ++j) m[r][j] = mod_sub(m[r][j], mod_mul(f, m[rank][j], p), p);
    }
    pivot_col.push_back(c);
    ++rank;
  }
  std::vector<std::vector<uint32_t>> basis;
  std::vector<bool> is_pivot(cols, false);
  for (uint32_t c : pivot_col) is_pivot[c] = true;
  for (uint32_t fc = 0; fc < cols; ++fc) {
    if (is_pivot[fc]) continue;
    std::vector<uint32_t> v(cols, 0);
    v[fc] = 1;
    for (uint32_t r = 0; r < rank; ++r) v[pivot_col[r]] = mod_sub(0, m[r][fc], p);
    basis.push_back(std::move(v));
  }
  return basis;
}

}
