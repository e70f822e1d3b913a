#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "jnnf/error.hpp"
#include "jnnf/fp.hpp"
#include "jnnf/hashing.hpp"

namespace jnnf {

// Polynomial arithmetic over F_p truncated at T^k, so T^k = 0. Coefficients
// are stored lowest degree first and kept reduced mod p. Every value carries
// its ring parameters; mixing rings in one operation fails loudly instead of
// silently recycling coefficient vectors of the wrong length.
struct TruncSeries {
  uint32_t p = 0;
  uint32_t k = 0;
  std::vector<uint32_t> c;

  friend auto operator<=>(const TruncSeries&, const TruncSeries&) = default;
};

inline std::size_t hash_value(const TruncSeries& s) {
  std::size_t h = hash_span(s.c.data(), s.c.size());
  hash_mix(h, s.p);
  hash_mix(h, s.k);
  return h;
}

inline void check_same_ring(const TruncSeries& a, const TruncSeries& b) {
  require(a.p == b.p && a.k == b.k, "trunc series: operands live in different rings");
}

inline TruncSeries series_zero(uint32_t p, uint32_t k) {
  require(is_prime(p), "trunc series: p must be prime");
  require(k >= 1, "trunc series: truncation level must be at least 1");
  return {p, k, std::vector<uint32_t>(k, 0)};
}

inline TruncSeries series_const(uint32_t p, uint32_t k, uint32_t a) {
  TruncSeries s = series_zero(p, k);
  s.c[0] = a % p;
  return s;
}

inline TruncSeries series_one(uint32_t p, uint32_t k) { return series_const(p, k, 1); }

// The indeterminate. At k = 1 it truncates to zero.
inline TruncSeries series_t(uint32_t p, uint32_t k) {
  TruncSeries s = series_zero(p, k);
  if (k >= 2) s.c[1] = 1;
  return s;
}

inline TruncSeries series_from_coeffs(uint32_t p, uint32_t k, const std::vector<uint32_t>& coeffs) {
  require(coeffs.size() <= k, "series_from_coeffs: more coefficients than the truncation keeps");
  TruncSeries s = series_zero(p, k);
  for (std::size_t i = 0; i < coeffs.size(); ++i) s.c[i] = coeffs[i] % p;
  return s;
}

inline bool series_is_zero(const TruncSeries& a) {
  for (uint32_t x : a.c)
    if (x) return false;
  return true;
}

// Index of the lowest nonzero coefficient; k for the zero series.
inline uint32_t series_valuation(const TruncSeries& a) {
  for (uint32_t i = 0; i < a.k; ++i)
    if (a.c[i]) return i;
  return a.k;
}

inline TruncSeries series_add(const TruncSeries& a, const TruncSeries& b) {
  check_same_ring(a, b);
  TruncSeries r = a;
  for (uint32_t i = 0; i < a.k; ++i) r.c[i] = mod_add(r.c[i], b.c[i], a.p);
  return r;
}

inline TruncSeries series_neg(const TruncSeries& a) {
  TruncSeries r = a;
  for (uint32_t i = 0; i < a.k; ++i) r.c[i] = mod_sub(0, r.c[i], a.p);
  return r;
}

inline TruncSeries series_sub(const TruncSeries& a, const TruncSeries& b) {
  check_same_ring(a, b);
  TruncSeries r = a;
  for (uint32_t i = 0; i < a.k; ++i) r.c[i] = mod_sub(r.c[i], b.c[i], a.p);
  return r;
}

inline TruncSeries series_scale(const TruncSeries& a, uint32_t s) {
  TruncSeries r = a;
  for (uint32_t i = 0; i < a.k; ++i) r.c[i] = mod_mul(r.c[i], s, a.p);
  return r;
}

inline TruncSeries series_mul(const TruncSeries& a, const TruncSeries& b) {
  check_same_ring(a, b);
  TruncSeries r = series_zero(a.p, a.k);
  for (uint32_t i = 0; i < a.k; ++i) {
    if (!a.c[i]) continue;
    for (uint32_t j = 0; i + j < a.k; ++j)
      r.c[i + j] = mod_add(r.c[i + j], mod_mul(a.c[i], b.c[j], a.p), a.p);
  }
  return r;
}

inline bool series_is_unit(const TruncSeries& a) { return a.c[0] % a.p != 0; }

// Multiplicative inverse of a unit, solving u * v = 1 degree by degree.
inline TruncSeries series_inverse(const TruncSeries& u) {
  require(series_is_unit(u), "series_inverse: constant term is zero");
  TruncSeries v = series_zero(u.p, u.k);
  uint32_t c0 = mod_inv(u.c[0], u.p);
  v.c[0] = c0;
  for (uint32_t j = 1; j < u.k; ++j) {
    uint32_t acc = 0;
    for (uint32_t i = 1; i <= j; ++i) acc = mod_add(acc, mod_mul(u.c[i], v.c[j - i], u.p), u.p);
    v.c[j] = mod_mul(mod_sub(0, acc, u.p), c0, u.p);
  }
  return v;
}

// f(g(T)). The substituted series must have zero constant term, otherwise
// every coefficient of f would contribute to every output degree and the
// truncation would not be well defined.
inline TruncSeries series_substitute(const TruncSeries& f, const TruncSeries& g) {
  check_same_ring(f, g);
  require(g.c[0] % g.p == 0, "series_substitute: substituted series needs zero constant term");
  TruncSeries r = series_const(f.p, f.k, f.c[0]);
  TruncSeries gp = series_one(f.p, f.k);
  for (uint32_t i = 1; i < f.k; ++i) {
    gp = series_mul(gp, g);
    if (series_is_zero(gp)) break;
    if (f.c[i]) r = series_add(r, series_scale(gp, f.c[i]));
  }
  return r;
}

// Compositional inverse of f = c1 T + ... with c1 a unit: the unique g with
// f(g(T)) = T (and then also g(f(T)) = T). Solved degree by degree: once g is
// correct below degree m, the T^m coefficient of f(g) responds to g.c[m] only
// through the linear term of f.
inline TruncSeries series_reversion(const TruncSeries& f) {
  require(f.c[0] % f.p == 0, "series_reversion: constant term must vanish");
  if (f.k == 1) return series_zero(f.p, f.k);
  require(f.c[1] % f.p != 0, "series_reversion: linear coefficient must be a unit");
  TruncSeries g = series_zero(f.p, f.k);
  uint32_t c1inv = mod_inv(f.c[1], f.p);
  g.c[1] = c1inv;
  for (uint32_t m = 2; m < f.k; ++m) {
    TruncSeries h = series_substitute(f, g);
    g.c[m] = mod_sub(g.c[m], mod_mul(h.c[m], c1inv, f.p), f.p);
  }
  return g;
}

// Order of f under substitution composition, for f = T + higher terms. Those
// series form a finite p-group at any truncation level, but a bound guards
// against a malformed argument looping forever.
inline uint32_t substitution_order(const TruncSeries& f, uint32_t bound = 100000) {
  require(f.c[0] % f.p == 0 && (f.k < 2 || f.c[1] % f.p == 1),
          "substitution_order: series must be T + higher terms");
  TruncSeries t = series_t(f.p, f.k);
  TruncSeries x = f;
  uint32_t ord = 1;
  while (!(x == t)) {
    x = series_substitute(x, f);
    ++ord;
    require(ord <= bound, "substitution_order: bound exceeded");
  }
  return ord;
}

// First series T + higher terms (coefficients enumerated lowest degree first)
// whose substitution order is exactly the one asked for. The candidate space
// has p^(k-2) elements, so this is for small levels only.
inline std::optional<TruncSeries> find_substitution_of_order(uint32_t p, uint32_t k,
                                                             uint32_t order) {
  TruncSeries f = series_t(p, k);
  if (k <= 2) {
    if (substitution_order(f) == order) return f;
    return std::nullopt;
  }
  uint64_t candidates = 1;
  for (uint32_t i = 2; i < k; ++i) {
    candidates *= p;
    require(candidates <= 100000, "find_substitution_of_order: candidate space too large");
  }
  std::vector<uint32_t> digits(k - 2, 0);
  for (uint64_t c = 0; c < candidates; ++c) {
    for (uint32_t i = 0; i < k - 2; ++i) f.c[i + 2] = digits[i];
    if (substitution_order(f) == order) return f;
    for (uint32_t i = 0; i < k - 2; ++i) {
      if (++digits[i] < p) break;
      digits[i] = 0;
    }
  }
  return std::nullopt;
}

}
