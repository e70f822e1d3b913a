#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "jnnf/error.hpp"
#include "jnnf/fp.hpp"
#include "jnnf/perm_group.hpp"
#include "jnnf/permutation.hpp"

namespace jnnf {

// Named permutation groups used across the test corpus and the CLI. Degrees
// and generator choices are fixed so enumeration orders (and hence canonical
// subgroup masks) are stable.

inline PermGroup symmetric_group(uint32_t n) {
  require(n >= 1, "symmetric_group: degree must be positive");
  if (n == 1) return PermGroup(1, {});
  std::vector<uint32_t> cyc(n);
  for (uint32_t i = 0; i < n; ++i) cyc[i] = i;
  if (n == 2) return PermGroup(2, {Permutation::from_cycles(2, {{0, 1}})});
  return PermGroup(n, {Permutation::from_cycles(n, {{0, 1}}), Permutation::from_cycles(n, {cyc})});
}

inline PermGroup alternating_group(uint32_t n) {
  require(n >= 3, "alternating_group: degree must be at least 3");
  Permutation t = Permutation::from_cycles(n, {{0, 1, 2}});
  if (n == 3) return PermGroup(3, {t});
  std::vector<uint32_t> cyc;
  for (uint32_t i = (n % 2 == 0) ? 1 : 0; i < n; ++i) cyc.push_back(i);
  return PermGroup(n, {t, Permutation::from_cycles(n, {cyc})});
}

inline PermGroup cyclic_group(uint32_t n) {
  require(n >= 1, "cyclic_group: order must be positive");
  if (n == 1) return PermGroup(1, {});
  std::vector<uint32_t> cyc(n);
  for (uint32_t i = 0; i < n; ++i) cyc[i] = i;
  return PermGroup(n, {Permutation::from_cycles(n, {cyc})});
}

// Order 2n, acting on the n-gon.
inline PermGroup dihedral_group(uint32_t n) {
  require(n >= 3, "dihedral_group: need at least a triangle");
  std::vector<uint32_t> rot(n), ref(n);
  for (uint32_t i = 0; i < n; ++i) {
    rot[i] = (i + 1) % n;
    ref[i] = (n - i) % n;
  }
  return PermGroup(n, {Permutation(rot), Permutation(ref)});
}

// Q8 in its regular representation on {1,-1,i,-i,j,-j,k,-k}.
inline PermGroup quaternion_group() {
  Permutation right_i({2, 3, 1, 0, 7, 6, 4, 5});
  Permutation right_j({4, 5, 6, 7, 1, 0, 3, 2});
  return PermGroup(8, {right_i, right_j});
}

// SL(2,p) acting on the p^2-1 nonzero row vectors of F_p^2 by right
// multiplication; vectors in lexicographic order.
inline PermGroup special_linear_2(uint32_t p) {
  require(is_prime(p), "special_linear_2: p must be prime");
  uint32_t deg = p * p - 1;
  auto point = [&](uint32_t x, uint32_t y) -> uint32_t {
    uint32_t idx = x * p + y;
    return idx - 1;  // (0,0) is excluded and sorts first
  };
  auto perm_of = [&](uint32_t a, uint32_t b, uint32_t c, uint32_t d) {
    std::vector<uint32_t> img(deg);
    for (uint32_t x = 0; x < p; ++x)
      for (uint32_t y = 0; y < p; ++y) {
        if (x == 0 && y == 0) continue;
        uint32_t nx = (x * a + y * c) % p;
        uint32_t ny = (x * b + y * d) % p;
        img[point(x, y)] = point(nx, ny);
      }
    return Permutation(img);
  };
  return PermGroup(deg, {perm_of(1, 1, 0, 1), perm_of(1, 0, 1, 1)});
}

// PSL(2,7) on the projective line: points 0..6 are the field, 7 is infinity.
inline PermGroup psl_2_7() {
  std::vector<uint32_t> shift{1, 2, 3, 4, 5, 6, 0, 7};          // x -> x+1
  std::vector<uint32_t> neg_inv{7, 6, 3, 2, 5, 4, 1, 0};        // x -> -1/x
  return PermGroup(8, {Permutation(shift), Permutation(neg_inv)});
}

inline PermGroup direct_product(const PermGroup& a, const PermGroup& b) {
  uint32_t da = a.degree(), db = b.degree();
  std::vector<Permutation> gens;
  for (const auto& g : a.generators()) {
    std::vector<uint32_t> img(da + db);
    for (uint32_t i = 0; i < da; ++i) img[i] = g[i];
    for (uint32_t i = 0; i < db; ++i) img[da + i] = da + i;
    gens.emplace_back(img);
  }
  for (const auto& g : b.generators()) {
    std::vector<uint32_t> img(da + db);
    for (uint32_t i = 0; i < da; ++i) img[i] = i;
    for (uint32_t i = 0; i < db; ++i) img[da + i] = da + g[i];
    gens.emplace_back(img);
  }
  return PermGroup(da + db, gens);
}

// X wr H in the imprimitive action on degree(X) * degree(H) points, blocks
// {0..d-1}, {d..2d-1}, ... The top group must be transitive, otherwise the
// generators below reach only part of the base.
inline PermGroup wreath_imprimitive(const PermGroup& x, const PermGroup& h) {
  require(h.is_transitive(), "wreath_imprimitive: top group must be transitive");
  uint32_t d = x.degree(), m = h.degree();
  std::vector<Permutation> gens;
  for (const auto& g : x.generators()) {
    std::vector<uint32_t> img(d * m);
    for (uint32_t i = 0; i < d * m; ++i) img[i] = i;
    for (uint32_t i = 0; i < d; ++i) img[i] = g[i];
    gens.emplace_back(img);
  }
  for (const auto& g : h.generators()) {
    std::vector<uint32_t> img(d * m);
    for (uint32_t w = 0; w < m; ++w)
      for (uint32_t i = 0; i < d; ++i) img[i + d * w] = i + d * g[w];
    gens.emplace_back(img);
  }
  return PermGroup(d * m, gens);
}

// Lookup by the names accepted in configs and on the command line.
inline PermGroup group_by_name(const std::string& name) {
  if (name.size() >= 2 && (name[0] == 'S' || name[0] == 'A' || name[0] == 'C' || name[0] == 'D')) {
    bool numeric = true;
    for (std::size_t i = 1; i < name.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(name[i]))) numeric = false;
    if (numeric) {
      uint32_t n = static_cast<uint32_t>(std::stoul(name.substr(1)));
      switch (name[0]) {
        case 'S': return symmetric_group(n);
        case 'A': return alternating_group(n);
        case 'C': return cyclic_group(n);
        case 'D': return dihedral_group(n);
      }
    }
  }
  if (name == "Q8") return quaternion_group();
  if (name == "SL2_3") return special_linear_2(3);
  if (name == "SL2_5") return special_linear_2(5);
  if (name == "PSL2_7") return psl_2_7();
  if (name == "S3xS3") return direct_product(symmetric_group(3), symmetric_group(3));
  if (name == "C3wrC3") return wreath_imprimitive(cyclic_group(3), cyclic_group(3));
  if (name == "A5wrC2") return wreath_imprimitive(alternating_group(5), cyclic_group(2));
  if (name == "A5wrS3") return wreath_imprimitive(alternating_group(5), symmetric_group(3));
  throw error("group_by_name: unknown group '" + name + "'");
}

}
