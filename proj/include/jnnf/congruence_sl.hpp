#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jnnf/enumerated_group.hpp"
#include "jnnf/error.hpp"
#include "jnnf/fp.hpp"
#include "jnnf/group_concepts.hpp"
#include "jnnf/group_kernel.hpp"
#include "jnnf/trunc_series.hpp"

namespace jnnf {

// Matrices over the truncated ring F_p[T]/(T^k), row-major. Comparison and
// hashing are coefficientwise, so these serve directly as group elements.
struct SeriesMatrix {
  uint32_t n = 0;
  std::vector<TruncSeries> e;

  const TruncSeries& at(uint32_t i, uint32_t j) const { return e[i * n + j]; }
  TruncSeries& at(uint32_t i, uint32_t j) { return e[i * n + j]; }

  friend auto operator<=>(const SeriesMatrix&, const SeriesMatrix&) = default;
};

inline std::size_t hash_value(const SeriesMatrix& m) {
  std::size_t h = hash_value(m.n);
  for (const auto& s : m.e) hash_mix(h, hash_value(s));
  return h;
}

inline SeriesMatrix matrix_identity(uint32_t n, uint32_t p, uint32_t k) {
  SeriesMatrix m{n, std::vector<TruncSeries>(static_cast<std::size_t>(n) * n, series_zero(p, k))};
  for (uint32_t i = 0; i < n; ++i) m.at(i, i) = series_one(p, k);
  return m;
}

inline SeriesMatrix matrix_mul(const SeriesMatrix& a, const SeriesMatrix& b) {
  require(a.n == b.n, "matrix_mul: size mismatch");
  SeriesMatrix r = a;
  for (uint32_t i = 0; i < a.n; ++i)
    for (uint32_t j = 0; j < a.n; ++j) {
      TruncSeries acc = series_mul(a.at(i, 0), b.at(0, j));
      for (uint32_t l = 1; l < a.n; ++l)
        acc = series_add(acc, series_mul(a.at(i, l), b.at(l, j)));
      r.at(i, j) = std::move(acc);
    }
  return r;
}

// Determinant by cofactor expansion along the first row. Exponential in n,
// which is fine at the dimensions the enumeration bound admits.
inline TruncSeries matrix_det(const SeriesMatrix& m) {
  require(m.n >= 1, "matrix_det: empty matrix");
  if (m.n == 1) return m.e[0];
  const TruncSeries zero = series_zero(m.e[0].p, m.e[0].k);
  TruncSeries det = zero;
  for (uint32_t j = 0; j < m.n; ++j) {
    if (series_is_zero(m.at(0, j))) continue;
    SeriesMatrix minor{m.n - 1, {}};
    minor.e.reserve(static_cast<std::size_t>(m.n - 1) * (m.n - 1));
    for (uint32_t r = 1; r < m.n; ++r)
      for (uint32_t c = 0; c < m.n; ++c)
        if (c != j) minor.e.push_back(m.at(r, c));
    TruncSeries term = series_mul(m.at(0, j), matrix_det(minor));
    det = (j % 2 == 0) ? series_add(det, term) : series_sub(det, term);
  }
  return det;
}

// How deep the matrix agrees with the identity: the largest d <= k with
// m = 1 mod T^d. The identity reports k; anything not = 1 mod T reports 0.
inline uint32_t congruence_depth(const SeriesMatrix& m) {
  const uint32_t p = m.e[0].p, k = m.e[0].k;
  uint32_t depth = k;
  for (uint32_t i = 0; i < m.n && depth > 0; ++i)
    for (uint32_t j = 0; j < m.n && depth > 0; ++j) {
      TruncSeries d = m.at(i, j);
      if (i == j) d = series_sub(d, series_one(p, k));
      uint32_t v = series_valuation(d);
      if (v < depth) depth = v;
    }
  return depth;
}

// Inverse of a matrix congruent to the identity: m = 1 - N with N supported
// in degrees >= 1, so the geometric series for the inverse terminates after
// k terms.
inline SeriesMatrix matrix_inv_congruent(const SeriesMatrix& m) {
  require(congruence_depth(m) >= 1, "matrix_inv_congruent: matrix is not 1 mod T");
  const uint32_t p = m.e[0].p, k = m.e[0].k;
  SeriesMatrix id = matrix_identity(m.n, p, k);
  SeriesMatrix nil = id;
  for (std::size_t i = 0; i < nil.e.size(); ++i) nil.e[i] = series_sub(id.e[i], m.e[i]);
  SeriesMatrix inv = id, pw = id;
  for (uint32_t j = 1; j < k; ++j) {
    pw = matrix_mul(pw, nil);
    for (std::size_t i = 0; i < inv.e.size(); ++i) inv.e[i] = series_add(inv.e[i], pw.e[i]);
  }
  return inv;
}

// Entrywise substitution T -> f. For f with zero constant term this is a ring
// endomorphism applied to every entry, so it commutes with matrix products
// and determinants by construction; callers that need the automorphism case
// check the shape of f themselves.
inline SeriesMatrix matrix_substitute(const SeriesMatrix& m, const TruncSeries& f) {
  SeriesMatrix r = m;
  for (auto& entry : r.e) entry = series_substitute(entry, f);
  return r;
}

// p^((n^2 - 1)(k - 1)), the order of the principal congruence subgroup of
// SL_n over F_p[T]/(T^k).
inline uint64_t congruence_order_target(uint32_t n, uint32_t p, uint32_t k) {
  uint64_t exp = (static_cast<uint64_t>(n) * n - 1) * (k - 1);
  uint64_t r = 1;
  for (uint64_t i = 0; i < exp; ++i) {
    require(r <= UINT64_MAX / p, "congruence_order_target: order overflows");
    r *= p;
  }
  return r;
}

// Group backend for the principal congruence subgroup: determinant-1 matrices
// over F_p[T]/(T^k) congruent to the identity mod T. Generated by the
// transvections 1 + T e_ij together with the det-1 diagonal matrices
// diag(.., 1+T, (1+T)^{-1}, ..); those span the first congruence quotient, so
// a Frattini argument says they generate everything, but enumeration compares
// the closure order against the formula rather than trusting that.
class CongruenceSL {
 public:
  using element_type = SeriesMatrix;

  CongruenceSL(uint32_t n, uint32_t p, uint32_t k) : n_(n), p_(p), k_(k) {
    require(n >= 2, "congruence group: n must be at least 2");
    require(is_prime(p), "congruence group: p must be prime");
    require(k >= 1, "congruence group: truncation level must be at least 1");
    require(n % p != 0, "congruence group: p divides n");
    const TruncSeries t = series_t(p, k);
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = 0; j < n; ++j) {
        if (i == j) continue;
        SeriesMatrix g = matrix_identity(n, p, k);
        g.at(i, j) = t;
        gens_.push_back(std::move(g));
      }
    const TruncSeries one_plus_t = series_add(series_one(p, k), t);
    for (uint32_t i = 0; i + 1 < n; ++i) {
      SeriesMatrix g = matrix_identity(n, p, k);
      g.at(i, i) = one_plus_t;
      g.at(i + 1, i + 1) = series_inverse(one_plus_t);
      gens_.push_back(std::move(g));
    }
    const TruncSeries one = series_one(p, k);
    for (const auto& g : gens_)
      require(matrix_det(g) == one, "congruence group: generator has determinant != 1");
  }

  uint32_t n() const { return n_; }
  uint32_t p() const { return p_; }
  uint32_t k() const { return k_; }
  uint64_t target_order() const { return congruence_order_target(n_, p_, k_); }

  element_type identity() const { return matrix_identity(n_, p_, k_); }
  element_type mul(const element_type& a, const element_type& b) const { return matrix_mul(a, b); }
  element_type inv(const element_type& a) const { return matrix_inv_congruent(a); }
  const std::vector<element_type>& generators() const { return gens_; }

 private:
  uint32_t n_, p_, k_;
  std::vector<element_type> gens_;
};

// Enumerates the congruence group and checks the generators actually reach
// the order formula. The default bound is deliberately tighter than the
// global enumeration limit; these elements are heavier than permutations.
inline Enumerated<CongruenceSL> enumerate_congruence_sl(uint32_t n, uint32_t p, uint32_t k,
                                                        uint64_t bound = 1'000'000) {
  CongruenceSL base(n, p, k);
  uint64_t target = base.target_order();
  if (target > bound)
    throw bound_error("congruence group: order " + std::to_string(target) +
                      " exceeds the enumeration bound " + std::to_string(bound));
  Enumerated<CongruenceSL> E(std::move(base), bound);
  require(E.size() == target, "congruence group: generators fell short of the order formula");
  return E;
}

// The congruence filtration G_1 >= G_2 >= ... >= G_k, where G_d collects the
// elements congruent to the identity mod T^d. G_1 is the whole group and G_k
// is trivial, the ring being truncated at T^k.
inline std::vector<Subgroup> congruence_filtration(const Enumerated<CongruenceSL>& E) {
  const uint32_t k = E.backend().k();
  std::vector<Subgroup> filt{full_subgroup(E)};
  for (uint32_t d = 2; d <= k; ++d) {
    Bitset mask(E.size());
    for (uint32_t i = 0; i < E.size(); ++i)
      if (congruence_depth(E.element(i)) >= d) mask.set(i);
    filt.push_back(subgroup_from_elements(E, mask));
  }
  return filt;
}

struct FiltrationComparison {
  std::vector<uint64_t> congruence_orders;
  std::vector<uint64_t> lcs_orders;
  bool match = false;
  std::optional<uint32_t> first_mismatch;  // 1-based series index
  std::optional<uint32_t> witness;         // element index in the symmetric difference
};

// Compares the lower central series against the congruence filtration term by
// term. The enumerated group is already the level-k quotient, so gamma_i(G)
// and G_i can be intersected as subgroups of one ambient enumeration.
inline FiltrationComparison verify_lcs_equals_congruence(const Enumerated<CongruenceSL>& E,
                                                         const std::vector<Subgroup>& filt) {
  FiltrationComparison out;
  std::vector<Subgroup> series = lower_central_series(E, full_subgroup(E));
  out.match = true;
  for (std::size_t i = 0; i < filt.size(); ++i) {
    const Subgroup& gamma_i = i < series.size() ? series[i] : series.back();
    out.congruence_orders.push_back(filt[i].order);
    out.lcs_orders.push_back(gamma_i.order);
    if (out.match && !(gamma_i.mask == filt[i].mask)) {
      out.match = false;
      out.first_mismatch = static_cast<uint32_t>(i + 1);
      for (uint32_t x = 0; x < E.size(); ++x)
        if (gamma_i.mask.get(x) != filt[i].mask.get(x)) {
          out.witness = x;
          break;
        }
    }
  }
  return out;
}

struct GradedQuotientReport {
  std::vector<uint64_t> layer_orders;  // |G_i / G_{i+1}| for i = 1 .. k-1
  bool uniform_order = false;          // every layer has order p^(n^2 - 1)
  bool exponent_p = false;             // g^p drops one layer down, every element
  bool layers_abelian = false;         // [G_i, G_i] <= G_{i+1}
  uint32_t rank = 0;                   // log_p of the common layer order
  bool ok = false;
};

template <GroupBackend G>
uint32_t index_power(const Enumerated<G>& E, uint32_t g, uint32_t e) {
  uint32_t r = E.identity_index();
  for (uint32_t i = 0; i < e; ++i) r = E.mul(r, g);
  return r;
}

// Checks every successive quotient G_i/G_{i+1} of the filtration is
// elementary abelian of the same rank: orders agree with p^(n^2 - 1), p-th
// powers of all elements drop a layer, commutators of consecutive terms drop
// a layer. Power checks run over every element; the groups here are small.
inline GradedQuotientReport graded_quotients(const Enumerated<CongruenceSL>& E,
                                             const std::vector<Subgroup>& filt) {
  const uint32_t n = E.backend().n(), p = E.backend().p();
  GradedQuotientReport out;
  uint64_t expected = 1;
  for (uint32_t i = 0; i < n * n - 1; ++i) expected *= p;
  out.uniform_order = true;
  out.exponent_p = true;
  out.layers_abelian = true;
  for (std::size_t i = 0; i + 1 < filt.size(); ++i) {
    require(filt[i + 1].subset_of(filt[i]), "graded_quotients: filtration is not descending");
    out.layer_orders.push_back(filt[i].order / filt[i + 1].order);
    if (out.layer_orders.back() != expected) out.uniform_order = false;
    for (uint32_t x : filt[i].elements())
      if (!filt[i + 1].contains(index_power(E, x, p))) {
        out.exponent_p = false;
        break;
      }
    if (!commutator_subgroup(E, filt[i], filt[i]).subset_of(filt[i + 1]))
      out.layers_abelian = false;
  }
  if (out.uniform_order) {
    uint64_t o = out.layer_orders.empty() ? 1 : out.layer_orders[0];
    while (o > 1) {
      o /= p;
      ++out.rank;
    }
  }
  out.ok = out.uniform_order && out.exponent_p && out.layers_abelian;
  return out;
}

struct SubstitutionActionReport {
  bool preserves_membership = false;  // image of every element lies in the group
  bool determinant_one = false;       // generator images keep determinant 1
  bool congruent_mod_t = false;       // generator images stay = 1 mod T
  bool hom_on_generator_pairs = false;
  uint32_t pairs_checked = 0;
  bool inverse_recovers = false;      // the reversion undoes it on every element
  uint32_t elements_moved = 0;        // how many elements the action displaces
  bool ok = false;
};

// Entrywise substitution T -> f as a candidate automorphism of the enumerated
// congruence group. f must be T + higher terms. Membership and the inverse
// roundtrip are checked on every element; multiplicativity on every ordered
// generator pair.
inline SubstitutionActionReport verify_substitution_action(const Enumerated<CongruenceSL>& E,
                                                           const TruncSeries& f) {
  const CongruenceSL& base = E.backend();
  require(f.p == base.p() && f.k == base.k(), "substitution action: series ring mismatch");
  require(f.c[0] % f.p == 0 && (f.k < 2 || f.c[1] % f.p == 1),
          "substitution action: series must be T + higher terms");
  SubstitutionActionReport out;
  const TruncSeries rev = series_reversion(f);
  out.preserves_membership = true;
  out.inverse_recovers = true;
  for (uint32_t i = 0; i < E.size(); ++i) {
    SeriesMatrix img = matrix_substitute(E.element(i), f);
    if (!E.contains_element(img)) {
      out.preserves_membership = false;
      break;
    }
    if (!(img == E.element(i))) ++out.elements_moved;
    if (!(matrix_substitute(img, rev) == E.element(i))) {
      out.inverse_recovers = false;
      break;
    }
  }
  const TruncSeries one = series_one(f.p, f.k);
  out.determinant_one = true;
  out.congruent_mod_t = true;
  out.hom_on_generator_pairs = true;
  for (uint32_t g : E.generator_indices()) {
    SeriesMatrix img = matrix_substitute(E.element(g), f);
    if (!(matrix_det(img) == one)) out.determinant_one = false;
    if (congruence_depth(img) < 1) out.congruent_mod_t = false;
    for (uint32_t h : E.generator_indices()) {
      SeriesMatrix lhs = matrix_substitute(matrix_mul(E.element(g), E.element(h)), f);
      SeriesMatrix rhs = matrix_mul(img, matrix_substitute(E.element(h), f));
      if (!(lhs == rhs)) out.hom_on_generator_pairs = false;
      ++out.pairs_checked;
    }
  }
  out.ok = out.preserves_membership && out.determinant_one && out.congruent_mod_t &&
           out.hom_on_generator_pairs && out.inverse_recovers;
  return out;
}

struct ConjugatorSearch {
  std::optional<uint32_t> witness;  // element index h with g^h = image(g) on all generators
  uint64_t candidates = 0;
};

// Exhaustive search for an inner conjugator matching the prescribed generator
// images. Agreement on generators settles the whole group, both maps being
// homomorphisms. Candidates are scanned in canonical element order, so the
// first witness is deterministic.
inline ConjugatorSearch inner_conjugator_search(const Enumerated<CongruenceSL>& E,
                                                const std::vector<SeriesMatrix>& gen_images) {
  const std::vector<uint32_t>& gens = E.generator_indices();
  require(gen_images.size() == gens.size(),
          "inner_conjugator_search: need one image per generator");
  std::vector<uint32_t> target;
  target.reserve(gen_images.size());
  for (const auto& img : gen_images) target.push_back(E.index_of(img));
  ConjugatorSearch out;
  for (uint32_t h = 0; h < E.size(); ++h) {
    ++out.candidates;
    bool all = true;
    for (std::size_t t = 0; t < gens.size() && all; ++t)
      all = E.conj(gens[t], h) == target[t];
    if (all) {
      out.witness = h;
      return out;
    }
  }
  return out;
}

inline ConjugatorSearch inner_conjugator_search(const Enumerated<CongruenceSL>& E,
                                                const TruncSeries& f) {
  std::vector<SeriesMatrix> images;
  for (uint32_t g : E.generator_indices())
    images.push_back(matrix_substitute(E.element(g), f));
  return inner_conjugator_search(E, images);
}

// Matrix part plus an index into the extension's substitution table.
struct TwistedElement {
  SeriesMatrix m;
  uint32_t twist = 0;

  friend auto operator<=>(const TwistedElement&, const TwistedElement&) = default;
};

inline std::size_t hash_value(const TwistedElement& t) {
  std::size_t h = hash_value(t.m);
  hash_mix(h, t.twist);
  return h;
}

// Extension of a congruence group by a finite group of substitutions: pairs
// (m, s) with s drawn from the closure of the given series under composition,
// multiplying by the right action m^s = m(T -> f_s):
//
//   (m1, s1) (m2, s2) = (m1 * m2^(s1^-1), s1 s2)
//
// where s1 s2 is "apply f_{s1}, then f_{s2}". The substitution table keeps
// index 0 for the identity series T.
class TwistedCongruenceSL {
 public:
  using element_type = TwistedElement;

  TwistedCongruenceSL(CongruenceSL base, const std::vector<TruncSeries>& twists)
      : base_(std::move(base)) {
    const uint32_t p = base_.p(), k = base_.k();
    subs_.push_back(series_t(p, k));
    std::vector<uint32_t> seeds;
    for (const TruncSeries& f : twists) {
      require(f.p == p && f.k == k, "twisted extension: twist ring mismatch");
      require(f.c[0] % p == 0 && (k < 2 || f.c[1] % p == 1),
              "twisted extension: twists must be T + higher terms");
      seeds.push_back(intern(f));
    }
    for (bool grew = true; grew;) {
      grew = false;
      const std::size_t sz = subs_.size();
      for (std::size_t i = 0; i < sz; ++i)
        for (std::size_t j = 0; j < sz; ++j) {
          const std::size_t before = subs_.size();
          intern(series_substitute(subs_[i], subs_[j]));
          if (subs_.size() != before) grew = true;
          require(subs_.size() <= 4096, "twisted extension: substitution closure too large");
        }
    }
    comp_.assign(subs_.size(), std::vector<uint32_t>(subs_.size(), 0));
    inv_.assign(subs_.size(), 0);
    for (uint32_t i = 0; i < subs_.size(); ++i) {
      for (uint32_t j = 0; j < subs_.size(); ++j)
        comp_[i][j] = find(series_substitute(subs_[i], subs_[j]));
      inv_[i] = find(series_reversion(subs_[i]));
    }
    gens_.reserve(base_.generators().size() + seeds.size());
    for (const auto& g : base_.generators()) gens_.push_back({g, 0});
    for (uint32_t s : seeds)
      if (s != 0) gens_.push_back({matrix_identity(base_.n(), p, k), s});
  }

  const CongruenceSL& base() const { return base_; }
  uint32_t substitution_count() const { return static_cast<uint32_t>(subs_.size()); }
  const TruncSeries& substitution(uint32_t i) const { return subs_[i]; }

  element_type identity() const { return {base_.identity(), 0}; }

  element_type mul(const element_type& a, const element_type& b) const {
    return {matrix_mul(a.m, matrix_substitute(b.m, subs_[inv_[a.twist]])),
            comp_[a.twist][b.twist]};
  }

  element_type inv(const element_type& a) const {
    return {matrix_substitute(matrix_inv_congruent(a.m), subs_[a.twist]), inv_[a.twist]};
  }

  const std::vector<element_type>& generators() const { return gens_; }

 private:
  uint32_t intern(const TruncSeries& f) {
    for (uint32_t i = 0; i < subs_.size(); ++i)
      if (subs_[i] == f) return i;
    subs_.push_back(f);
    return static_cast<uint32_t>(subs_.size() - 1);
  }

  uint32_t find(const TruncSeries& f) const {
    for (uint32_t i = 0; i < subs_.size(); ++i)
      if (subs_[i] == f) return i;
    throw error("twisted extension: substitution table is not closed");
  }

  CongruenceSL base_;
  std::vector<TruncSeries> subs_;
  std::vector<std::vector<uint32_t>> comp_;
  std::vector<uint32_t> inv_;
  std::vector<element_type> gens_;
};

// Enumerates the twisted extension and checks its order is exactly
// |G| * |substitution closure|, which pins both that every twist stabilizes
// the group and that no product escaped the table.
inline Enumerated<TwistedCongruenceSL> enumerate_twisted_congruence_sl(
    uint32_t n, uint32_t p, uint32_t k, const std::vector<TruncSeries>& twists,
    uint64_t bound = 1'000'000) {
  CongruenceSL base(n, p, k);
  uint64_t target = base.target_order();
  TwistedCongruenceSL ext(std::move(base), twists);
  target *= ext.substitution_count();
  if (target > bound)
    throw bound_error("twisted extension: order " + std::to_string(target) +
                      " exceeds the enumeration bound " + std::to_string(bound));
  Enumerated<TwistedCongruenceSL> E(std::move(ext), bound);
  require(E.size() == target, "twisted extension: order differs from |G| * |substitutions|");
  return E;
}

}
