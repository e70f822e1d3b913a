#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "jnnf/enumerated_group.hpp"
#include "jnnf/error.hpp"
#include "jnnf/group_concepts.hpp"

namespace jnnf {

// Lattice and series computations on enumerated groups. Subgroups are index
// sets of a fixed ambient enumeration; "U" arguments let every operation run
// relative to a subgroup acting as the whole group, which is how quotient-free
// recursion into subgroups works throughout.

template <GroupBackend G>
Subgroup conjugate_subgroup(const Enumerated<G>& E, const Subgroup& s, uint32_t g) {
  Subgroup r;
  r.mask = Bitset(E.size());
  for (uint32_t i : s.elements()) r.mask.set(E.conj(i, g));
  for (uint32_t x : s.gens) r.gens.push_back(E.conj(x, g));
  r.order = s.order;
  return r;
}

// Conjugacy classes of U (under U-conjugation), ordered by least representative.
template <GroupBackend G>
std::vector<std::vector<uint32_t>> conjugacy_classes(const Enumerated<G>& E, const Subgroup& u) {
  std::vector<std::vector<uint32_t>> classes;
  Bitset seen(E.size());
  for (uint32_t rep : u.elements()) {
    if (seen.get(rep)) continue;
    std::vector<uint32_t> cls{rep};
    seen.set(rep);
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (uint32_t g : u.gens) {
        uint32_t c = E.conj(cls[i], g);
        if (!seen.get(c)) {
          seen.set(c);
          cls.push_back(c);
        }
      }
    std::sort(cls.begin(), cls.end());
    classes.push_back(std::move(cls));
  }
  return classes;
}

// Smallest subgroup containing the seeds that is closed under conjugation by
// the given actor generators (the actors themselves need not lie inside it).
template <GroupBackend G>
Subgroup invariant_closure(const Enumerated<G>& E, const std::vector<uint32_t>& actor_gens,
                           std::vector<uint32_t> seeds) {
  for (;;) {
    Subgroup s = closure(E, seeds);
    bool grew = false;
    for (uint32_t x : s.gens)
      for (uint32_t a : actor_gens) {
        uint32_t c = E.conj(x, a);
        if (!s.mask.get(c)) {
          seeds.push_back(c);
          grew = true;
        }
      }
    if (!grew) return s;
  }
}

template <GroupBackend G>
Subgroup normal_closure_in(const Enumerated<G>& E, const Subgroup& u,
                           const std::vector<uint32_t>& seeds) {
  for (uint32_t x : seeds) require(u.contains(x), "normal_closure_in: seed outside the group");
  return invariant_closure(E, u.gens, seeds);
}

template <GroupBackend G>
Subgroup join(const Enumerated<G>& E, const Subgroup& a, const Subgroup& b) {
  if (b.subset_of(a)) return a;
  if (a.subset_of(b)) return b;
  std::vector<uint32_t> gens = a.gens;
  gens.insert(gens.end(), b.gens.begin(), b.gens.end());
  return closure(E, gens);
}

template <GroupBackend G>
Subgroup intersection(const Enumerated<G>& E, const Subgroup& a, const Subgroup& b) {
  Subgroup r;
  r.mask = a.mask & b.mask;
  r.order = r.mask.count();
  // Every element doubles as a generator; shrink only if somebody serializes.
  for (uint32_t i : r.mask.indices())
    if (i != E.identity_index()) r.gens.push_back(i);
  return r;
}

// Subgroup from an explicit element set; verifies closure and picks a greedy
// generating set.
template <GroupBackend G>
Subgroup subgroup_from_elements(const Enumerated<G>& E, const Bitset& mask) {
  Subgroup s;
  s.mask = Bitset(E.size());
  s.mask.set(E.identity_index());
  s.order = 1;
  for (uint32_t i : mask.indices()) {
    if (s.mask.get(i)) continue;
    s.gens.push_back(i);
    s = closure(E, s.gens);
  }
  require(s.mask == mask, "subgroup_from_elements: element set is not closed");
  return s;
}

// [a, b] for mutually normalizing subgroups: generated by generator
// commutators, closed under conjugation by the generators of both.
template <GroupBackend G>
Subgroup commutator_subgroup(const Enumerated<G>& E, const Subgroup& a, const Subgroup& b) {
  for (uint32_t x : a.gens)
    for (uint32_t g : b.gens)
      require(a.contains(E.conj(x, g)), "commutator_subgroup: subgroups do not normalize each other");
  for (uint32_t x : b.gens)
    for (uint32_t g : a.gens)
      require(b.contains(E.conj(x, g)), "commutator_subgroup: subgroups do not normalize each other");
  std::vector<uint32_t> seeds;
  for (uint32_t x : a.gens)
    for (uint32_t y : b.gens) seeds.push_back(E.comm(x, y));
  std::vector<uint32_t> actors = a.gens;
  actors.insert(actors.end(), b.gens.begin(), b.gens.end());
  return invariant_closure(E, actors, std::move(seeds));
}

// Test-oracle variant: the subgroup generated by every elementwise commutator.
template <GroupBackend G>
Subgroup commutator_subgroup_brute(const Enumerated<G>& E, const Subgroup& a, const Subgroup& b) {
  std::vector<uint32_t> seeds;
  Bitset seen(E.size());
  for (uint32_t x : a.elements())
    for (uint32_t y : b.elements()) {
      uint32_t c = E.comm(x, y);
      if (!seen.get(c)) {
        seen.set(c);
        seeds.push_back(c);
      }
    }
  return closure(E, seeds);
}

// Lower central series of U: gamma_1 = U, gamma_{i+1} = [gamma_i, U], until it
// stabilizes. The stable tail is returned once (so series.back() repeats
// nothing).
template <GroupBackend G>
std::vector<Subgroup> lower_central_series(const Enumerated<G>& E, const Subgroup& u) {
  std::vector<Subgroup> series{u};
  for (;;) {
    Subgroup next = commutator_subgroup(E, series.back(), u);
    if (next.mask == series.back().mask) return series;
    series.push_back(std::move(next));
  }
}

// gamma_{c+1}(U): the (c+1)-st term of the lower central series.
template <GroupBackend G>
Subgroup gamma(const Enumerated<G>& E, const Subgroup& u, uint32_t c) {
  Subgroup g = u;
  for (uint32_t i = 0; i < c; ++i) {
    Subgroup next = commutator_subgroup(E, g, u);
    if (next.mask == g.mask) return g;  // series stabilized early
    g = std::move(next);
  }
  return g;
}

// [n, u, u, ..., u] with i copies of u; i = 0 returns n.
template <GroupBackend G>
Subgroup iterated_commutator(const Enumerated<G>& E, const Subgroup& n, const Subgroup& u,
                             uint32_t i) {
  Subgroup r = n;
  for (uint32_t k = 0; k < i; ++k) r = commutator_subgroup(E, r, u);
  return r;
}

template <GroupBackend G>
bool is_nilpotent(const Enumerated<G>& E, const Subgroup& s) {
  return lower_central_series(E, s).back().order == 1;
}

// All normal subgroups of U: normal closures of single conjugacy classes,
// closed under pairwise joins until no new subgroup appears.
template <GroupBackend G>
std::vector<Subgroup> normal_subgroups(const Enumerated<G>& E, const Subgroup& u,
                                       uint64_t lattice_bound = kLatticeBound) {
  require(u.order <= lattice_bound, "normal_subgroups: group exceeds lattice bound");
  std::unordered_set<std::size_t> seen;
  std::vector<Subgroup> out;
  auto add = [&](Subgroup s) -> bool {
    std::size_t h = s.mask.hash();
    if (seen.count(h)) {
      for (const auto& t : out)
        if (t.mask == s.mask) return false;
    }
    seen.insert(h);
    out.push_back(std::move(s));
    require(out.size() <= 50000, "normal_subgroups: lattice too large");
    return true;
  };
  add(trivial_subgroup(E));
  for (const auto& cls : conjugacy_classes(E, u))
    add(normal_closure_in(E, u, {cls.front()}));
  // join fixpoint
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      Subgroup jn = join(E, out[i], out[j]);
      if (jn.mask == out[i].mask || jn.mask == out[j].mask) continue;
      add(std::move(jn));
    }
  std::sort(out.begin(), out.end(), Subgroup::canonical_less);
  return out;
}

// Chief factors of U: pairs (K, L) of normal subgroups with L < K and nothing
// normal strictly between. Ordered canonically by (K, L).
template <GroupBackend G>
std::vector<std::pair<Subgroup, Subgroup>> chief_factors(const Enumerated<G>& E,
                                                         const Subgroup& u) {
  auto lattice = normal_subgroups(E, u);
  std::vector<std::pair<Subgroup, Subgroup>> out;
  for (const auto& k : lattice)
    for (const auto& l : lattice) {
      if (l.order >= k.order || !l.subset_of(k)) continue;
      bool between = false;
      for (const auto& m : lattice) {
        if (m.order <= l.order || m.order >= k.order) continue;
        if (l.subset_of(m) && m.subset_of(k) && !(m.mask == l.mask) && !(m.mask == k.mask)) {
          between = true;
          break;
        }
      }
      if (!between) out.emplace_back(k, l);
    }
  return out;
}

// All subgroups of A invariant under conjugation by the actor generators.
// Walks the invariant-subgroup lattice from the bottom: every invariant
// subgroup arises by repeatedly adjoining one element of A.
template <GroupBackend G>
std::vector<Subgroup> invariant_subgroups(const Enumerated<G>& E,
                                          const std::vector<uint32_t>& actor_gens,
                                          const Subgroup& a, uint64_t bound = 20000) {
  require(a.order <= bound, "invariant_subgroups: subgroup too large");
  for (uint32_t g : actor_gens)
    for (uint32_t x : a.gens)
      require(a.contains(E.conj(x, g)), "invariant_subgroups: target not invariant under actors");
  std::unordered_set<std::size_t> seen;
  std::vector<Subgroup> out;
  auto known = [&](const Subgroup& s) {
    if (!seen.count(s.mask.hash())) return false;
    for (const auto& t : out)
      if (t.mask == s.mask) return true;
    return false;
  };
  out.push_back(trivial_subgroup(E));
  seen.insert(out[0].mask.hash());
  std::deque<std::size_t> work{0};
  auto elements_of_a = a.elements();
  while (!work.empty()) {
    std::size_t hi = work.front();
    work.pop_front();
    Subgroup h = out[hi];  // copy: out re-allocates while we extend
    for (uint32_t x : elements_of_a) {
      if (h.contains(x)) continue;
      std::vector<uint32_t> seeds = h.gens;
      seeds.push_back(x);
      Subgroup s = invariant_closure(E, actor_gens, std::move(seeds));
      if (!s.subset_of(a) || known(s)) continue;
      seen.insert(s.mask.hash());
      out.push_back(s);
      require(out.size() <= 50000, "invariant_subgroups: lattice too large");
      work.push_back(out.size() - 1);
    }
  }
  std::sort(out.begin(), out.end(), Subgroup::canonical_less);
  return out;
}

// Maximal proper actor-invariant subgroups of A; A itself must be invariant
// and nontrivial.
template <GroupBackend G>
std::vector<Subgroup> maximal_invariant_subgroups(const Enumerated<G>& E,
                                                  const std::vector<uint32_t>& actor_gens,
                                                  const Subgroup& a) {
  require(a.order > 1, "maximal_invariant_subgroups: target is trivial");
  auto inv = invariant_subgroups(E, actor_gens, a);
  std::vector<Subgroup> maximal;
  for (const auto& m : inv) {
    if (m.order >= a.order) continue;
    bool covered = false;
    for (const auto& n : inv) {
      if (n.order <= m.order || n.order >= a.order) continue;
      if (m.subset_of(n) && !(n.mask == m.mask)) {
        covered = true;
        break;
      }
    }
    if (!covered) maximal.push_back(m);
  }
  return maximal;
}

// Relative Melnikov subgroup M_U(A): intersection of the maximal U-invariant
// proper subgroups of A. Requires A nontrivial and U-invariant.
template <GroupBackend G>
Subgroup melnikov_rel(const Enumerated<G>& E, const Subgroup& u, const Subgroup& a) {
  auto maximal = maximal_invariant_subgroups(E, u.gens, a);
  require(!maximal.empty(), "melnikov_rel: no maximal invariant subgroup");
  Bitset m = maximal[0].mask;
  for (std::size_t i = 1; i < maximal.size(); ++i) m = m & maximal[i].mask;
  Subgroup out = subgroup_from_elements(E, m);
  require(out.order < a.order, "melnikov_rel: result not proper");
  // Cross-check against the absolute Melnikov subgroup of A, which sits
  // inside every relative one: it is characteristic in A, so its product
  // with a maximal U-invariant S is again U-invariant, and any maximal
  // normal subgroup of A above S pins that product down to S itself.
  if (!(u.mask == a.mask))
    require(melnikov_rel(E, a, a).mask.subset_of(out.mask),
            "melnikov_rel: absolute Melnikov subgroup escapes the relative one");
  return out;
}

// Melnikov subgroup of U as a group in its own right: intersection of its
// maximal normal subgroups.
template <GroupBackend G>
Subgroup melnikov(const Enumerated<G>& E, const Subgroup& u) {
  return melnikov_rel(E, u, u);
}

// A is narrow (relative to the U-action) if it has exactly one maximal
// U-invariant proper subgroup.
template <GroupBackend G>
bool is_narrow(const Enumerated<G>& E, const Subgroup& u, const Subgroup& a) {
  if (a.order <= 1) return false;
  return maximal_invariant_subgroups(E, u.gens, a).size() == 1;
}

struct MelInclusion {
  bool k_in_l_times_mel = false;  // K <= L * M_U(K)
  bool k_in_l = false;            // K <= L
};

// The two sides of the Melnikov inclusion test for normal subgroups K, L of U;
// callers compare them (they agree on all valid inputs).
template <GroupBackend G>
MelInclusion mel_inclusion_check(const Enumerated<G>& E, const Subgroup& u, const Subgroup& k,
                                 const Subgroup& l) {
  require(k.order > 1, "mel_inclusion_check: K must be nontrivial");
  Subgroup m = melnikov_rel(E, u, k);
  Subgroup lm = join(E, l, m);
  return MelInclusion{k.subset_of(lm), k.subset_of(l)};
}

// Largest nilpotent normal subgroup.
template <GroupBackend G>
Subgroup fitting_subgroup(const Enumerated<G>& E, const Subgroup& u) {
  Subgroup f = trivial_subgroup(E);
  for (const auto& n : normal_subgroups(E, u))
    if (is_nilpotent(E, n)) f = join(E, f, n);
  require(is_nilpotent(E, f), "fitting_subgroup: join of nilpotent normals is not nilpotent");
  return f;
}

struct NarrowWitness {
  Subgroup narrow;          // A: narrow, A <= K, A not <= L, A cap L = M_U(A)
  Subgroup melnikov_rel_a;  // M_U(A)
};

// For a chief factor K/L of U, finds a narrow normal subgroup A of U with
// A <= K, A not <= L and A cap L = M_U(A). Candidates are scanned in canonical
// order so the result is deterministic.
template <GroupBackend G>
NarrowWitness narrow_above_chief(const Enumerated<G>& E, const Subgroup& u, const Subgroup& k,
                                 const Subgroup& l) {
  require(l.subset_of(k) && l.order < k.order, "narrow_above_chief: not a factor");
  auto lattice = normal_subgroups(E, u);
  for (const auto& m : lattice)
    require(!(l.order < m.order && m.order < k.order && l.subset_of(m) && m.subset_of(k)),
            "narrow_above_chief: K/L is not a chief factor");
  for (const auto& a : lattice) {
    if (a.order <= 1 || !a.subset_of(k) || a.subset_of(l)) continue;
    if (!is_narrow(E, u, a)) continue;
    Subgroup m = melnikov_rel(E, u, a);
    Subgroup cap = intersection(E, a, l);
    if (cap.mask == m.mask) return NarrowWitness{a, m};
  }
  throw error("narrow_above_chief: no narrow subgroup found (chief factor data inconsistent)");
}

struct BasalResult {
  Subgroup basal;                    // B
  std::vector<Subgroup> conjugates;  // distinct U-conjugates of B
  Subgroup product;                  // B^U, verified to be the direct product
  std::vector<std::size_t> chosen_subset;  // positions into the conjugate list of K used for B
};

// Conjugates of a subgroup under U, in BFS order from the subgroup itself.
template <GroupBackend G>
std::vector<Subgroup> subgroup_conjugates(const Enumerated<G>& E, const Subgroup& u,
                                          const Subgroup& k) {
  std::vector<Subgroup> orbit{k};
  std::vector<std::size_t> hashes{k.mask.hash()};
  auto known = [&](const Subgroup& s) {
    for (const auto& t : orbit)
      if (t.mask == s.mask) return true;
    return false;
  };
  for (std::size_t i = 0; i < orbit.size(); ++i)
    for (uint32_t g : u.gens) {
      Subgroup c = conjugate_subgroup(E, orbit[i], g);
      if (!known(c)) orbit.push_back(std::move(c));
    }
  (void)hashes;
  return orbit;
}

// Basal subgroup from K: intersect the conjugates of K over a largest index
// subset with nontrivial intersection; the result's conjugates meet trivially,
// commute elementwise, and generate their direct product. Preconditions: U is
// Fitting-free, K is nontrivial and normal in its own normal closure.
template <GroupBackend G>
BasalResult reid_basal(const Enumerated<G>& E, const Subgroup& u, const Subgroup& k) {
  require(k.order > 1, "reid_basal: K must be nontrivial");
  require(fitting_subgroup(E, u).order == 1, "reid_basal: ambient group is not Fitting-free");
  Subgroup kg = normal_closure_in(E, u, k.gens);
  for (uint32_t t : kg.gens)
    for (uint32_t x : k.gens)
      require(k.contains(E.conj(x, t)), "reid_basal: K is not normal in its normal closure");

  auto conj = subgroup_conjugates(E, u, k);
  std::size_t m = conj.size();
  require(m <= 20, "reid_basal: too many conjugates for subset search");
  // Largest subset with nontrivial intersection; ties broken by the numeric
  // value of the subset bitmask, so the choice is deterministic.
  std::vector<std::size_t> best;
  Bitset best_mask;
  for (uint64_t sub = 1; sub < (uint64_t{1} << m); ++sub) {
    std::size_t pc = static_cast<std::size_t>(__builtin_popcountll(sub));
    if (pc < best.size()) continue;
    Bitset cap = conj[static_cast<std::size_t>(__builtin_ctzll(sub))].mask;
    for (std::size_t i = 0; i < m; ++i)
      if ((sub >> i) & 1) cap = cap & conj[i].mask;
    if (cap.count() <= 1) continue;
    if (pc > best.size()) {
      best.clear();
      for (std::size_t i = 0; i < m; ++i)
        if ((sub >> i) & 1) best.push_back(i);
      best_mask = cap;
    }
  }
  require(!best.empty(), "reid_basal: every conjugate intersection is trivial");

  BasalResult r;
  r.basal = subgroup_from_elements(E, best_mask);
  r.chosen_subset = best;
  r.conjugates = subgroup_conjugates(E, u, r.basal);
  for (std::size_t i = 0; i < r.conjugates.size(); ++i)
    for (std::size_t j = i + 1; j < r.conjugates.size(); ++j) {
      Bitset cap = r.conjugates[i].mask & r.conjugates[j].mask;
      require(cap.count() == 1, "reid_basal: distinct conjugates intersect nontrivially");
      for (uint32_t x : r.conjugates[i].gens)
        for (uint32_t y : r.conjugates[j].gens)
          require(E.comm(x, y) == E.identity_index(),
                  "reid_basal: distinct conjugates do not commute elementwise");
    }
  std::vector<uint32_t> all_gens;
  for (const auto& c : r.conjugates) all_gens.insert(all_gens.end(), c.gens.begin(), c.gens.end());
  r.product = closure(E, all_gens);
  uint64_t expect = 1;
  for (std::size_t i = 0; i < r.conjugates.size(); ++i) expect *= r.basal.order;
  require(r.product.order == expect, "reid_basal: closure is not the direct product");
  return r;
}

}
