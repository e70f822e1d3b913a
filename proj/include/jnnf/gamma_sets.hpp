#pragma once

// Families of iterated-commutator images attached to a pair (group, margin
// subgroup), and the covering graph on such a family.
//
// For a fixed class parameter c, the object of interest is the set of
// subgroups gamma_{c+1}(K) where K ranges over a prescribed collection of
// subgroups of U and only those values not contained in the margin H are
// kept.  Four variants of the ranging collection are supported:
//
//   A      K runs over all normal subgroups of U (conjugacy-class route)
//   C      K runs over all normal subgroups of U (exhaustive-scan route)
//   Astar  K runs over all subgroups of U normalized by H
//   Cstar  same collection as Astar, membership decided via explicit
//          normalizer computation
//
// A and C describe the same set by construction; the two code paths share
// nothing below gamma(), so requesting the scan-backed variants doubles as a
// self-test and the equality is asserted.  The same pairing holds for Astar
// and Cstar.

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "jnnf/enumerated_group.hpp"
#include "jnnf/error.hpp"
#include "jnnf/group_concepts.hpp"
#include "jnnf/group_kernel.hpp"
#include "jnnf/subgroup_scan.hpp"

namespace jnnf {

enum class ObliquityVariant { A, C, Astar, Cstar };

inline const char* to_string(ObliquityVariant v) {
  switch (v) {
    case ObliquityVariant::A: return "A";
    case ObliquityVariant::C: return "C";
    case ObliquityVariant::Astar: return "Astar";
    case ObliquityVariant::Cstar: return "Cstar";
  }
  return "?";
}

// A deduplicated, canonically sorted family of gamma values.  witnesses[i]
// is a subgroup K with gamma_{c+1}(K) == members[i]; when several K produce
// the same value the canonically smallest one encountered is kept.
struct GammaSet {
  uint32_t c = 0;
  std::string source;
  std::vector<Subgroup> members;
  std::vector<Subgroup> witnesses;

  bool contains_mask(const Bitset& mask) const {
    for (const auto& m : members)
      if (m.mask == mask) return true;
    return false;
  }
};

namespace detail {

// Insert gamma(K) into the family unless the mask is already present.  The
// caller iterates K in canonical order, so first-wins keeps the smallest
// witness.
inline void gamma_insert(GammaSet& s, Subgroup value, const Subgroup& witness) {
  if (s.contains_mask(value.mask)) return;
  s.members.push_back(std::move(value));
  s.witnesses.push_back(witness);
}

inline void gamma_sort(GammaSet& s) {
  std::vector<std::size_t> idx(s.members.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return Subgroup::canonical_less(s.members[a], s.members[b]);
  });
  std::vector<Subgroup> members, witnesses;
  members.reserve(idx.size());
  witnesses.reserve(idx.size());
  for (std::size_t i : idx) {
    members.push_back(std::move(s.members[i]));
    witnesses.push_back(std::move(s.witnesses[i]));
  }
  s.members = std::move(members);
  s.witnesses = std::move(witnesses);
}

inline bool same_mask_family(const GammaSet& a, const GammaSet& b) {
  if (a.members.size() != b.members.size()) return false;
  for (std::size_t i = 0; i < a.members.size(); ++i)
    if (!(a.members[i].mask == b.members[i].mask)) return false;
  return true;
}

}  // namespace detail

// All values gamma_{c+1}(K) for K normal in U, trivial value included.
template <GroupBackend G>
GammaSet gamma_set(const Enumerated<G>& E, const Subgroup& u, uint32_t c) {
  GammaSet s;
  s.c = c;
  s.source = "all-normal";
  for (const auto& k : normal_subgroups(E, u))
    detail::gamma_insert(s, gamma(E, k, c), k);
  detail::gamma_sort(s);
  return s;
}

namespace detail {

// H normalizes K iff conjugation by each generator of H maps the
// generators of K back into K.
template <GroupBackend G>
bool normalized_by(const Enumerated<G>& E, const Subgroup& k, const Subgroup& h) {
  for (uint32_t hg : h.gens)
    for (uint32_t kg : k.gens)
      if (!k.mask.get(E.conj(kg, hg))) return false;
  return true;
}

template <GroupBackend G>
GammaSet obliquity_from(const Enumerated<G>& E, const std::vector<Subgroup>& range,
                        const Subgroup& h, uint32_t c, const char* source) {
  GammaSet s;
  s.c = c;
  s.source = source;
  for (const auto& k : range) {
    Subgroup g = gamma(E, k, c);
    if (!g.mask.subset_of(h.mask)) detail::gamma_insert(s, std::move(g), k);
  }
  detail::gamma_sort(s);
  return s;
}

}  // namespace detail

// Elements of U fixing K under conjugation, as a subgroup of U.
template <GroupBackend G>
Subgroup normalizer(const Enumerated<G>& E, const Subgroup& u, const Subgroup& k) {
  Bitset mask(E.size());
  for (uint32_t g : u.mask.indices()) {
    bool fixes = true;
    for (uint32_t kg : k.gens) {
      if (!k.mask.get(E.conj(kg, g))) {
        fixes = false;
        break;
      }
    }
    if (fixes) mask.set(g);
  }
  return subgroup_from_elements(E, mask);
}

template <GroupBackend G>
GammaSet obliquity_set(const Enumerated<G>& E, const Subgroup& u, const Subgroup& h,
                       uint32_t c, ObliquityVariant variant) {
  require(h.mask.subset_of(u.mask), "obliquity_set: margin subgroup not inside the group");
  switch (variant) {
    case ObliquityVariant::A:
      return detail::obliquity_from(E, normal_subgroups(E, u), h, c, "all-normal");
    case ObliquityVariant::C: {
      GammaSet via_scan =
          detail::obliquity_from(E, normal_subgroups_by_scan(E, u), h, c, "all-normal");
      GammaSet via_classes =
          detail::obliquity_from(E, normal_subgroups(E, u), h, c, "all-normal");
      require(detail::same_mask_family(via_scan, via_classes),
              "obliquity_set: normal-subgroup routes disagree");
      return via_scan;
    }
    case ObliquityVariant::Astar: {
      std::vector<Subgroup> range;
      for (const auto& k : all_subgroups(E, u))
        if (detail::normalized_by(E, k, h)) range.push_back(k);
      return detail::obliquity_from(E, range, h, c, "restricted-to-H");
    }
    case ObliquityVariant::Cstar: {
      std::vector<Subgroup> range;
      for (const auto& k : all_subgroups(E, u))
        if (h.mask.subset_of(normalizer(E, u, k).mask)) range.push_back(k);
      GammaSet via_normalizer = detail::obliquity_from(E, range, h, c, "restricted-to-H");
      GammaSet via_generators = obliquity_set(E, u, h, c, ObliquityVariant::Astar);
      require(detail::same_mask_family(via_normalizer, via_generators),
              "obliquity_set: H-invariance routes disagree");
      return via_normalizer;
    }
  }
  throw error("obliquity_set: unknown variant");
}

// Decomposition check for the restricted family: the Astar set over U must
// equal the union, over all subgroups L of U containing H, of the families
// obtained by ranging K over the normal subgroups of L.
struct AstarUnionReport {
  bool equal = false;
  std::size_t direct_size = 0;
  std::size_t union_size = 0;
  std::size_t overgroups_used = 0;
};

template <GroupBackend G>
AstarUnionReport astar_union_check(const Enumerated<G>& E, const Subgroup& u,
                                   const Subgroup& h, uint32_t c) {
  GammaSet direct = obliquity_set(E, u, h, c, ObliquityVariant::Astar);

  GammaSet merged;
  merged.c = c;
  merged.source = "restricted-to-H";
  auto overgroups = subgroups_containing(E, u, h);
  for (const auto& l : overgroups)
    for (const auto& k : normal_subgroups(E, l)) {
      Subgroup g = gamma(E, k, c);
      if (!g.mask.subset_of(h.mask)) detail::gamma_insert(merged, std::move(g), k);
    }
  detail::gamma_sort(merged);

  AstarUnionReport r;
  r.direct_size = direct.members.size();
  r.union_size = merged.members.size();
  r.overgroups_used = overgroups.size();
  r.equal = detail::same_mask_family(direct, merged);
  return r;
}

// Covering graph on the variant-C family.  Vertices are the family members;
// an edge runs from A to B when B < A with no family member strictly
// between.  Each edge carries the outcome of the descent check
// gamma_{c+1}(Mel(A)) <= B, where Mel(A) is the intersection of the maximal
// A-invariant proper subgroups of A.
enum class EdgeStatus { verified, degenerate, violated };

inline const char* to_string(EdgeStatus s) {
  switch (s) {
    case EdgeStatus::verified: return "verified";
    case EdgeStatus::degenerate: return "degenerate";
    case EdgeStatus::violated: return "violated";
  }
  return "?";
}

struct ObliquityEdge {
  std::size_t from = 0;  // index into vertices, the larger subgroup
  std::size_t to = 0;    // index into vertices, the covered subgroup
  EdgeStatus status = EdgeStatus::verified;
  uint64_t mel_order = 0;
};

struct ObliquityGraph {
  GammaSet vertices;
  std::vector<ObliquityEdge> edges;
  bool descent_on_all_edges = true;  // no violated edge; degenerate edges allowed
};

template <GroupBackend G>
ObliquityGraph obliquity_graph(const Enumerated<G>& E, const Subgroup& u,
                               const Subgroup& h, uint32_t c) {
  ObliquityGraph graph;
  graph.vertices = obliquity_set(E, u, h, c, ObliquityVariant::C);
  const auto& verts = graph.vertices.members;

  for (std::size_t a = 0; a < verts.size(); ++a) {
    for (std::size_t b = 0; b < verts.size(); ++b) {
      if (a == b) continue;
      if (!verts[b].mask.subset_of(verts[a].mask)) continue;
      bool covered = true;
      for (std::size_t m = 0; m < verts.size() && covered; ++m) {
        if (m == a || m == b) continue;
        if (verts[m].mask.subset_of(verts[a].mask) && verts[b].mask.subset_of(verts[m].mask))
          covered = false;
      }
      if (!covered) continue;

      ObliquityEdge edge;
      edge.from = a;
      edge.to = b;
      Subgroup mel = melnikov(E, verts[a]);
      edge.mel_order = mel.order;
      if (mel.order == 1) {
        edge.status = EdgeStatus::degenerate;
      } else {
        Subgroup g = gamma(E, mel, c);
        edge.status = g.mask.subset_of(verts[b].mask) ? EdgeStatus::verified
                                                      : EdgeStatus::violated;
      }
      if (edge.status == EdgeStatus::violated) graph.descent_on_all_edges = false;
      graph.edges.push_back(edge);
    }
  }

  // Edges point from larger to strictly smaller subgroups, so cycles are
  // impossible; a violation here means the covering computation is broken.
  for (const auto& e : graph.edges)
    require(verts[e.to].order < verts[e.from].order, "obliquity_graph: edge does not descend");
  return graph;
}

}  // namespace jnnf
