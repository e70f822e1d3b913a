#ifndef JNNF_WREATH_HARNESS_HPP
#define JNNF_WREATH_HARNESS_HPP

// Desk-scale wreath products X wr H with X non-abelian simple and H a small
// transitive permutation group. Everything here is exhaustive: the wreath is
// enumerated, normal subgroups of H are walked one by one, and the fusion and
// product-action checks run over genuine conjugacy class representatives.
// The companion header wreath_tower.hpp handles the structural towers where
// enumeration is impossible.

#include <cstdint>
#include <string>
#include <vector>

#include "jnnf/enumerated_group.hpp"
#include "jnnf/error.hpp"
#include "jnnf/group_kernel.hpp"
#include "jnnf/perm_group.hpp"
#include "jnnf/permutation.hpp"
#include "jnnf/subprimitive.hpp"

namespace jnnf {

// Permutations of degree at most 16 packed into a uint64, four bits per
// point. Enumerating a wreath product of order above a million is only
// reasonable with elements this small; multiplication is a short loop of
// shifts instead of a heap-allocated image array.
class PackedPermGroup {
 public:
  using element_type = uint64_t;

  PackedPermGroup(uint32_t degree, const std::vector<Permutation>& gens) : degree_(degree) {
    require(degree >= 1 && degree <= 16, "PackedPermGroup: degree must be between 1 and 16");
    for (const auto& g : gens) gens_.push_back(pack(g));
  }

  uint32_t degree() const { return degree_; }

  uint64_t pack(const Permutation& p) const {
    require(p.degree() == degree_, "PackedPermGroup: degree mismatch");
    uint64_t out = 0;
    for (uint32_t i = 0; i < degree_; ++i) out |= uint64_t(p[i]) << (4 * i);
    return out;
  }

  Permutation unpack(element_type e) const {
    std::vector<uint32_t> img(degree_);
    for (uint32_t i = 0; i < degree_; ++i) img[i] = e >> (4 * i) & 15;
    return Permutation(img);
  }

  element_type identity() const {
    uint64_t out = 0;
    for (uint32_t i = 0; i < degree_; ++i) out |= uint64_t(i) << (4 * i);
    return out;
  }

  element_type mul(element_type a, element_type b) const {
    uint64_t out = 0;
    for (uint32_t i = 0; i < degree_; ++i) out |= (b >> 4 * (a >> 4 * i & 15) & 15) << (4 * i);
    return out;
  }

  element_type inv(element_type a) const {
    uint64_t out = 0;
    for (uint32_t i = 0; i < degree_; ++i) out |= uint64_t(i) << 4 * (a >> 4 * i & 15);
    return out;
  }

  const std::vector<element_type>& generators() const { return gens_; }

 private:
  uint32_t degree_;
  std::vector<element_type> gens_;
};

// X wr H in its imprimitive representation: one block of width deg(X) per
// point of H, base copies acting inside their blocks, H permuting the blocks.
struct WreathProduct {
  uint32_t block_width = 0;
  uint32_t block_count = 0;
  PermGroup whole;
  std::vector<Permutation> base_gens;  // generators of every block copy of X
  std::vector<Permutation> top_gens;   // generators of H, lifted
};

inline Permutation lift_into_block(const Permutation& x, uint32_t block, uint32_t width,
                                   uint32_t total) {
  std::vector<uint32_t> img(total);
  for (uint32_t i = 0; i < total; ++i) img[i] = i;
  for (uint32_t j = 0; j < width; ++j) img[block * width + j] = block * width + x[j];
  return Permutation(img);
}

inline Permutation lift_block_permutation(const Permutation& h, uint32_t width) {
  std::vector<uint32_t> img(h.degree() * width);
  for (uint32_t b = 0; b < h.degree(); ++b)
    for (uint32_t j = 0; j < width; ++j) img[b * width + j] = h[b] * width + j;
  return Permutation(img);
}

inline WreathProduct imprimitive_wreath(const PermGroup& x, const PermGroup& h) {
  WreathProduct w;
  w.block_width = x.degree();
  w.block_count = h.degree();
  uint32_t total = w.block_width * w.block_count;
  for (uint32_t b = 0; b < w.block_count; ++b)
    for (const auto& g : x.generators()) w.base_gens.push_back(lift_into_block(g, b, w.block_width, total));
  for (const auto& g : h.generators()) w.top_gens.push_back(lift_block_permutation(g, w.block_width));
  std::vector<Permutation> gens = w.base_gens;
  gens.insert(gens.end(), w.top_gens.begin(), w.top_gens.end());
  w.whole = PermGroup(total, std::move(gens));
  return w;
}

namespace detail {

template <GroupBackend G>
void require_nonabelian_simple(const Enumerated<G>& E, const char* who) {
  Subgroup whole = full_subgroup(E);
  bool abelian = true;
  for (uint32_t a : E.generator_indices())
    for (uint32_t b : E.generator_indices())
      if (E.comm(a, b) != E.identity_index()) abelian = false;
  if (abelian || normal_subgroups(E, whole).size() != 2)
    throw error(std::string(who) + ": X must be a non-abelian simple group");
}

// Does the normal closure of seed in K contain all of b? Grows the subgroup
// generated by the conjugates incrementally: close under right multiplication,
// then conjugate the current generators by K's generators and repeat until
// either every generator of b has appeared (early success, sound because the
// partial subgroup only grows) or nothing new turns up (the closure is
// complete and the verdict is whatever membership says).
template <GroupBackend G>
bool normal_closure_contains(const Enumerated<G>& E, uint32_t seed,
                             const std::vector<uint32_t>& kgens, const Subgroup& b) {
  std::vector<char> in(E.size(), 0);
  std::vector<uint32_t> elems{E.identity_index()};
  in[elems[0]] = 1;
  std::vector<uint32_t> tgens{seed};
  auto contains_b = [&] {
    for (uint32_t g : b.gens)
      if (!in[g]) return false;
    return true;
  };
  while (true) {
    for (std::size_t i = 0; i < elems.size(); ++i)
      for (uint32_t g : tgens) {
        uint32_t w = E.mul(elems[i], g);
        if (!in[w]) {
          in[w] = 1;
          elems.push_back(w);
        }
      }
    if (contains_b()) return true;
    bool grew = false;
    for (std::size_t ti = 0, tn = tgens.size(); ti < tn; ++ti)
      for (uint32_t g : kgens) {
        uint32_t c = E.conj(tgens[ti], g);
        if (!in[c]) {
          in[c] = 1;
          elems.push_back(c);
          tgens.push_back(c);
          grew = true;
        }
      }
    if (!grew) return contains_b();
  }
}

}  // namespace detail

struct BaseFusionCase {
  uint64_t complement_order = 0;  // the normal subgroup L of H
  uint64_t subgroup_order = 0;    // K = base . L
  uint32_t reps_outside_base = 0;
  uint32_t reps_generating = 0;   // how many of those had the base inside their closure
};

struct BaseFusionReport {
  uint64_t wreath_order = 0;
  uint64_t base_order = 0;
  std::vector<BaseFusionCase> cases;
  bool holds = false;
};

// For every K = B.L with L normal in H and every conjugacy class of K meeting
// the complement of the base B, the class must normally generate a subgroup
// containing B. Exhaustive over class representatives; the wreath product is
// fully enumerated, which confines this harness to degrees at most 16.
inline BaseFusionReport verify_base_fusion(const PermGroup& x, const PermGroup& h) {
  {
    Enumerated<PermGroup> ex(x);
    detail::require_nonabelian_simple(ex, "verify_base_fusion");
  }
  require(h.degree() >= 1 && h.is_transitive(), "verify_base_fusion: H must be transitive");
  Enumerated<PermGroup> eh(h);
  auto sp = is_subprimitive(eh);
  if (!sp.subprimitive) {
    std::string orbit;
    for (uint32_t p : sp.orbit) orbit += (orbit.empty() ? "" : " ") + std::to_string(p);
    throw error("verify_base_fusion: H is not subprimitive: " + sp.kernel_element->str() +
                " lies in a normal subgroup of order " +
                std::to_string(sp.offending_normal->order) + " yet fixes its orbit {" + orbit +
                "} pointwise");
  }

  WreathProduct w = imprimitive_wreath(x, h);
  uint32_t total = w.block_width * w.block_count;
  require(total <= 16, "verify_base_fusion: wreath degree exceeds the packed-permutation limit");
  std::vector<Permutation> gens = w.base_gens;
  gens.insert(gens.end(), w.top_gens.begin(), w.top_gens.end());
  PackedPermGroup packed(total, gens);
  Enumerated<PackedPermGroup> E(packed);

  BaseFusionReport report;
  report.wreath_order = E.size();
  std::vector<uint32_t> bgens;
  for (const auto& g : w.base_gens) bgens.push_back(E.index_of(packed.pack(g)));
  Subgroup base = closure(E, bgens);
  report.base_order = base.order;
  report.holds = true;

  Subgroup hwhole = full_subgroup(eh);
  std::vector<char> seen(E.size());
  for (const Subgroup& l : normal_subgroups(eh, hwhole)) {
    BaseFusionCase item;
    item.complement_order = l.order;
    std::vector<uint32_t> kgens = bgens;
    for (uint32_t gi : l.gens)
      kgens.push_back(E.index_of(packed.pack(lift_block_permutation(eh.element(gi), w.block_width))));
    Subgroup k = closure(E, kgens);
    item.subgroup_order = k.order;

    std::fill(seen.begin(), seen.end(), 0);
    std::vector<uint32_t> orbit;
    for (uint32_t start : k.mask.indices()) {
      if (seen[start]) continue;
      orbit.assign(1, start);
      seen[start] = 1;
      for (std::size_t i = 0; i < orbit.size(); ++i)
        for (uint32_t g : k.gens) {
          uint32_t c = E.conj(orbit[i], g);
          if (!seen[c]) {
            seen[c] = 1;
            orbit.push_back(c);
          }
        }
      if (base.contains(start) || start == E.identity_index()) continue;
      ++item.reps_outside_base;
      if (detail::normal_closure_contains(E, start, k.gens, base))
        ++item.reps_generating;
      else
        report.holds = false;
    }
    report.cases.push_back(item);
  }
  return report;
}

struct ProductActionReport {
  uint32_t degree = 0;  // |X| to the number of blocks
  uint64_t order = 0;
  bool faithful = false;
  bool transitive = false;
  bool base_regular = false;
  bool base_unique_minimal_normal = false;
  bool subprimitive = false;  // conjunction of the above, per the proof route
};

// The action of X wr H on tuples indexed by the points of H with entries in
// X: base coordinates multiply their entry on the right, top elements permute
// the coordinates. Faithfulness and transitivity are checked on the explicit
// permutation group of degree |X|^blocks; that B is the unique minimal normal
// subgroup is checked in the enumerable imprimitive representation, which is
// abstractly the same group once faithfulness is established. Subprimitivity
// follows: a normal K contains B, B is transitive, so K is transitive, and a
// faithful group is faithful on its only orbit.
inline ProductActionReport verify_product_action(const PermGroup& x, const PermGroup& h,
                                                 uint64_t degree_bound = 10000) {
  Enumerated<PermGroup> ex(x);
  detail::require_nonabelian_simple(ex, "verify_product_action");
  require(h.degree() >= 1 && h.is_transitive(), "verify_product_action: H must be transitive");

  uint64_t xsize = ex.size();
  uint32_t blocks = h.degree();
  uint64_t degree = 1;
  for (uint32_t i = 0; i < blocks; ++i) {
    degree *= xsize;
    if (degree > degree_bound)
      throw bound_error("verify_product_action: tuple domain exceeds the degree bound");
  }

  ProductActionReport report;
  report.degree = uint32_t(degree);

  // digit d of a tuple index is the X-entry at coordinate d
  auto tuple_gen_base = [&](uint32_t xg, uint32_t coord) {
    std::vector<uint32_t> img(degree);
    uint64_t stride = 1;
    for (uint32_t i = 0; i < coord; ++i) stride *= xsize;
    for (uint64_t t = 0; t < degree; ++t) {
      uint64_t digit = t / stride % xsize;
      uint64_t moved = ex.mul(uint32_t(digit), xg);
      img[t] = uint32_t(t - digit * stride + moved * stride);
    }
    return Permutation(img);
  };
  auto tuple_gen_top = [&](const Permutation& hp) {
    std::vector<uint32_t> img(degree);
    std::vector<uint64_t> stride(blocks, 1);
    for (uint32_t i = 1; i < blocks; ++i) stride[i] = stride[i - 1] * xsize;
    for (uint64_t t = 0; t < degree; ++t) {
      uint64_t out = 0;
      for (uint32_t b = 0; b < blocks; ++b) out += t / stride[b] % xsize * stride[hp[b]];
      img[t] = uint32_t(out);
    }
    return Permutation(img);
  };

  std::vector<Permutation> base_gens, gens;
  for (uint32_t b = 0; b < blocks; ++b)
    for (uint32_t xg : ex.generator_indices()) base_gens.push_back(tuple_gen_base(xg, b));
  gens = base_gens;
  for (const auto& g : h.generators()) gens.push_back(tuple_gen_top(g));

  PermGroup action(uint32_t(degree), gens);
  uint64_t abstract_order = h.order();
  for (uint32_t i = 0; i < blocks; ++i) abstract_order *= xsize;
  report.order = action.order();
  report.faithful = report.order == abstract_order;
  report.transitive = action.is_transitive();

  PermGroup base_action(uint32_t(degree), base_gens);
  report.base_regular = base_action.order() == degree && base_action.is_transitive();

  // abstract normal structure, read off the small faithful representation
  WreathProduct w = imprimitive_wreath(x, h);
  Enumerated<PermGroup> E(w.whole);
  std::vector<uint32_t> bidx;
  for (const auto& g : w.base_gens) bidx.push_back(E.index_of(g));
  Subgroup base = closure(E, bidx);
  uint32_t minimal_count = 0;
  bool base_is_minimal = false;
  auto normals = normal_subgroups(E, full_subgroup(E));
  for (const Subgroup& n : normals) {
    if (n.order == 1) continue;
    bool minimal = true;
    for (const Subgroup& m : normals)
      if (m.order > 1 && m.order < n.order && m.mask.subset_of(n.mask)) minimal = false;
    if (!minimal) continue;
    ++minimal_count;
    if (n.mask == base.mask) base_is_minimal = true;
  }
  report.base_unique_minimal_normal = minimal_count == 1 && base_is_minimal;

  report.subprimitive = report.faithful && report.transitive && report.base_regular &&
                        report.base_unique_minimal_normal;
  return report;
}

struct OuterCertificateReport {
  bool found = false;
  uint32_t entry = 0;   // element of X planted at one coordinate
  uint32_t image = 0;   // where the coordinatewise map sends it
  std::string note;
};

// Conjugation table of X by an overgroup element s, as a candidate
// automorphism. Throws if conjugation by s does not preserve X.
inline std::vector<uint32_t> conjugation_table(const Enumerated<PermGroup>& ex, const Permutation& s) {
  std::vector<uint32_t> phi(ex.size());
  Permutation si = s.inverse();
  for (uint32_t i = 0; i < ex.size(); ++i) {
    Permutation image = si * ex.element(i) * s;
    require(ex.contains_element(image), "conjugation_table: conjugation leaves the group");
    phi[i] = ex.index_of(image);
  }
  return phi;
}

// One-sided outerness test for the automorphism of X wr H acting as phi on
// every base coordinate and trivially on top, H transitive. A base element
// supported on a single coordinate is conjugate in the wreath product exactly
// to the single-coordinate elements whose entry is X-conjugate to its own, so
// if phi moves some entry out of its X-class the automorphism cannot be
// inner. Finding nothing proves nothing: the result is then inconclusive.
inline OuterCertificateReport outer_certificate(const Enumerated<PermGroup>& ex,
                                                const PermGroup& h,
                                                const std::vector<uint32_t>& phi) {
  require(h.degree() >= 1 && h.is_transitive(), "outer_certificate: H must be transitive");
  require(phi.size() == ex.size(), "outer_certificate: table size mismatch");
  {
    std::vector<char> hit(ex.size(), 0);
    for (uint32_t v : phi) {
      require(v < ex.size() && !hit[v], "outer_certificate: table is not a bijection");
      hit[v] = 1;
    }
    for (uint32_t a = 0; a < ex.size(); ++a)
      for (uint32_t b = 0; b < ex.size(); ++b)
        require(phi[ex.mul(a, b)] == ex.mul(phi[a], phi[b]),
                "outer_certificate: table is not a homomorphism");
  }

  OuterCertificateReport report;
  std::vector<char> seen(ex.size(), 0);
  for (uint32_t start = 0; start < ex.size(); ++start) {
    if (seen[start] || start == ex.identity_index()) continue;
    std::vector<uint32_t> cls{start};
    std::vector<char> mask(ex.size(), 0);
    seen[start] = mask[start] = 1;
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (uint32_t g : ex.generator_indices()) {
        uint32_t c = ex.conj(cls[i], g);
        if (!mask[c]) {
          mask[c] = seen[c] = 1;
          cls.push_back(c);
        }
      }
    if (!mask[phi[start]]) {
      report.found = true;
      report.entry = start;
      report.image = phi[start];
      report.note = "image leaves the conjugacy class of the entry";
      return report;
    }
  }
  report.note = "every single-coordinate class is preserved";
  return report;
}

}  // namespace jnnf

#endif
