#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "jnnf/enumerated_group.hpp"
#include "jnnf/error.hpp"
#include "jnnf/group_kernel.hpp"

namespace jnnf {

// U/N as a group backend. Elements are canonical coset representatives,
// encoded as parent element indices (the least index in the coset, which is
// well defined because the parent enumeration is sorted). The parent stays
// alive through a shared_ptr so quotients can be passed around freely.
template <GroupBackend G>
class QuotientBackend {
 public:
  using element_type = uint32_t;

  QuotientBackend(std::shared_ptr<const Enumerated<G>> parent, Subgroup u, Subgroup n)
      : parent_(std::move(parent)), u_(std::move(u)), n_(std::move(n)) {
    const auto& E = *parent_;
    require(n_.subset_of(u_), "quotient: N is not inside U");
    for (uint32_t g : u_.gens)
      for (uint32_t x : n_.gens)
        require(n_.contains(E.conj(x, g)), "quotient: N is not normal in U");
    rep_.assign(E.size(), kOutside);
    for (uint32_t i : u_.elements()) {
      if (rep_[i] != kOutside) continue;
      // i is the least element of its coset: all smaller ones are claimed.
      for (uint32_t x : n_.elements()) rep_[E.mul(i, x)] = i;
    }
    for (uint32_t g : u_.gens) {
      uint32_t r = rep_[g];
      if (r == E.identity_index()) continue;
      bool dup = false;
      for (uint32_t have : gens_)
        if (have == r) dup = true;
      if (!dup) gens_.push_back(r);
    }
  }

  element_type identity() const { return rep_[parent_->identity_index()]; }
  element_type mul(element_type a, element_type b) const { return rep_[parent_->mul(a, b)]; }
  element_type inv(element_type a) const { return rep_[parent_->inv(a)]; }
  const std::vector<element_type>& generators() const { return gens_; }

  // Coset representative of an arbitrary parent element of U.
  element_type project(uint32_t parent_index) const {
    require(parent_index < rep_.size() && rep_[parent_index] != kOutside,
            "quotient: element outside U");
    return rep_[parent_index];
  }

  const Enumerated<G>& parent() const { return *parent_; }
  const Subgroup& numerator() const { return u_; }
  const Subgroup& denominator() const { return n_; }

 private:
  static constexpr uint32_t kOutside = std::numeric_limits<uint32_t>::max();
  std::shared_ptr<const Enumerated<G>> parent_;
  Subgroup u_;
  Subgroup n_;
  std::vector<uint32_t> rep_;
  std::vector<element_type> gens_;
};

// A map between two enumerated groups, stored as an image table over the
// source. build_homomorphism extends generator images along a breadth-first
// spanning tree and then checks every product, so a well_defined result is a
// proof, not a hope.
struct Homomorphism {
  std::vector<uint32_t> img;  // source index -> target index
  bool well_defined = true;
  std::string failure;  // first inconsistency, if any
};

template <GroupBackend A, GroupBackend B>
Homomorphism build_homomorphism(const Enumerated<A>& ea, const Enumerated<B>& eb,
                                const std::vector<uint32_t>& gen_images) {
  const auto& gens = ea.generator_indices();
  require(gen_images.size() == gens.size(),
          "build_homomorphism: one image per source generator required");
  constexpr uint32_t kUnset = std::numeric_limits<uint32_t>::max();
  Homomorphism h;
  h.img.assign(ea.size(), kUnset);
  h.img[ea.identity_index()] = eb.identity_index();
  std::deque<uint32_t> work{ea.identity_index()};
  while (!work.empty()) {
    uint32_t a = work.front();
    work.pop_front();
    for (std::size_t k = 0; k < gens.size(); ++k) {
      uint32_t a2 = ea.mul(a, gens[k]);
      uint32_t want = eb.mul(h.img[a], gen_images[k]);
      if (h.img[a2] == kUnset) {
        h.img[a2] = want;
        work.push_back(a2);
      } else if (h.img[a2] != want) {
        h.well_defined = false;
        h.failure = "inconsistent image at source index " + std::to_string(a2);
        return h;
      }
    }
  }
  // The BFS already visits each element once per incoming generator edge, and
  // any mismatch on such an edge was caught above. Verify all products anyway
  // when the source is small; this is the part that makes the check exact.
  if (ea.size() <= 4096) {
    for (uint32_t a = 0; a < ea.size(); ++a)
      for (std::size_t k = 0; k < gens.size(); ++k) {
        uint32_t a2 = ea.mul(a, gens[k]);
        if (eb.mul(h.img[a], gen_images[k]) != h.img[a2]) {
          h.well_defined = false;
          h.failure = "product mismatch at source index " + std::to_string(a);
          return h;
        }
      }
  }
  return h;
}

template <GroupBackend A, GroupBackend B>
Subgroup kernel_of(const Enumerated<A>& ea, const Enumerated<B>& eb, const Homomorphism& h) {
  require(h.well_defined, "kernel_of: map is not a homomorphism");
  Bitset mask(ea.size());
  for (uint32_t i = 0; i < ea.size(); ++i)
    if (h.img[i] == eb.identity_index()) mask.set(i);
  return subgroup_from_elements(ea, mask);
}

template <GroupBackend A, GroupBackend B>
Subgroup image_of(const Enumerated<A>& ea, const Enumerated<B>& eb, const Homomorphism& h,
                  const Subgroup& s) {
  require(h.well_defined, "image_of: map is not a homomorphism");
  (void)ea;
  Bitset mask(eb.size());
  for (uint32_t i : s.elements()) mask.set(h.img[i]);
  return subgroup_from_elements(eb, mask);
}

template <GroupBackend A, GroupBackend B>
bool is_surjective(const Enumerated<A>& ea, const Enumerated<B>& eb, const Homomorphism& h) {
  require(h.well_defined, "is_surjective: map is not a homomorphism");
  Bitset mask(eb.size());
  uint64_t hit = 0;
  for (uint32_t i = 0; i < ea.size(); ++i)
    if (!mask.get(h.img[i])) {
      mask.set(h.img[i]);
      ++hit;
    }
  return hit == eb.size();
}

}
