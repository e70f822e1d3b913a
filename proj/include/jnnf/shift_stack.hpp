#ifndef JNNF_SHIFT_STACK_HPP
#define JNNF_SHIFT_STACK_HPP

// Stacked shift modules: n+1 blocks V_0..V_n, each a copy of C_p^p, with a
// single shared C_p rotating the coordinates of every block simultaneously.
// The interesting subgroups are the invariant ones
//
//   U_S = (prod_{i in S} [V_i,H]  x  prod_{i not in S} V_i) . H
//
// for subsets S of {0..n}, whose derived subgroups all live in the base and
// factor blockwise as [V_i,H,H] or [V_i,H]. The census counts how many
// distinct derived subgroups arise; blockwise independence forces 2^{n+1}
// except where the block pieces coincide (p = 2 collapses [V,H,H] to 1,
// which still leaves the two pieces distinct, so the count survives).

#include <cstdint>
#include <memory>
#include <vector>

#include "jnnf/enumerated_group.hpp"
#include "jnnf/error.hpp"
#include "jnnf/fp.hpp"
#include "jnnf/group_kernel.hpp"
#include "jnnf/hashing.hpp"

namespace jnnf {

// Semidirect product (V_0 x ... x V_n) . C_p with the generator of C_p
// shifting each block cyclically. Elements pack into a uint64 as base-p
// digits: p digits per block, low block first, then one digit for the
// C_p exponent. Group order p^{p(n+1)+1} stays within the enumeration
// bound by precondition, so the packed value always fits.
class ShiftStackGroup {
 public:
  using element_type = uint64_t;

  ShiftStackGroup(uint32_t p, uint32_t n) : p_(p), blocks_(n + 1) {
    require(is_prime(p), "ShiftStackGroup: p must be prime");
    uint64_t order = 1;
    for (uint32_t d = 0; d < p_ * blocks_ + 1; ++d) {
      order *= p_;
      require(order <= kEnumerationBound, "ShiftStackGroup: order exceeds enumeration bound");
    }
    pow_.resize(p_ * blocks_ + 2, 1);
    for (uint32_t d = 1; d < pow_.size(); ++d) pow_[d] = pow_[d - 1] * p_;
    for (uint32_t i = 0; i < blocks_; ++i) gens_.push_back(pow_[i * p_]);
    gens_.push_back(pow_[p_ * blocks_]);
  }

  uint32_t p() const { return p_; }
  uint32_t blocks() const { return blocks_; }
  uint64_t order() const { return pow_[p_ * blocks_ + 1]; }

  element_type identity() const { return 0; }

  element_type mul(element_type a, element_type b) const {
    uint32_t digits = p_ * blocks_;
    uint32_t t = digit(a, digits);
    uint32_t s = digit(b, digits);
    element_type out = 0;
    for (uint32_t i = 0; i < blocks_; ++i) {
      for (uint32_t j = 0; j < p_; ++j) {
        // right factor shifted by the left factor's rotation before adding
        uint32_t bj = (j + p_ - t % p_) % p_;
        uint32_t v = (digit(a, i * p_ + j) + digit(b, i * p_ + bj)) % p_;
        out += element_type(v) * pow_[i * p_ + j];
      }
    }
    out += element_type((t + s) % p_) * pow_[digits];
    return out;
  }

  element_type inv(element_type a) const {
    uint32_t digits = p_ * blocks_;
    uint32_t t = digit(a, digits);
    uint32_t ti = (p_ - t) % p_;
    element_type out = 0;
    for (uint32_t i = 0; i < blocks_; ++i) {
      for (uint32_t j = 0; j < p_; ++j) {
        // (v, t)^{-1} = (-v rotated back by t, -t)
        uint32_t aj = (j + t) % p_;
        uint32_t v = (p_ - digit(a, i * p_ + aj)) % p_;
        out += element_type(v) * pow_[i * p_ + j];
      }
    }
    out += element_type(ti) * pow_[digits];
    return out;
  }

  const std::vector<element_type>& generators() const { return gens_; }

  // digit d of x in base p
  uint32_t digit(element_type x, uint32_t d) const { return uint32_t(x / pow_[d] % p_); }

  // the basis vector e_j of block i, as a group element
  element_type basis(uint32_t i, uint32_t j) const { return pow_[i * p_ + j]; }

  // the rotation generator
  element_type shift() const { return pow_[p_ * blocks_]; }

 private:
  uint32_t p_;
  uint32_t blocks_;
  std::vector<element_type> pow_;
  std::vector<element_type> gens_;
};

// Per-block commutator ladder: the block itself, [V_i,H], and [V_i,H,H].
struct ShiftBlockLadder {
  Subgroup block;
  Subgroup step1;
  Subgroup step2;
};

struct ShiftStackCensus {
  uint32_t p = 0;
  uint32_t n = 0;
  std::shared_ptr<const Enumerated<ShiftStackGroup>> group;
  Subgroup shift;                     // the C_p on top
  std::vector<ShiftBlockLadder> ladders;
  std::vector<Subgroup> invariant;    // U_S, indexed by the subset bitmask
  std::vector<Subgroup> derived;      // (U_S)', same indexing
  uint32_t distinct_derived = 0;
};

// Builds the stack, forms U_S for every subset S, computes each derived
// subgroup (U_S)' from scratch, and checks it against the blockwise product
// formula before counting distinct values.
inline ShiftStackCensus shift_stack_census(uint32_t p, uint32_t n) {
  ShiftStackGroup raw(p, n);
  auto group = std::make_shared<Enumerated<ShiftStackGroup>>(raw);
  const auto& E = *group;
  const ShiftStackGroup& g = E.backend();

  ShiftStackCensus out;
  out.p = p;
  out.n = n;
  out.group = group;
  out.shift = closure(E, {E.index_of(g.shift())});

  for (uint32_t i = 0; i <= n; ++i) {
    std::vector<uint32_t> basis;
    for (uint32_t j = 0; j < p; ++j) basis.push_back(E.index_of(g.basis(i, j)));
    ShiftBlockLadder ladder;
    ladder.block = closure(E, basis);
    // the blocks do not normalize the rotation, so take the subgroup
    // generated by the raw elementwise commutators
    ladder.step1 = commutator_subgroup_brute(E, ladder.block, out.shift);
    ladder.step2 = commutator_subgroup_brute(E, ladder.step1, out.shift);
    require(ladder.step1.mask.subset_of(ladder.block.mask),
            "shift_stack_census: commutator left its block");
    out.ladders.push_back(std::move(ladder));
  }

  uint32_t subsets = 1u << (n + 1);
  for (uint32_t s = 0; s < subsets; ++s) {
    std::vector<uint32_t> gens = out.shift.gens;
    for (uint32_t i = 0; i <= n; ++i) {
      const Subgroup& piece = (s >> i & 1) ? out.ladders[i].step1 : out.ladders[i].block;
      gens.insert(gens.end(), piece.gens.begin(), piece.gens.end());
    }
    Subgroup u = closure(E, gens);
    Subgroup d = commutator_subgroup(E, u, u);

    // the paper's product formula, assembled blockwise
    std::vector<uint32_t> fgens;
    for (uint32_t i = 0; i <= n; ++i) {
      const Subgroup& piece = (s >> i & 1) ? out.ladders[i].step2 : out.ladders[i].step1;
      fgens.insert(fgens.end(), piece.gens.begin(), piece.gens.end());
    }
    Subgroup formula = fgens.empty() ? trivial_subgroup(E) : closure(E, fgens);
    require(d.mask == formula.mask,
            "shift_stack_census: derived subgroup disagrees with the product formula");

    out.invariant.push_back(std::move(u));
    out.derived.push_back(std::move(d));
  }

  std::vector<Bitset> seen;
  for (const Subgroup& d : out.derived) {
    bool fresh = true;
    for (const Bitset& m : seen)
      if (m == d.mask) { fresh = false; break; }
    if (fresh) seen.push_back(d.mask);
  }
  out.distinct_derived = uint32_t(seen.size());
  return out;
}

}  // namespace jnnf

#endif
