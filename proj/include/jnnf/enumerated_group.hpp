#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "jnnf/error.hpp"
#include "jnnf/group_concepts.hpp"
#include "jnnf/hashing.hpp"

namespace jnnf {

// Bit mask over element indices of an enumerated group. The canonical
// subgroup identity: two subgroups of the same enumeration are equal iff
// their masks are equal.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(std::size_t i) { w_[i >> 6] |= (uint64_t{1} << (i & 63)); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (uint64_t w : w_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

  bool subset_of(const Bitset& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }

  Bitset operator&(const Bitset& o) const {
    Bitset r(n_);
    for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & o.w_[i];
    return r;
  }

  Bitset operator|(const Bitset& o) const {
    Bitset r(n_);
    for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] | o.w_[i];
    return r;
  }

  friend bool operator==(const Bitset&, const Bitset&) = default;

  // Ascending element-index order; the set whose first differing index is
  // present compares smaller, so among equal-size sets this is lexicographic
  // order on the sorted index lists.
  static int cmp_lex(const Bitset& a, const Bitset& b) {
    for (std::size_t i = 0; i < a.w_.size(); ++i) {
      uint64_t diff = a.w_[i] ^ b.w_[i];
      if (!diff) continue;
      uint64_t low = diff & (~diff + 1);
      return (a.w_[i] & low) ? -1 : 1;
    }
    return 0;
  }

  std::vector<uint32_t> indices() const {
    std::vector<uint32_t> out;
    out.reserve(count());
    for (std::size_t wi = 0; wi < w_.size(); ++wi) {
      uint64_t w = w_[wi];
      while (w) {
        unsigned b = static_cast<unsigned>(__builtin_ctzll(w));
        out.push_back(static_cast<uint32_t>((wi << 6) + b));
        w &= w - 1;
      }
    }
    return out;
  }

  std::size_t hash() const { return hash_span(w_.data(), w_.size()); }

 private:
  std::size_t n_ = 0;
  std::vector<uint64_t> w_;
};

// Full enumeration of a finite group backend. Elements are sorted into
// canonical (value) order and addressed by index; multiplication goes through
// a Cayley table when the group is small enough, otherwise through the
// backend with a hash lookup per product.
template <GroupBackend G>
class Enumerated {
 public:
  using element_type = typename G::element_type;

  static constexpr uint32_t kTableLimit = 2048;

  explicit Enumerated(G base, uint64_t bound = kEnumerationBound) : base_(std::move(base)) {
    std::vector<element_type> gens = base_.generators();
    std::vector<element_type> work{base_.identity()};
    std::unordered_map<element_type, uint32_t, ElementHash<element_type>> seen;
    seen.emplace(work[0], 0);
    for (std::size_t i = 0; i < work.size(); ++i) {
      for (const auto& g : gens) {
        element_type w = base_.mul(work[i], g);
        if (seen.emplace(w, 0).second) {
          work.push_back(std::move(w));
          if (work.size() > bound)
            throw bound_error("Enumerated: group exceeds enumeration bound");
        }
      }
    }
    elems_ = std::move(work);
    std::sort(elems_.begin(), elems_.end());
    index_.reserve(elems_.size());
    for (uint32_t i = 0; i < elems_.size(); ++i) index_.emplace(elems_[i], i);
    id_ = index_.at(base_.identity());
    for (const auto& g : gens) {
      uint32_t gi = index_.at(g);
      if (gi != id_ && std::find(gen_idx_.begin(), gen_idx_.end(), gi) == gen_idx_.end())
        gen_idx_.push_back(gi);
    }
    inv_.resize(elems_.size());
    for (uint32_t i = 0; i < elems_.size(); ++i) inv_[i] = index_.at(base_.inv(elems_[i]));
    if (elems_.size() <= kTableLimit) {
      uint32_t n = static_cast<uint32_t>(elems_.size());
      table_.resize(static_cast<std::size_t>(n) * n);
      for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < n; ++j)
          table_[static_cast<std::size_t>(i) * n + j] = index_.at(base_.mul(elems_[i], elems_[j]));
    }
  }

  const G& backend() const { return base_; }
  uint32_t size() const { return static_cast<uint32_t>(elems_.size()); }
  uint32_t identity_index() const { return id_; }
  const std::vector<uint32_t>& generator_indices() const { return gen_idx_; }
  const element_type& element(uint32_t i) const { return elems_[i]; }

  uint32_t index_of(const element_type& e) const {
    auto it = index_.find(e);
    require(it != index_.end(), "Enumerated: element not in group");
    return it->second;
  }

  bool contains_element(const element_type& e) const { return index_.count(e) != 0; }

  uint32_t mul(uint32_t a, uint32_t b) const {
    if (!table_.empty()) return table_[static_cast<std::size_t>(a) * elems_.size() + b];
    return index_.at(base_.mul(elems_[a], elems_[b]));
  }

  uint32_t inv(uint32_t a) const { return inv_[a]; }
  uint32_t conj(uint32_t x, uint32_t g) const { return mul(mul(inv_[g], x), g); }
  uint32_t comm(uint32_t a, uint32_t b) const { return mul(mul(inv_[a], inv_[b]), mul(a, b)); }

  uint32_t element_order(uint32_t a) const {
    uint32_t x = a, n = 1;
    while (x != id_) {
      x = mul(x, a);
      ++n;
    }
    return n;
  }

 private:
  G base_;
  std::vector<element_type> elems_;
  std::unordered_map<element_type, uint32_t, ElementHash<element_type>> index_;
  uint32_t id_ = 0;
  std::vector<uint32_t> gen_idx_, inv_;
  std::vector<uint32_t> table_;
};

// Subgroup of an enumerated group: membership mask plus a generating set.
// Masks make joins, intersections and dedup cheap even when subgroups are
// numerous; element lists are materialized on demand.
struct Subgroup {
  Bitset mask;
  std::vector<uint32_t> gens;
  uint64_t order = 0;

  std::vector<uint32_t> elements() const { return mask.indices(); }
  bool contains(uint32_t i) const { return mask.get(i); }
  bool subset_of(const Subgroup& o) const { return mask.subset_of(o.mask); }

  friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.mask == b.mask; }

  // Canonical order: by order, then lexicographic on sorted element lists.
  static bool canonical_less(const Subgroup& a, const Subgroup& b) {
    if (a.order != b.order) return a.order < b.order;
    return Bitset::cmp_lex(a.mask, b.mask) < 0;
  }
};

struct SubgroupHash {
  std::size_t operator()(const Subgroup& s) const { return s.mask.hash(); }
};

// Closure of a set of generator indices inside an enumerated group.
template <GroupBackend G>
Subgroup closure(const Enumerated<G>& E, std::vector<uint32_t> gens) {
  Subgroup s;
  s.mask = Bitset(E.size());
  std::vector<uint32_t> work{E.identity_index()};
  s.mask.set(E.identity_index());
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  for (uint32_t g : gens)
    if (g != E.identity_index()) s.gens.push_back(g);
  for (std::size_t i = 0; i < work.size(); ++i) {
    for (uint32_t g : s.gens) {
      uint32_t w = E.mul(work[i], g);
      if (!s.mask.get(w)) {
        s.mask.set(w);
        work.push_back(w);
      }
    }
  }
  s.order = work.size();
  return s;
}

template <GroupBackend G>
Subgroup trivial_subgroup(const Enumerated<G>& E) {
  Subgroup s;
  s.mask = Bitset(E.size());
  s.mask.set(E.identity_index());
  s.order = 1;
  return s;
}

template <GroupBackend G>
Subgroup full_subgroup(const Enumerated<G>& E) {
  return closure(E, E.generator_indices());
}

// Reduces a subgroup's stored generating set greedily: drops any generator
// already generated by the others. Keeps serialized descriptors small.
template <GroupBackend G>
void shrink_generators(const Enumerated<G>& E, Subgroup& s) {
  for (std::size_t i = s.gens.size(); i-- > 0;) {
    std::vector<uint32_t> rest;
    for (std::size_t j = 0; j < s.gens.size(); ++j)
      if (j != i) rest.push_back(s.gens[j]);
    Subgroup t = closure(E, rest);
    if (t.order == s.order) s.gens = std::move(t.gens);
  }
}

}
