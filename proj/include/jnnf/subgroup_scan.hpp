#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "jnnf/enumerated_group.hpp"
#include "jnnf/error.hpp"
#include "jnnf/group_kernel.hpp"

namespace jnnf {

// Exhaustive subgroup scans. These are deliberately simple: breadth-first
// extension of known subgroups by one element at a time. Every subgroup is
// generated by its elements of prime power order (each element is a product
// of commuting prime power parts, which are its own powers), so extending by
// those alone already reaches everything.

namespace detail {

template <GroupBackend G>
std::vector<uint32_t> prime_power_order_elements(const Enumerated<G>& E, const Subgroup& within) {
  std::vector<uint32_t> out;
  for (uint32_t i : within.elements()) {
    if (i == E.identity_index()) continue;
    uint64_t n = E.element_order(i);
    uint64_t p = 2;
    while (p * p <= n && n % p != 0) ++p;
    if (p * p > n) p = n;  // n prime
    while (n % p == 0) n /= p;
    if (n == 1) out.push_back(i);
  }
  return out;
}

// Dedup store keyed by mask hash with exact confirmation.
template <GroupBackend G>
struct SubgroupStore {
  std::unordered_map<std::size_t, std::vector<std::size_t>> by_hash;
  std::vector<Subgroup> items;

  bool insert(Subgroup s) {
    std::size_t h = s.mask.hash();
    auto& bucket = by_hash[h];
    for (std::size_t idx : bucket)
      if (items[idx].mask == s.mask) return false;
    bucket.push_back(items.size());
    items.push_back(std::move(s));
    return true;
  }
};

}

// Every subgroup of U. Feasible for |U| up to a few thousand; the bound is a
// guard, not a promise of speed.
template <GroupBackend G>
std::vector<Subgroup> all_subgroups(const Enumerated<G>& E, const Subgroup& u,
                                    uint64_t bound = 5000) {
  require(u.order <= bound, "all_subgroups: group exceeds scan bound");
  auto ppelts = detail::prime_power_order_elements(E, u);
  detail::SubgroupStore<G> store;
  store.insert(trivial_subgroup(E));
  std::deque<std::size_t> work{0};
  while (!work.empty()) {
    std::size_t hi = work.front();
    work.pop_front();
    Subgroup h = store.items[hi];
    for (uint32_t x : ppelts) {
      if (h.contains(x)) continue;
      std::vector<uint32_t> gens = h.gens;
      gens.push_back(x);
      Subgroup s = closure(E, gens);
      if (!s.subset_of(u)) continue;
      if (store.insert(s)) {
        require(store.items.size() <= 200000, "all_subgroups: too many subgroups");
        work.push_back(store.items.size() - 1);
      }
    }
  }
  auto out = std::move(store.items);
  std::sort(out.begin(), out.end(), Subgroup::canonical_less);
  return out;
}

// Subgroups L with H <= L <= U, found by extending H upward.
template <GroupBackend G>
std::vector<Subgroup> subgroups_containing(const Enumerated<G>& E, const Subgroup& u,
                                           const Subgroup& h, uint64_t bound = 20000) {
  require(u.order <= bound, "subgroups_containing: group exceeds scan bound");
  require(h.subset_of(u), "subgroups_containing: H is not inside U");
  detail::SubgroupStore<G> store;
  store.insert(h);
  std::deque<std::size_t> work{0};
  auto uelts = u.elements();
  while (!work.empty()) {
    std::size_t hi = work.front();
    work.pop_front();
    Subgroup cur = store.items[hi];
    for (uint32_t x : uelts) {
      if (cur.contains(x)) continue;
      std::vector<uint32_t> gens = cur.gens;
      gens.push_back(x);
      Subgroup s = closure(E, gens);
      if (!s.subset_of(u)) continue;
      if (store.insert(s)) {
        require(store.items.size() <= 200000, "subgroups_containing: too many subgroups");
        work.push_back(store.items.size() - 1);
      }
    }
  }
  auto out = std::move(store.items);
  std::sort(out.begin(), out.end(), Subgroup::canonical_less);
  return out;
}

// Oracle for the normal subgroup lattice: filter the full subgroup scan.
template <GroupBackend G>
std::vector<Subgroup> normal_subgroups_by_scan(const Enumerated<G>& E, const Subgroup& u,
                                               uint64_t bound = 5000) {
  std::vector<Subgroup> out;
  for (auto& s : all_subgroups(E, u, bound)) {
    bool normal = true;
    for (uint32_t g : u.gens) {
      for (uint32_t x : s.gens)
        if (!s.contains(E.conj(x, g))) {
          normal = false;
          break;
        }
      if (!normal) break;
    }
    if (normal) out.push_back(std::move(s));
  }
  return out;
}

}
