#pragma once

#include <concepts>
#include <cstdint>
#include <vector>

#include "jnnf/hashing.hpp"

namespace jnnf {

// A finite group backend exposes an element value type with total order,
// equality and an ADL-findable hash_value, plus the group operations. The
// backend itself carries whatever structure the multiplication needs
// (a permutation domain, a field, monomial tables, ...).
template <class G>
concept GroupBackend = requires(const G& g, const typename G::element_type& a,
                                const typename G::element_type& b) {
  typename G::element_type;
  requires std::copyable<typename G::element_type>;
  requires std::totally_ordered<typename G::element_type>;
  { g.identity() } -> std::same_as<typename G::element_type>;
  { g.mul(a, b) } -> std::same_as<typename G::element_type>;
  { g.inv(a) } -> std::same_as<typename G::element_type>;
  { g.generators() } -> std::convertible_to<std::vector<typename G::element_type>>;
  { hash_value(a) } -> std::convertible_to<std::size_t>;
};

template <class E>
struct ElementHash {
  std::size_t operator()(const E& e) const { return hash_value(e); }
};

// Default resource limits. Enumeration walks every element; lattice
// computations additionally walk subgroup sets and are bounded tighter.
inline constexpr uint64_t kEnumerationBound = 2'000'000;
inline constexpr uint64_t kLatticeBound = 100'000;

}
