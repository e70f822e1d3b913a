#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "jnnf/error.hpp"
#include "jnnf/hashing.hpp"

namespace jnnf {

// Permutation of {0, ..., n-1}, stored as the image array.
// Points map on the right: the image of x under a*b is (x^a)^b.
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(uint32_t degree) : img_(degree) {
    std::iota(img_.begin(), img_.end(), 0u);
  }

  explicit Permutation(std::vector<uint32_t> images) : img_(std::move(images)) {
    std::vector<bool> seen(img_.size(), false);
    for (uint32_t v : img_) {
      require(v < img_.size() && !seen[v], "Permutation: image array is not a bijection");
      seen[v] = true;
    }
  }

  // Product of disjoint (or not) cycles, applied left to right.
  static Permutation from_cycles(uint32_t degree, const std::vector<std::vector<uint32_t>>& cycles) {
    Permutation result(degree);
    for (const auto& cyc : cycles) {
      Permutation one(degree);
      for (std::size_t i = 0; i < cyc.size(); ++i) {
        uint32_t from = cyc[i], to = cyc[(i + 1) % cyc.size()];
        require(from < degree, "Permutation::from_cycles: point out of range");
        one.img_[from] = to;
      }
      Permutation check(one.img_);  // validates bijectivity (repeated points in a cycle)
      result = result * check;
    }
    return result;
  }

  uint32_t degree() const { return static_cast<uint32_t>(img_.size()); }

  uint32_t operator[](uint32_t x) const { return img_[x]; }

  bool is_identity() const {
    for (uint32_t i = 0; i < degree(); ++i)
      if (img_[i] != i) return false;
    return true;
  }

  Permutation operator*(const Permutation& other) const {
    require(degree() == other.degree(), "Permutation: degree mismatch in product");
    Permutation r;
    r.img_.resize(degree());
    for (uint32_t i = 0; i < degree(); ++i) r.img_[i] = other.img_[img_[i]];
    return r;
  }

  Permutation inverse() const {
    Permutation r;
    r.img_.resize(degree());
    for (uint32_t i = 0; i < degree(); ++i) r.img_[img_[i]] = i;
    return r;
  }

  Permutation conjugate_by(const Permutation& g) const { return g.inverse() * (*this) * g; }

  // Smallest moved point, or degree() if identity.
  uint32_t first_moved() const {
    for (uint32_t i = 0; i < degree(); ++i)
      if (img_[i] != i) return i;
    return degree();
  }

  // Nontrivial cycles in canonical form: each starts at its least point,
  // cycles ordered by starting point.
  std::vector<std::vector<uint32_t>> cycles() const {
    std::vector<std::vector<uint32_t>> out;
    std::vector<bool> seen(degree(), false);
    for (uint32_t s = 0; s < degree(); ++s) {
      if (seen[s] || img_[s] == s) continue;
      std::vector<uint32_t> cyc;
      for (uint32_t x = s; !seen[x]; x = img_[x]) {
        seen[x] = true;
        cyc.push_back(x);
      }
      out.push_back(std::move(cyc));
    }
    return out;
  }

  std::string str() const {
    auto cs = cycles();
    if (cs.empty()) return "()";
    std::string s;
    for (const auto& c : cs) {
      s += '(';
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(c[i]);
      }
      s += ')';
    }
    return s;
  }

  const std::vector<uint32_t>& images() const { return img_; }

  // Comparison is lexicographic on image arrays (shorter degree first).
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<uint32_t> img_;
};

inline std::size_t hash_value(const Permutation& p) {
  return hash_span(p.images().data(), p.images().size());
}

}
