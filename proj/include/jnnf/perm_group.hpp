#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <vector>

#include "jnnf/error.hpp"
#include "jnnf/permutation.hpp"

namespace jnnf {

// Deterministic stabilizer chain (Schreier-Sims). No randomization: base points
// are the smallest moved point of the generator that opens each level, orbits
// are grown breadth-first in generator order, and Schreier generators are
// processed in orbit-then-generator order. The same generators always produce
// the same chain.
class StabilizerChain {
 public:
  struct Level {
    uint32_t base = 0;
    std::vector<Permutation> gens;
    std::vector<uint32_t> orbit;            // BFS order, orbit[0] == base
    std::vector<int32_t> orbit_pos;         // point -> index into orbit, -1 outside
    std::vector<Permutation> transversal;   // transversal[i] maps base to orbit[i]
  };

  StabilizerChain(uint32_t degree, const std::vector<Permutation>& gens) : degree_(degree) {
    std::vector<Permutation> seed;
    for (const auto& g : gens) {
      require(g.degree() == degree_, "StabilizerChain: generator degree mismatch");
      if (!g.is_identity()) seed.push_back(g);
    }
    if (!seed.empty()) {
      uint32_t base = degree_;
      for (const auto& g : seed) base = std::min(base, g.first_moved());
      levels_.push_back(make_level(base, std::move(seed)));
      complete(0);
    }
  }

  uint32_t degree() const { return degree_; }
  const std::vector<Level>& levels() const { return levels_; }

  std::vector<uint32_t> base() const {
    std::vector<uint32_t> b;
    for (const auto& lv : levels_) b.push_back(lv.base);
    return b;
  }

  uint64_t order() const {
    uint64_t n = 1;
    for (const auto& lv : levels_) {
      uint64_t s = lv.orbit.size();
      require(n <= UINT64_MAX / s, "StabilizerChain: order overflows 64 bits");
      n *= s;
    }
    return n;
  }

  bool contains(const Permutation& p) const {
    if (p.degree() != degree_) return false;
    Permutation r = p;
    if (!sift(0, r)) return false;
    return r.is_identity();
  }

 private:
  uint32_t degree_;
  std::vector<Level> levels_;

  Level make_level(uint32_t base, std::vector<Permutation> gens) const {
    Level lv;
    lv.base = base;
    lv.gens = std::move(gens);
    rebuild_orbit(lv);
    return lv;
  }

  void rebuild_orbit(Level& lv) const {
    lv.orbit.assign(1, lv.base);
    lv.orbit_pos.assign(degree_, -1);
    lv.orbit_pos[lv.base] = 0;
    lv.transversal.assign(1, Permutation(degree_));
    for (std::size_t i = 0; i < lv.orbit.size(); ++i) {
      for (const auto& g : lv.gens) {
        uint32_t img = g[lv.orbit[i]];
        if (lv.orbit_pos[img] < 0) {
          lv.orbit_pos[img] = static_cast<int32_t>(lv.orbit.size());
          lv.orbit.push_back(img);
          lv.transversal.push_back(lv.transversal[i] * g);
        }
      }
    }
  }

  // Strips r through levels starting at i. Returns false if some base image
  // leaves its orbit (r is then the partial residue); true once all levels are
  // consumed (r is the final residue, identity iff the element sifted).
  bool sift(std::size_t i, Permutation& r) const {
    for (std::size_t j = i; j < levels_.size(); ++j) {
      const Level& lv = levels_[j];
      int32_t pos = lv.orbit_pos[r[lv.base]];
      if (pos < 0) return false;
      r = r * lv.transversal[pos].inverse();
    }
    return true;
  }

  // Residue of sifting from level i, together with the level index at which
  // sifting stopped (levels_.size() if it ran through).
  std::pair<Permutation, std::size_t> strip(std::size_t i, Permutation g) const {
    for (std::size_t j = i; j < levels_.size(); ++j) {
      const Level& lv = levels_[j];
      int32_t pos = lv.orbit_pos[g[lv.base]];
      if (pos < 0) return {std::move(g), j};
      g = g * lv.transversal[pos].inverse();
    }
    return {std::move(g), levels_.size()};
  }

  // A residue that fixes the bases of levels 0..j-1 is a strong generator for
  // every level from i+1 to j: it belongs to all those stabilizer groups, and
  // even though it fixes their bases it can still enlarge their basic orbits.
  // Append it to each and re-verify bottom-up. j == levels_.size() opens a new
  // bottom level first.
  void place_residue(std::size_t i, const Permutation& residue, std::size_t j) {
    if (j == levels_.size()) levels_.push_back(make_level(residue.first_moved(), {}));
    for (std::size_t l = i + 1; l <= j; ++l) levels_[l].gens.push_back(residue);
    for (std::size_t l = j; l >= i + 1; --l) complete(l);
  }

  // Establishes the chain property at level i: every Schreier generator of
  // level i sifts to the identity through the chain below. Access goes through
  // the index each time: recursive calls append levels, which reallocates the
  // vector. Level i itself is stable while this runs (new strong generators
  // land strictly below, so its orbit and generator list do not move).
  void complete(std::size_t i) {
    rebuild_orbit(levels_[i]);
    for (std::size_t a = 0; a < levels_[i].orbit.size(); ++a) {
      for (std::size_t s = 0; s < levels_[i].gens.size(); ++s) {
        uint32_t img = levels_[i].gens[s][levels_[i].orbit[a]];
        Permutation schreier = levels_[i].transversal[a] * levels_[i].gens[s] *
                               levels_[i].transversal[levels_[i].orbit_pos[img]].inverse();
        auto [residue, j] = strip(i + 1, std::move(schreier));
        if (!residue.is_identity()) place_residue(i, residue, j);
      }
    }
  }
};

// Finite permutation group given by generators on {0, ..., degree-1}.
// The stabilizer chain is built lazily and cached; all derived data
// (order, membership, orbits, blocks) is deterministic.
class PermGroup {
 public:
  using element_type = Permutation;

  PermGroup() : degree_(0) {}

  PermGroup(uint32_t degree, std::vector<Permutation> gens) : degree_(degree) {
    for (auto& g : gens) {
      require(g.degree() == degree_, "PermGroup: generator degree mismatch");
      if (g.is_identity()) continue;
      if (std::find(gens_.begin(), gens_.end(), g) == gens_.end()) gens_.push_back(std::move(g));
    }
  }

  uint32_t degree() const { return degree_; }
  const std::vector<Permutation>& generators() const { return gens_; }

  Permutation identity() const { return Permutation(degree_); }
  Permutation mul(const Permutation& a, const Permutation& b) const { return a * b; }
  Permutation inv(const Permutation& a) const { return a.inverse(); }

  const StabilizerChain& chain() const {
    if (!chain_) chain_ = std::make_shared<StabilizerChain>(degree_, gens_);
    return *chain_;
  }

  uint64_t order() const { return chain().order(); }
  bool contains(const Permutation& p) const {
    return p.degree() == degree_ && chain().contains(p);
  }
  bool is_trivial() const { return gens_.empty(); }

  // Orbits on the natural domain, each sorted, ordered by least point.
  std::vector<std::vector<uint32_t>> orbits() const {
    std::vector<std::vector<uint32_t>> out;
    std::vector<bool> seen(degree_, false);
    for (uint32_t s = 0; s < degree_; ++s) {
      if (seen[s]) continue;
      std::vector<uint32_t> orb{s};
      seen[s] = true;
      for (std::size_t i = 0; i < orb.size(); ++i)
        for (const auto& g : gens_) {
          uint32_t img = g[orb[i]];
          if (!seen[img]) {
            seen[img] = true;
            orb.push_back(img);
          }
        }
      std::sort(orb.begin(), orb.end());
      out.push_back(std::move(orb));
    }
    return out;
  }

  bool is_transitive() const { return degree_ > 0 && orbits().size() == 1; }

  // Smallest subgroup containing the seeds that is normalized by this group.
  PermGroup normal_closure(const std::vector<Permutation>& seeds) const {
    std::vector<Permutation> ngens;
    std::optional<StabilizerChain> cur;
    std::deque<Permutation> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      Permutation t = std::move(queue.front());
      queue.pop_front();
      require(t.degree() == degree_, "normal_closure: seed degree mismatch");
      if (t.is_identity()) continue;
      if (cur && cur->contains(t)) continue;
      ngens.push_back(t);
      cur.emplace(degree_, ngens);
      for (const auto& g : gens_) queue.push_back(t.conjugate_by(g));
    }
    return PermGroup(degree_, std::move(ngens));
  }

  // All minimal nontrivial block systems (empty result means primitive).
  // Each system is a partition: blocks sorted internally and by least point.
  // Throws for intransitive groups, where block systems are not well defined.
  std::vector<std::vector<std::vector<uint32_t>>> minimal_block_systems() const {
    require(is_transitive(), "minimal_block_systems: group must be transitive");
    std::vector<std::vector<uint32_t>> classmaps;  // canonical class map per candidate
    for (uint32_t beta = 1; beta < degree_; ++beta) {
      auto cm = finest_blocks_with(0, beta);
      if (cm.empty()) continue;  // collapsed to a single block
      if (std::find(classmaps.begin(), classmaps.end(), cm) == classmaps.end())
        classmaps.push_back(std::move(cm));
    }
    // Keep the finest ones: drop any candidate strictly coarsened by another.
    std::vector<std::vector<uint32_t>> minimal;
    for (const auto& p : classmaps) {
      bool has_finer = false;
      for (const auto& q : classmaps)
        if (&p != &q && refines(q, p) && q != p) {
          has_finer = true;
          break;
        }
      if (!has_finer) minimal.push_back(p);
    }
    std::vector<std::vector<std::vector<uint32_t>>> out;
    for (const auto& cm : minimal) {
      uint32_t nblocks = *std::max_element(cm.begin(), cm.end()) + 1;
      std::vector<std::vector<uint32_t>> blocks(nblocks);
      for (uint32_t x = 0; x < degree_; ++x) blocks[cm[x]].push_back(x);
      out.push_back(std::move(blocks));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool is_primitive() const { return minimal_block_systems().empty(); }

 private:
  uint32_t degree_;
  std::vector<Permutation> gens_;
  mutable std::shared_ptr<StabilizerChain> chain_;

  // Atkinson's algorithm: the finest block system in which a and b share a
  // block. Returns the canonical class map, or empty if everything collapses
  // into one block.
  std::vector<uint32_t> finest_blocks_with(uint32_t a, uint32_t b) const {
    std::vector<uint32_t> parent(degree_);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](uint32_t x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    std::deque<std::pair<uint32_t, uint32_t>> queue{{a, b}};
    parent[find(b)] = find(a);
    while (!queue.empty()) {
      auto [x, y] = queue.front();
      queue.pop_front();
      for (const auto& g : gens_) {
        uint32_t rx = find(g[x]), ry = find(g[y]);
        if (rx != ry) {
          parent[ry] = rx;
          queue.emplace_back(rx, ry);
        }
      }
    }
    // canonical class map, classes numbered by first occurrence
    std::vector<uint32_t> cm(degree_);
    std::map<uint32_t, uint32_t> renumber;
    for (uint32_t x = 0; x < degree_; ++x) {
      uint32_t r = find(x);
      auto it = renumber.find(r);
      if (it == renumber.end()) it = renumber.emplace(r, static_cast<uint32_t>(renumber.size())).first;
      cm[x] = it->second;
    }
    if (renumber.size() <= 1) return {};
    return cm;
  }

  // True if partition p refines partition q (every p-class sits inside a q-class).
  static bool refines(const std::vector<uint32_t>& p, const std::vector<uint32_t>& q) {
    std::map<uint32_t, uint32_t> img;
    for (std::size_t x = 0; x < p.size(); ++x) {
      auto it = img.find(p[x]);
      if (it == img.end())
        img.emplace(p[x], q[x]);
      else if (it->second != q[x])
        return false;
    }
    return true;
  }
};

}
