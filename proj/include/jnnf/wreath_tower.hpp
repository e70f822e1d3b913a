#ifndef JNNF_WREATH_TOWER_HPP
#define JNNF_WREATH_TOWER_HPP

// Iterated wreath products W_0 = X_0, W_n = X_n wr W_{n-1}, where each level
// wreathes over either the regular action of W_{n-1} on itself or the product
// action on the previous base group. Orders explode immediately (the first
// interesting level already has 60^60 coordinates), so nothing here is
// enumerated: elements are sparse trees, the acted-on points are themselves
// elements one level down, and every verification is exhaustive only where
// the point set is genuinely small, sampled with a fixed seed otherwise.
//
// The companion harness header covers the desk-scale checks where the top
// group is an arbitrary small permutation group; this header is about the
// tower itself and the level-by-level automorphisms assembled from
// automorphisms of the simple factors.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "jnnf/enumerated_group.hpp"
#include "jnnf/error.hpp"
#include "jnnf/perm_group.hpp"
#include "jnnf/wreath_harness.hpp"

namespace jnnf {

inline constexpr uint64_t kTowerSampleSeed = 0x6a6e6e66;
inline constexpr uint64_t kOmegaExhaustiveBound = 10000;

enum class WreathAction { Regular, Product };

// Element of W_n. At level 0 only `leaf` is meaningful (an index into the
// enumeration of X_0). Above that, `top` holds the single W_{n-1} component
// and `base` the finitely many non-identity entries of the X_n-valued map,
// keyed by points of the previous level's acted-on set and kept sorted.
struct TowerElement {
  uint32_t leaf = 0;
  std::vector<std::pair<TowerElement, uint32_t>> base;
  std::vector<TowerElement> top;

  friend bool operator==(const TowerElement& a, const TowerElement& b) {
    return a.leaf == b.leaf && a.base == b.base && a.top == b.top;
  }
  friend bool operator<(const TowerElement& a, const TowerElement& b) {
    if (a.leaf != b.leaf) return a.leaf < b.leaf;
    if (a.base != b.base) return a.base < b.base;
    return a.top < b.top;
  }
};

class WreathTower {
 public:
  struct Level {
    std::shared_ptr<const Enumerated<PermGroup>> x;
    WreathAction action;  // how W_n acts on its point set, consumed one level up
  };

  explicit WreathTower(const std::vector<std::pair<PermGroup, WreathAction>>& spec) {
    require(!spec.empty(), "WreathTower: at least one level required");
    for (const auto& [g, action] : spec) {
      auto ex = std::make_shared<Enumerated<PermGroup>>(g);
      detail::require_nonabelian_simple(*ex, "WreathTower");
      levels_.push_back(Level{std::move(ex), action});
    }
    group_size_.resize(levels_.size());
    omega_size_.resize(levels_.size());
    group_size_[0] = levels_[0].x->size();
    omega_size_[0] = group_size_[0];  // W_0 is its own base group
    for (std::size_t n = 1; n < levels_.size(); ++n) {
      uint64_t bsize = sat_pow(levels_[n].x->size(), omega_size_[n - 1]);
      group_size_[n] = sat_mul(bsize, group_size_[n - 1]);
      omega_size_[n] = levels_[n].action == WreathAction::Regular ? group_size_[n] : bsize;
    }
    sanity_check();
  }

  uint32_t depth() const { return uint32_t(levels_.size()) - 1; }
  const Enumerated<PermGroup>& x(uint32_t level) const { return *levels_.at(level).x; }
  WreathAction action(uint32_t level) const { return levels_.at(level).action; }
  uint64_t group_size(uint32_t level) const { return group_size_.at(level); }   // saturating
  uint64_t omega_size(uint32_t level) const { return omega_size_.at(level); }   // saturating

  TowerElement identity(uint32_t level) const {
    TowerElement e;
    if (level == 0) {
      e.leaf = levels_[0].x->identity_index();
    } else {
      e.top.push_back(identity(level - 1));
    }
    return e;
  }

  bool is_identity(uint32_t level, const TowerElement& e) const {
    return e == identity(level);
  }

  TowerElement mul(uint32_t level, const TowerElement& a, const TowerElement& b) const {
    if (level == 0) {
      TowerElement e;
      e.leaf = levels_[0].x->mul(a.leaf, b.leaf);
      return e;
    }
    const auto& xn = *levels_[level].x;
    TowerElement out;
    out.top.push_back(mul(level - 1, a.top[0], b.top[0]));
    std::vector<TowerElement> points;
    for (const auto& [p, xi] : a.base) points.push_back(p);
    TowerElement hinv = inv(level - 1, a.top[0]);
    for (const auto& [p, xi] : b.base) points.push_back(omega_act(level - 1, p, hinv));
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    for (const auto& p : points) {
      uint32_t xa = entry_or_identity(level, a, p);
      uint32_t xb = entry_or_identity(level, b, omega_act(level - 1, p, a.top[0]));
      uint32_t prod = xn.mul(xa, xb);
      if (prod != xn.identity_index()) out.base.emplace_back(p, prod);
    }
    return out;
  }

  TowerElement inv(uint32_t level, const TowerElement& a) const {
    if (level == 0) {
      TowerElement e;
      e.leaf = levels_[0].x->inv(a.leaf);
      return e;
    }
    const auto& xn = *levels_[level].x;
    TowerElement out;
    out.top.push_back(inv(level - 1, a.top[0]));
    for (const auto& [p, xi] : a.base)
      out.base.emplace_back(omega_act(level - 1, p, a.top[0]), xn.inv(xi));
    std::sort(out.base.begin(), out.base.end());
    return out;
  }

  // The point moved by w, at the level whose action tag applies. Regular:
  // plain right translation. Product: points are base-only elements, the base
  // part of w translates, the top part conjugates; both at once is
  // top(w)^{-1} . point . w. Level 0 is its own base group, so both tags
  // degenerate to translation there.
  TowerElement omega_act(uint32_t level, const TowerElement& point, const TowerElement& w) const {
    if (level == 0 || levels_[level].action == WreathAction::Regular)
      return mul(level, point, w);
    TowerElement t = embed(level, w.top[0]);
    return mul(level, inv(level, t), mul(level, point, w));
  }

  // W_{level-1} as the complement inside W_level
  TowerElement embed(uint32_t level, TowerElement lower) const {
    require(level >= 1, "WreathTower::embed: no level below 0");
    TowerElement e;
    e.top.push_back(std::move(lower));
    return e;
  }

  // kill the base: the projection W_level -> W_{level-1}
  TowerElement project(uint32_t level, const TowerElement& e) const {
    require(level >= 1, "WreathTower::project: no level below 0");
    return e.top.at(0);
  }

  // the element of the base group supported on one point
  TowerElement base_entry(uint32_t level, TowerElement point, uint32_t x_index) const {
    require(level >= 1, "WreathTower::base_entry: level 0 has no base map");
    TowerElement e = identity(level);
    if (x_index != levels_[level].x->identity_index())
      e.base.emplace_back(std::move(point), x_index);
    return e;
  }

  // X_n planted at the identity point plus the embedded generators below;
  // the previous level is transitive on the points, so this generates.
  std::vector<TowerElement> generators(uint32_t level) const {
    std::vector<TowerElement> out;
    if (level == 0) {
      for (uint32_t gi : levels_[0].x->generator_indices()) {
        TowerElement e;
        e.leaf = gi;
        out.push_back(e);
      }
      return out;
    }
    for (const auto& g : generators(level - 1)) out.push_back(embed(level, g));
    for (uint32_t gi : levels_[level].x->generator_indices())
      out.push_back(base_entry(level, identity(level - 1), gi));
    return out;
  }

  // a point of the set W_level acts on: any element under the regular
  // action, a base-only element under the product action
  TowerElement random_point(uint32_t level, std::mt19937_64& rng, uint32_t spread = 2) const {
    if (level == 0 || levels_[level].action == WreathAction::Regular)
      return random_element(level, rng, spread);
    TowerElement e = identity(level);
    e.base = random_base(level, rng, spread);
    return e;
  }

  TowerElement random_element(uint32_t level, std::mt19937_64& rng, uint32_t spread = 2) const {
    if (level == 0) {
      TowerElement e;
      e.leaf = uint32_t(rng() % levels_[0].x->size());
      return e;
    }
    TowerElement e;
    e.top.push_back(random_element(level - 1, rng, spread));
    e.base = random_base(level, rng, spread);
    return e;
  }

 private:
  std::vector<Level> levels_;
  std::vector<uint64_t> group_size_, omega_size_;

  static uint64_t sat_mul(uint64_t a, uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > UINT64_MAX / b) return UINT64_MAX;
    return a * b;
  }

  static uint64_t sat_pow(uint64_t base, uint64_t exp) {
    uint64_t out = 1;
    while (exp--) {
      out = sat_mul(out, base);
      if (out == UINT64_MAX) return out;
    }
    return out;
  }

  uint32_t entry_or_identity(uint32_t level, const TowerElement& e, const TowerElement& point) const {
    for (const auto& [p, xi] : e.base)
      if (p == point) return xi;
    return levels_[level].x->identity_index();
  }

  std::vector<std::pair<TowerElement, uint32_t>> random_base(uint32_t level, std::mt19937_64& rng,
                                                             uint32_t spread) const {
    std::vector<std::pair<TowerElement, uint32_t>> base;
    uint32_t count = uint32_t(rng() % (spread + 1));
    for (uint32_t i = 0; i < count; ++i) {
      uint32_t xi = uint32_t(rng() % levels_[level].x->size());
      if (xi == levels_[level].x->identity_index()) continue;
      base.emplace_back(random_point(level - 1, rng, spread), xi);
    }
    std::sort(base.begin(), base.end());
    base.erase(std::unique(base.begin(), base.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               base.end());
    return base;
  }

  // Spot checks at construction: the multiplication is associative, inverses
  // cancel, the kill-base projection is a homomorphism, the point action is a
  // genuine right action, and under the product option the complement acts by
  // conjugation on base-only points.
  void sanity_check() const {
    std::mt19937_64 rng(kTowerSampleSeed);
    for (uint32_t level = 0; level <= depth(); ++level) {
      for (uint32_t trial = 0; trial < 12; ++trial) {
        TowerElement a = random_element(level, rng);
        TowerElement b = random_element(level, rng);
        TowerElement c = random_element(level, rng);
        require(mul(level, mul(level, a, b), c) == mul(level, a, mul(level, b, c)),
                "WreathTower: multiplication is not associative");
        require(is_identity(level, mul(level, a, inv(level, a))),
                "WreathTower: inverse does not cancel");
        if (level >= 1)
          require(project(level, mul(level, a, b)) ==
                      mul(level - 1, project(level, a), project(level, b)),
                  "WreathTower: projection is not a homomorphism");
        TowerElement p = random_point(level, rng);
        require(omega_act(level, omega_act(level, p, a), b) ==
                    omega_act(level, p, mul(level, a, b)),
                "WreathTower: point action is not an action");
        if (level >= 1 && levels_[level].action == WreathAction::Product) {
          TowerElement t = embed(level, random_element(level - 1, rng));
          require(omega_act(level, p, t) == mul(level, inv(level, t), mul(level, p, t)),
                  "WreathTower: complement does not act by conjugation");
        }
      }
    }
  }
};

// Level automorphisms phi_i of the X_i, assembled into an automorphism of
// every W_n: the top component maps by the previous level's automorphism,
// base entries map through phi_n while their points are moved by the
// previous level's automorphism.
struct TowerAutomorphism {
  std::vector<std::vector<uint32_t>> phi;
  uint64_t sample_seed = 0;
};

inline std::vector<uint32_t> identity_table(const Enumerated<PermGroup>& x) {
  std::vector<uint32_t> t(x.size());
  for (uint32_t i = 0; i < x.size(); ++i) t[i] = i;
  return t;
}

inline std::vector<uint32_t> inverse_table(const std::vector<uint32_t>& phi) {
  std::vector<uint32_t> t(phi.size());
  for (uint32_t i = 0; i < phi.size(); ++i) t[phi[i]] = i;
  return t;
}

inline TowerElement psi_apply(const WreathTower& tower,
                              const std::vector<std::vector<uint32_t>>& phi, uint32_t level,
                              const TowerElement& e) {
  if (level == 0) {
    TowerElement out;
    out.leaf = phi[0][e.leaf];
    return out;
  }
  TowerElement out;
  out.top.push_back(psi_apply(tower, phi, level - 1, e.top[0]));
  for (const auto& [p, xi] : e.base)
    out.base.emplace_back(psi_apply(tower, phi, level - 1, p), phi[level][xi]);
  std::sort(out.base.begin(), out.base.end());
  return out;
}

// Verifies each phi_i is an automorphism of X_i (bijection, homomorphism on
// all pairs), then checks the equivariance identity that makes the assembled
// map well defined level by level: applying the previous automorphism to a
// moved point is the same as moving the mapped point by the mapped element.
// Point sets small enough are swept exhaustively, larger ones are sampled
// with the recorded seed. The restriction of each psi_n to the complement is
// checked to be psi_{n-1}, and the homomorphism property of psi_n itself is
// sampled at every level.
inline TowerAutomorphism build_psi(const WreathTower& tower,
                                   std::vector<std::vector<uint32_t>> phis,
                                   uint64_t seed = kTowerSampleSeed, uint32_t samples = 200) {
  require(phis.size() == std::size_t(tower.depth()) + 1,
          "build_psi: one automorphism per level required");
  for (uint32_t level = 0; level <= tower.depth(); ++level) {
    const auto& x = tower.x(level);
    const auto& phi = phis[level];
    require(phi.size() == x.size(), "build_psi: table size mismatch");
    std::vector<char> hit(x.size(), 0);
    for (uint32_t v : phi) {
      require(v < x.size() && !hit[v], "build_psi: table is not a bijection");
      hit[v] = 1;
    }
    for (uint32_t a = 0; a < x.size(); ++a)
      for (uint32_t b = 0; b < x.size(); ++b)
        require(phi[x.mul(a, b)] == x.mul(phi[a], phi[b]), "build_psi: table is not a homomorphism");
  }

  std::mt19937_64 rng(seed);
  for (uint32_t level = 1; level <= tower.depth(); ++level) {
    uint32_t below = level - 1;
    std::vector<TowerElement> points;
    if (tower.omega_size(below) <= kOmegaExhaustiveBound) {
      // only level 0 is ever this small: its points are the X_0 elements
      for (uint32_t i = 0; i < tower.x(0).size(); ++i) {
        TowerElement p;
        p.leaf = i;
        points.push_back(p);
      }
    } else {
      for (uint32_t i = 0; i < samples; ++i) points.push_back(tower.random_point(below, rng));
    }
    std::vector<TowerElement> movers = tower.generators(below);
    for (uint32_t i = 0; i < samples / 4; ++i) movers.push_back(tower.random_element(below, rng));
    for (const auto& p : points)
      for (const auto& y : movers) {
        TowerElement lhs = psi_apply(tower, phis, below, tower.omega_act(below, p, y));
        TowerElement rhs = tower.omega_act(below, psi_apply(tower, phis, below, p),
                                           psi_apply(tower, phis, below, y));
        require(lhs == rhs, "build_psi: equivariance fails at this level");
      }

    for (const auto& g : tower.generators(below))
      require(psi_apply(tower, phis, level, tower.embed(level, g)) ==
                  tower.embed(level, psi_apply(tower, phis, below, g)),
              "build_psi: restriction to the complement disagrees");

    for (uint32_t i = 0; i < samples / 4; ++i) {
      TowerElement a = tower.random_element(level, rng);
      TowerElement b = tower.random_element(level, rng);
      require(psi_apply(tower, phis, level, tower.mul(level, a, b)) ==
                  tower.mul(level, psi_apply(tower, phis, level, a),
                            psi_apply(tower, phis, level, b)),
              "build_psi: assembled map is not a homomorphism");
    }
  }

  TowerAutomorphism out;
  out.phi = std::move(phis);
  out.sample_seed = seed;
  return out;
}

// Applying first then second should agree with the automorphism assembled
// from the composed tables. Exhaustive on generators, sampled with the fixed
// seed otherwise; any mismatch makes the answer false.
inline bool psi_compose_check(const WreathTower& tower, const TowerAutomorphism& first,
                              const TowerAutomorphism& second, uint64_t seed = kTowerSampleSeed,
                              uint32_t samples = 200) {
  require(first.phi.size() == second.phi.size() &&
              first.phi.size() == std::size_t(tower.depth()) + 1,
          "psi_compose_check: automorphisms do not live on this tower");
  std::vector<std::vector<uint32_t>> composed(first.phi.size());
  for (std::size_t i = 0; i < first.phi.size(); ++i) {
    require(first.phi[i].size() == second.phi[i].size(),
            "psi_compose_check: level size mismatch");
    composed[i].resize(first.phi[i].size());
    for (uint32_t v = 0; v < first.phi[i].size(); ++v)
      composed[i][v] = second.phi[i][first.phi[i][v]];
  }
  TowerAutomorphism both = build_psi(tower, composed, seed);

  std::mt19937_64 rng(seed);
  for (uint32_t level = 0; level <= tower.depth(); ++level) {
    std::vector<TowerElement> probes = tower.generators(level);
    for (uint32_t i = 0; i < samples; ++i) probes.push_back(tower.random_element(level, rng));
    for (const auto& e : probes) {
      TowerElement stepwise =
          psi_apply(tower, second.phi, level, psi_apply(tower, first.phi, level, e));
      if (!(stepwise == psi_apply(tower, both.phi, level, e))) return false;
    }
  }
  return true;
}

}  // namespace jnnf

#endif
