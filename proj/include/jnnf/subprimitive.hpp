#pragma once

// Subprimitivity test for a permutation group: every normal subgroup must
// act faithfully on each of its orbits.  The first failure found is
// returned with the normal subgroup, the orbit, and a non-identity element
// fixing that orbit pointwise.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "jnnf/enumerated_group.hpp"
#include "jnnf/group_kernel.hpp"
#include "jnnf/perm_group.hpp"
#include "jnnf/permutation.hpp"

namespace jnnf {

struct SubprimitivityReport {
  bool subprimitive = true;
  std::optional<Subgroup> offending_normal;
  std::vector<uint32_t> orbit;
  std::optional<Permutation> kernel_element;
};

inline SubprimitivityReport is_subprimitive(const Enumerated<PermGroup>& E) {
  const uint32_t degree = E.backend().degree();
  SubprimitivityReport report;
  Subgroup whole = full_subgroup(E);

  for (const auto& k : normal_subgroups(E, whole)) {
    if (k.order == 1) continue;

    std::vector<int> orbit_id(degree, -1);
    std::vector<std::vector<uint32_t>> orbits;
    for (uint32_t pt = 0; pt < degree; ++pt) {
      if (orbit_id[pt] >= 0) continue;
      int id = static_cast<int>(orbits.size());
      orbits.push_back({pt});
      orbit_id[pt] = id;
      for (std::size_t i = 0; i < orbits[id].size(); ++i)
        for (uint32_t g : k.gens) {
          uint32_t img = E.element(g)[orbits[id][i]];
          if (orbit_id[img] < 0) {
            orbit_id[img] = id;
            orbits[id].push_back(img);
          }
        }
    }

    for (auto& orbit : orbits) {
      for (uint32_t x : k.elements()) {
        if (x == E.identity_index()) continue;
        const Permutation& perm = E.element(x);
        bool fixes_orbit = true;
        for (uint32_t pt : orbit)
          if (perm[pt] != pt) {
            fixes_orbit = false;
            break;
          }
        if (fixes_orbit) {
          report.subprimitive = false;
          report.offending_normal = k;
          std::sort(orbit.begin(), orbit.end());
          report.orbit = orbit;
          report.kernel_element = perm;
          return report;
        }
      }
    }
  }
  return report;
}

}  // namespace jnnf
