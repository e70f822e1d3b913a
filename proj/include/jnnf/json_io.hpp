// JSON exchange formats for permutation groups and subgroup descriptors,
// plus the canonical serialization behind group content hashes.
//
// A group file looks like
//
//   {"kind": "perm", "degree": 5, "generators": [[[0,1,2,3,4]], [[2,3,4]]]}
//
// where each generator is a list of cycles and each cycle a list of points.
// Writing uses the canonical cycle form (each cycle starts at its least
// point, cycles ordered by starting point), so write-then-read is lossless
// and byte-stable.
//
// Content hashes are taken over the closure, not the presented generators:
// two files listing different generating sets of the same group hash to the
// same key. Groups too large to enumerate fall back to hashing the sorted
// generator images, which still ignores list order.
#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "jnnf/content_hash.hpp"
#include "jnnf/enumerated_group.hpp"
#include "jnnf/error.hpp"
#include "jnnf/perm_group.hpp"
#include "jnnf/permutation.hpp"

namespace jnnf {

// Enumeration ceiling for closure-based canonicalization.
inline constexpr uint64_t kCanonicalizeBound = 200000;

inline nlohmann::json permutation_to_cycles_json(const Permutation& p) {
  nlohmann::json cycles = nlohmann::json::array();
  for (const auto& cyc : p.cycles()) cycles.push_back(cyc);
  return cycles;
}

inline Permutation permutation_from_cycles_json(uint32_t degree, const nlohmann::json& j,
                                                const char* what) {
  require(j.is_array(), std::string(what) + ": generator must be an array of cycles");
  std::vector<std::vector<uint32_t>> cycles;
  for (const auto& cyc : j) {
    require(cyc.is_array(), std::string(what) + ": cycle must be an array of points");
    std::vector<uint32_t> points;
    for (const auto& pt : cyc) {
      require(pt.is_number_unsigned(), std::string(what) + ": points must be nonnegative integers");
      points.push_back(pt.get<uint32_t>());
    }
    cycles.push_back(std::move(points));
  }
  return Permutation::from_cycles(degree, cycles);
}

inline nlohmann::json perm_group_to_json(const PermGroup& g) {
  nlohmann::json j;
  j["kind"] = "perm";
  j["degree"] = g.degree();
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& p : g.generators()) gens.push_back(permutation_to_cycles_json(p));
  j["generators"] = std::move(gens);
  return j;
}

inline PermGroup perm_group_from_json(const nlohmann::json& j) {
  require(j.is_object(), "perm group: expected a JSON object");
  require(j.contains("kind") && j["kind"] == "perm", "perm group: missing kind \"perm\"");
  require(j.contains("degree") && j["degree"].is_number_unsigned(),
          "perm group: missing integer field 'degree'");
  require(j.contains("generators") && j["generators"].is_array(),
          "perm group: missing array field 'generators'");
  const uint32_t degree = j["degree"].get<uint32_t>();
  std::vector<Permutation> gens;
  for (const auto& gj : j["generators"])
    gens.push_back(permutation_from_cycles_json(degree, gj, "perm group"));
  return PermGroup(degree, std::move(gens));
}

// The byte string the content hash is taken over. For enumerable groups this
// lists every element's image vector in sorted order, which is independent
// of how the group was presented.
inline std::string canonical_group_serialization(const PermGroup& g,
                                                 uint64_t bound = kCanonicalizeBound) {
  nlohmann::json j;
  j["kind"] = "perm";
  j["degree"] = g.degree();
  const uint64_t order = g.order();
  j["order"] = order;
  if (order <= bound) {
    Enumerated<PermGroup> closed(g, bound);
    nlohmann::json elems = nlohmann::json::array();
    for (uint32_t i = 0; i < closed.size(); ++i) elems.push_back(closed.element(i).images());
    j["elements"] = std::move(elems);
  } else {
    std::vector<std::vector<uint32_t>> images;
    for (const auto& p : g.generators()) images.push_back(p.images());
    std::sort(images.begin(), images.end());
    j["generators"] = images;
  }
  return j.dump();
}

inline std::string group_content_hash(const PermGroup& g, uint64_t bound = kCanonicalizeBound) {
  return content_hash(canonical_group_serialization(g, bound));
}

// A subgroup relative to a parent group identified by its content hash. The
// subgroup itself is carried either as a generating set or as an exhaustive
// element list; exactly one of the two is populated.
struct SubgroupDescriptor {
  std::string parent;
  uint32_t degree = 0;
  std::vector<Permutation> generators;
  std::vector<Permutation> elements;
};

inline nlohmann::json subgroup_to_json(const SubgroupDescriptor& d) {
  require(d.generators.empty() != d.elements.empty(),
          "subgroup descriptor: exactly one of generators/elements must be populated");
  nlohmann::json j;
  j["parent"] = d.parent;
  j["degree"] = d.degree;
  const auto& perms = d.generators.empty() ? d.elements : d.generators;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : perms) list.push_back(permutation_to_cycles_json(p));
  j[d.generators.empty() ? "elements" : "generators"] = std::move(list);
  return j;
}

inline SubgroupDescriptor subgroup_from_json(const nlohmann::json& j) {
  require(j.is_object(), "subgroup descriptor: expected a JSON object");
  require(j.contains("parent") && j["parent"].is_string(),
          "subgroup descriptor: missing string field 'parent'");
  require(j.contains("degree") && j["degree"].is_number_unsigned(),
          "subgroup descriptor: missing integer field 'degree'");
  const bool has_gens = j.contains("generators");
  const bool has_elems = j.contains("elements");
  require(has_gens != has_elems,
          "subgroup descriptor: exactly one of 'generators'/'elements' must be present");
  SubgroupDescriptor d;
  d.parent = j["parent"].get<std::string>();
  d.degree = j["degree"].get<uint32_t>();
  const auto& list = has_gens ? j["generators"] : j["elements"];
  require(list.is_array(), "subgroup descriptor: permutation list must be an array");
  auto& into = has_gens ? d.generators : d.elements;
  for (const auto& pj : list)
    into.push_back(permutation_from_cycles_json(d.degree, pj, "subgroup descriptor"));
  return d;
}

}  // namespace jnnf
