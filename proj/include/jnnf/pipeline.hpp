// Configured verification pipelines. A pipeline is a TOML file naming a
// seed, optional bounds, an output path and a list of jobs; each job names a
// module, an operation in that module's registry, and the operation's
// parameters. The whole configuration is validated against the registry
// before any job runs, so a typo in job twelve is reported without spending
// ten minutes on jobs one through eleven.
//
// Execution is deterministic: given the same configuration and seed, every
// job produces a byte-identical report body (the timing field is excluded
// from the body exactly so this can be byte-compared). Jobs are independent
// of one another and run concurrently on a small worker pool; reports are
// collected in declared order regardless of completion order.
//
// Each job's inputs are canonicalized and content-hashed. Groups referenced
// by name or file are hashed through their closure, so two files presenting
// the same group through different generator lists produce the same input
// hash, and therefore the same cache key.
#pragma once

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "jnnf/chain_checks.hpp"
#include "jnnf/congruence_sl.hpp"
#include "jnnf/content_hash.hpp"
#include "jnnf/enumerated_group.hpp"
#include "jnnf/error.hpp"
#include "jnnf/gamma_sets.hpp"
#include "jnnf/group_kernel.hpp"
#include "jnnf/json_io.hpp"
#include "jnnf/monomial_stage.hpp"
#include "jnnf/perm_group.hpp"
#include "jnnf/report.hpp"
#include "jnnf/result_cache.hpp"
#include "jnnf/shift_stack.hpp"
#include "jnnf/standard_groups.hpp"
#include "jnnf/subgroup_scan.hpp"
#include "jnnf/toml_lite.hpp"
#include "jnnf/wreath_harness.hpp"
#include "jnnf/wreath_tower.hpp"

namespace jnnf {

struct PipelineBounds {
  uint64_t enumeration = kEnumerationBound;
  uint64_t degree = 10000;
};

struct JobSpec {
  std::string module;
  std::string operation;
  TomlValue params;  // table of everything except module/operation
};

struct PipelineConfig {
  uint64_t seed = 0;
  std::filesystem::path output = "reports.jsonl";
  PipelineBounds bounds;
  std::vector<JobSpec> jobs;
};

inline nlohmann::json toml_to_json(const TomlValue& v) {
  switch (v.kind) {
    case TomlValue::Kind::String: return v.str;
    case TomlValue::Kind::Integer: return v.num;
    case TomlValue::Kind::Boolean: return v.flag;
    case TomlValue::Kind::Array: {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& e : v.arr) a.push_back(toml_to_json(e));
      return a;
    }
    case TomlValue::Kind::Table: {
      nlohmann::json o = nlohmann::json::object();
      for (const auto& [k, e] : v.tab) o[k] = toml_to_json(e);
      return o;
    }
  }
  return nullptr;
}

inline PipelineConfig parse_pipeline_config(const TomlValue& doc) {
  require(doc.is_table(), "pipeline config: expected a TOML table at top level");
  PipelineConfig c;
  for (const auto& [key, value] : doc.tab) {
    if (key == "seed") {
      require(value.is_integer() && value.num >= 0,
              "pipeline config: field 'seed' must be a nonnegative integer");
      c.seed = static_cast<uint64_t>(value.num);
    } else if (key == "output") {
      require(value.is_string(), "pipeline config: field 'output' must be a string");
      c.output = value.str;
    } else if (key == "bounds") {
      require(value.is_table(), "pipeline config: field 'bounds' must be a table");
      for (const auto& [bk, bv] : value.tab) {
        require(bv.is_integer() && bv.num > 0,
                "pipeline config: bounds field '" + bk + "' must be a positive integer");
        if (bk == "enumeration")
          c.bounds.enumeration = static_cast<uint64_t>(bv.num);
        else if (bk == "degree")
          c.bounds.degree = static_cast<uint64_t>(bv.num);
        else
          throw error("pipeline config: unknown bounds field '" + bk + "'");
      }
    } else if (key == "job") {
      require(value.is_array(), "pipeline config: 'job' must be an array of tables");
      for (std::size_t i = 0; i < value.arr.size(); ++i) {
        const TomlValue& jt = value.arr[i];
        require(jt.is_table(), "pipeline config: job " + std::to_string(i) + " is not a table");
        const TomlValue* mod = jt.find("module");
        const TomlValue* op = jt.find("operation");
        require(mod != nullptr && mod->is_string(),
                "pipeline config: job " + std::to_string(i) + " is missing string field 'module'");
        require(op != nullptr && op->is_string(),
                "pipeline config: job " + std::to_string(i) +
                    " is missing string field 'operation'");
        JobSpec spec;
        spec.module = mod->str;
        spec.operation = op->str;
        spec.params.kind = TomlValue::Kind::Table;
        for (const auto& [pk, pv] : jt.tab)
          if (pk != "module" && pk != "operation") spec.params.tab.emplace(pk, pv);
        c.jobs.push_back(std::move(spec));
      }
    } else {
      throw error("pipeline config: unknown top-level field '" + key + "'");
    }
  }
  return c;
}

inline PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "pipeline config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_pipeline_config(parse_toml(buf.str()));
}

// Parameter typing for pre-run validation. Group parameters are strings that
// name a standard group or a JSON group file; File parameters are paths
// whose bytes join the input hash.
enum class ParamKind {
  Str,
  Int,
  Bool,
  Group,
  File,
  IntArray,
  StrArray,
  TableArray,
  IntArrayArray,
};

struct ParamSpec {
  const char* name;
  ParamKind kind;
  bool required;
};

inline const char* param_kind_describe(ParamKind k) {
  switch (k) {
    case ParamKind::Str: return "a string";
    case ParamKind::Int: return "an integer";
    case ParamKind::Bool: return "a boolean";
    case ParamKind::Group: return "a group name or group file path";
    case ParamKind::File: return "a file path";
    case ParamKind::IntArray: return "an array of integers";
    case ParamKind::StrArray: return "an array of strings";
    case ParamKind::TableArray: return "an array of inline tables";
    case ParamKind::IntArrayArray: return "an array of integer arrays";
  }
  return "a value";
}

inline bool param_kind_matches(ParamKind k, const TomlValue& v) {
  auto all = [&](auto pred) {
    for (const auto& e : v.arr)
      if (!pred(e)) return false;
    return true;
  };
  switch (k) {
    case ParamKind::Str:
    case ParamKind::Group:
    case ParamKind::File: return v.is_string();
    case ParamKind::Int: return v.is_integer();
    case ParamKind::Bool: return v.is_boolean();
    case ParamKind::IntArray:
      return v.is_array() && all([](const TomlValue& e) { return e.is_integer(); });
    case ParamKind::StrArray:
      return v.is_array() && all([](const TomlValue& e) { return e.is_string(); });
    case ParamKind::TableArray:
      return v.is_array() && all([](const TomlValue& e) { return e.is_table(); });
    case ParamKind::IntArrayArray:
      return v.is_array() && all([](const TomlValue& e) {
               if (!e.is_array()) return false;
               for (const auto& i : e.arr)
                 if (!i.is_integer()) return false;
               return true;
             });
  }
  return false;
}

// Resolves a group parameter: a path (anything with a slash or a .json
// suffix) is read as a group file, anything else is a standard group name.
inline PermGroup resolve_group(const std::string& spec) {
  const bool is_path = spec.find('/') != std::string::npos ||
                       (spec.size() > 5 && spec.compare(spec.size() - 5, 5, ".json") == 0);
  if (!is_path) return group_by_name(spec);
  std::ifstream in(spec);
  require(in.good(), "group file: cannot open " + spec);
  std::stringstream buf;
  buf << in.rdbuf();
  return perm_group_from_json(nlohmann::json::parse(buf.str()));
}

// The standing corpus for the whole-corpus checks: small groups with varied
// normal structure (abelian, dihedral, quaternion, perfect, simple, wreath,
// direct products), all of order at most 2000.
inline const std::vector<std::string>& corpus_group_names() {
  static const std::vector<std::string> names = {
      "C6",    "C12",   "S3",     "D4", "Q8",    "A4",     "D6", "S4",
      "SL2_3", "S3xS3", "C3wrC3", "A5", "SL2_5", "S5",     "PSL2_7", "A6",
  };
  return names;
}

// Typed access to one job's parameters. Errors carry the job's position and
// identity so a bad pipeline names the offending field precisely.
class JobContext {
 public:
  JobContext(const PipelineConfig& config, const JobSpec& job, std::size_t index)
      : config_(&config), job_(&job), index_(index) {}

  uint64_t seed() const { return config_->seed; }
  const PipelineBounds& bounds() const { return config_->bounds; }
  const JobSpec& job() const { return *job_; }

  std::string prefix() const {
    return "job " + std::to_string(index_) + " (" + job_->module + "/" + job_->operation + "): ";
  }

  const TomlValue* find(const std::string& name) const { return job_->params.find(name); }

  int64_t req_int(const std::string& name) const {
    const TomlValue* v = need(name);
    check(v->is_integer(), name, "an integer");
    return v->num;
  }

  int64_t opt_int(const std::string& name, int64_t fallback) const {
    const TomlValue* v = find(name);
    if (v == nullptr) return fallback;
    check(v->is_integer(), name, "an integer");
    return v->num;
  }

  bool opt_bool(const std::string& name, bool fallback) const {
    const TomlValue* v = find(name);
    if (v == nullptr) return fallback;
    check(v->is_boolean(), name, "a boolean");
    return v->flag;
  }

  std::string req_str(const std::string& name) const {
    const TomlValue* v = need(name);
    check(v->is_string(), name, "a string");
    return v->str;
  }

  std::string opt_str(const std::string& name, std::string fallback) const {
    const TomlValue* v = find(name);
    if (v == nullptr) return fallback;
    check(v->is_string(), name, "a string");
    return v->str;
  }

  std::vector<uint32_t> req_u32s(const std::string& name) const {
    return to_u32s(need(name), name);
  }

  std::vector<std::string> opt_strs(const std::string& name,
                                    std::vector<std::string> fallback) const {
    const TomlValue* v = find(name);
    if (v == nullptr) return fallback;
    check(v->is_array(), name, "an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v->arr) {
      check(e.is_string(), name, "an array of strings");
      out.push_back(e.str);
    }
    return out;
  }

  std::vector<std::vector<uint32_t>> req_u32_arrays(const std::string& name) const {
    const TomlValue* v = need(name);
    check(v->is_array(), name, "an array of integer arrays");
    std::vector<std::vector<uint32_t>> out;
    for (const auto& e : v->arr) out.push_back(to_u32s(&e, name));
    return out;
  }

  PermGroup group(const std::string& name) const { return resolve_group(req_str(name)); }

 private:
  const PipelineConfig* config_;
  const JobSpec* job_;
  std::size_t index_;

  const TomlValue* need(const std::string& name) const {
    const TomlValue* v = find(name);
    if (v == nullptr) throw error(prefix() + "missing required parameter '" + name + "'");
    return v;
  }

  void check(bool ok, const std::string& name, const char* what) const {
    if (!ok) throw error(prefix() + "parameter '" + name + "' must be " + what);
  }

  std::vector<uint32_t> to_u32s(const TomlValue* v, const std::string& name) const {
    check(v->is_array(), name, "an array of integers");
    std::vector<uint32_t> out;
    for (const auto& e : v->arr) {
      check(e.is_integer() && e.num >= 0, name, "an array of nonnegative integers");
      out.push_back(static_cast<uint32_t>(e.num));
    }
    return out;
  }
};

struct JobResult {
  std::string status;
  nlohmann::json witnesses = nlohmann::json::object();
};

struct JobHandler {
  const char* tag;
  std::vector<ParamSpec> schema;
  JobResult (*run)(const JobContext&);
};

namespace detail {

inline JobResult job_outcome(bool ok, nlohmann::json witnesses) {
  return JobResult{ok ? "pass" : "fail", std::move(witnesses)};
}

inline nlohmann::json subgroup_orders(const std::vector<Subgroup>& subs) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& s : subs) a.push_back(s.order);
  return a;
}

inline Enumerated<PermGroup> enumerate_for(const JobContext& ctx, const PermGroup& g) {
  return Enumerated<PermGroup>(g, ctx.bounds().enumeration);
}

// Subgroup descriptor file -> subgroup of the enumerated parent. The
// descriptor's parent hash, when present, must match the actual parent.
inline Subgroup load_subgroup(const JobContext& ctx, const Enumerated<PermGroup>& E,
                              const PermGroup& parent, const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ctx.prefix() + "cannot open subgroup file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  SubgroupDescriptor d = subgroup_from_json(nlohmann::json::parse(buf.str()));
  require(d.degree == parent.degree(), ctx.prefix() + "subgroup degree does not match the parent");
  if (!d.parent.empty())
    require(d.parent == group_content_hash(parent),
            ctx.prefix() + "subgroup descriptor names a different parent group");
  if (!d.generators.empty()) {
    std::vector<uint32_t> gens;
    for (const auto& p : d.generators) gens.push_back(E.index_of(p));
    return closure(E, gens);
  }
  Bitset mask(E.size());
  for (const auto& p : d.elements) mask.set(E.index_of(p));
  return subgroup_from_elements(E, mask);
}

// Level tables for tower automorphisms. The outer and inner twists conjugate
// by a transposition and a 3-cycle of the natural overgroup; the menu is
// geared to alternating levels, where the transposition is genuinely outer.
inline std::vector<uint32_t> level_table(const Enumerated<PermGroup>& ex, uint32_t degree,
                                         const std::string& kind) {
  if (kind == "identity") return identity_table(ex);
  if (kind == "outer") {
    require(degree >= 2, "level_table: outer twist needs degree at least 2");
    return conjugation_table(ex, Permutation::from_cycles(degree, {{0, 1}}));
  }
  if (kind == "inner") {
    require(degree >= 3, "level_table: inner twist needs degree at least 3");
    return conjugation_table(ex, Permutation::from_cycles(degree, {{0, 1, 2}}));
  }
  throw error("level_table: unknown automorphism kind '" + kind + "'");
}

inline StageParams stage_params_from(const JobContext& ctx) {
  StageParams params;
  params.p = ctx.req_u32s("p");
  params.q = ctx.req_u32s("q");
  params.t = ctx.req_u32s("t");
  params.backward_divisibility = ctx.opt_bool("theorem612_mode", false);
  return params;
}

inline TruncSeries series_param(const JobContext& ctx, uint32_t p, uint32_t k,
                                const std::string& name) {
  return series_from_coeffs(p, k, ctx.req_u32s(name));
}

// Sorted (order, mask) view of a family of subgroups, the shape both gamma
// routes are reduced to before comparison.
inline std::vector<std::pair<uint64_t, Bitset>> mask_family(const std::vector<Subgroup>& subs) {
  std::vector<std::pair<uint64_t, Bitset>> fam;
  for (const auto& s : subs) {
    bool dup = false;
    for (const auto& [o, m] : fam)
      if (o == s.order && m == s.mask) {
        dup = true;
        break;
      }
    if (!dup) fam.emplace_back(s.order, s.mask);
  }
  std::sort(fam.begin(), fam.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return Bitset::cmp_lex(a.second, b.second) < 0;
  });
  return fam;
}

// gamma_set recomputed through the exhaustive subgroup scan instead of the
// normal-subgroup lattice walk; the two routes share no code above gamma().
inline std::vector<Subgroup> gamma_family_by_scan(const Enumerated<PermGroup>& E,
                                                  const Subgroup& u, uint32_t c,
                                                  uint64_t scan_bound) {
  std::vector<Subgroup> out;
  for (const auto& k : normal_subgroups_by_scan(E, u, scan_bound)) out.push_back(gamma(E, k, c));
  return out;
}

struct GammaAgreement {
  bool agree = false;
  std::size_t members = 0;
  std::size_t scan_members = 0;
};

inline GammaAgreement gamma_agreement_for(const Enumerated<PermGroup>& E, uint32_t c,
                                          uint64_t scan_bound) {
  Subgroup whole = full_subgroup(E);
  auto walk = mask_family(gamma_set(E, whole, c).members);
  auto scan = mask_family(gamma_family_by_scan(E, whole, c, scan_bound));
  GammaAgreement rep;
  rep.members = walk.size();
  rep.scan_members = scan.size();
  rep.agree = walk == scan;
  return rep;
}

struct MelAgreement {
  uint64_t pairs = 0;
  uint64_t disagreements = 0;
};

// Every normal pair (K, L) with K nontrivial: membership of K in L * M_U(K)
// must coincide with membership of K in L.
inline MelAgreement mel_agreement_for(const Enumerated<PermGroup>& E) {
  Subgroup whole = full_subgroup(E);
  auto lattice = normal_subgroups(E, whole);
  MelAgreement rep;
  for (const auto& k : lattice) {
    if (k.order <= 1) continue;
    for (const auto& l : lattice) {
      MelInclusion mi = mel_inclusion_check(E, whole, k, l);
      ++rep.pairs;
      if (mi.k_in_l_times_mel != mi.k_in_l) ++rep.disagreements;
    }
  }
  return rep;
}

struct NarrowAgreement {
  uint64_t factors = 0;
  uint64_t verified = 0;
};

// Every chief factor K/L must admit a narrow normal subgroup A with A <= K,
// A not inside L, and A cap L = M_U(A). The returned witness is re-verified
// here property by property rather than trusted.
inline NarrowAgreement narrow_agreement_for(const Enumerated<PermGroup>& E) {
  Subgroup whole = full_subgroup(E);
  NarrowAgreement rep;
  for (const auto& [k, l] : chief_factors(E, whole)) {
    ++rep.factors;
    NarrowWitness w = narrow_above_chief(E, whole, k, l);
    const bool inside_k = w.narrow.mask.subset_of(k.mask);
    const bool outside_l = !w.narrow.mask.subset_of(l.mask);
    const bool narrow_ok = is_narrow(E, whole, w.narrow);
    const bool meets_l_in_mel = (w.narrow.mask & l.mask) == w.melnikov_rel_a.mask;
    if (inside_k && outside_l && narrow_ok && meets_l_in_mel) ++rep.verified;
  }
  return rep;
}

// ---- perm-engine ----

inline JobResult run_stabilizer_chain(const JobContext& ctx) {
  PermGroup g = ctx.group("group");
  const uint64_t order = g.order();
  nlohmann::json w;
  w["degree"] = g.degree();
  w["order"] = order;
  bool ok = true;
  const bool crosscheck = order <= ctx.bounds().enumeration && order <= kCanonicalizeBound;
  w["cross_checked"] = crosscheck;
  if (crosscheck) {
    Enumerated<PermGroup> E(g, kCanonicalizeBound);
    w["exhaustive_count"] = E.size();
    ok = E.size() == order;
  }
  return job_outcome(ok, std::move(w));
}

// ---- group-kernel ----

inline JobResult run_melnikov(const JobContext& ctx) {
  auto E = enumerate_for(ctx, ctx.group("group"));
  Subgroup whole = full_subgroup(E);
  Subgroup m = melnikov(E, whole);
  nlohmann::json w;
  w["group_order"] = whole.order;
  w["melnikov_order"] = m.order;
  w["index"] = whole.order / m.order;
  return job_outcome(true, std::move(w));
}

inline JobResult run_mel_inclusion_check(const JobContext& ctx) {
  auto E = enumerate_for(ctx, ctx.group("group"));
  MelAgreement rep = mel_agreement_for(E);
  nlohmann::json w;
  w["group_order"] = E.size();
  w["pairs"] = rep.pairs;
  w["disagreements"] = rep.disagreements;
  return job_outcome(rep.disagreements == 0, std::move(w));
}

inline JobResult run_mel_inclusion_corpus(const JobContext& ctx) {
  const auto names = ctx.opt_strs("groups", corpus_group_names());
  const uint64_t max_order = static_cast<uint64_t>(ctx.opt_int("max_order", 2000));
  nlohmann::json groups = nlohmann::json::array();
  uint64_t pairs = 0, disagreements = 0;
  for (const auto& name : names) {
    PermGroup g = resolve_group(name);
    if (g.order() > max_order) continue;
    Enumerated<PermGroup> E(g, ctx.bounds().enumeration);
    MelAgreement rep = mel_agreement_for(E);
    pairs += rep.pairs;
    disagreements += rep.disagreements;
    groups.push_back(name);
  }
  nlohmann::json w;
  w["groups"] = std::move(groups);
  w["pairs"] = pairs;
  w["disagreements"] = disagreements;
  return job_outcome(disagreements == 0, std::move(w));
}

inline JobResult run_narrow_above_chief(const JobContext& ctx) {
  auto E = enumerate_for(ctx, ctx.group("group"));
  NarrowAgreement rep = narrow_agreement_for(E);
  nlohmann::json w;
  w["group_order"] = E.size();
  w["factors"] = rep.factors;
  w["verified"] = rep.verified;
  return job_outcome(rep.verified == rep.factors, std::move(w));
}

inline JobResult run_narrow_corpus(const JobContext& ctx) {
  const auto names = ctx.opt_strs("groups", corpus_group_names());
  const uint64_t max_order = static_cast<uint64_t>(ctx.opt_int("max_order", 2000));
  nlohmann::json groups = nlohmann::json::array();
  uint64_t factors = 0, verified = 0;
  for (const auto& name : names) {
    PermGroup g = resolve_group(name);
    if (g.order() > max_order) continue;
    Enumerated<PermGroup> E(g, ctx.bounds().enumeration);
    NarrowAgreement rep = narrow_agreement_for(E);
    factors += rep.factors;
    verified += rep.verified;
    groups.push_back(name);
  }
  nlohmann::json w;
  w["groups"] = std::move(groups);
  w["factors"] = factors;
  w["verified"] = verified;
  return job_outcome(factors == verified, std::move(w));
}

// ---- jnnf-invariants ----

inline JobResult run_example_2_8(const JobContext& ctx) {
  const uint32_t p = static_cast<uint32_t>(ctx.req_int("p"));
  const uint32_t n = static_cast<uint32_t>(ctx.req_int("n"));
  ShiftStackCensus census = shift_stack_census(p, n);
  const uint64_t expected = uint64_t{1} << (n + 1);
  nlohmann::json w;
  w["census"] = census.distinct_derived;
  w["expected"] = expected;
  w["group_order"] = census.group->size();
  w["subsets"] = census.invariant.size();
  return job_outcome(census.distinct_derived == expected, std::move(w));
}

inline JobResult run_gamma_set(const JobContext& ctx) {
  auto E = enumerate_for(ctx, ctx.group("group"));
  const uint32_t c = static_cast<uint32_t>(ctx.req_int("c"));
  GammaSet gs = gamma_set(E, full_subgroup(E), c);
  nlohmann::json w;
  w["c"] = c;
  w["source"] = gs.source;
  w["member_orders"] = subgroup_orders(gs.members);
  return job_outcome(true, std::move(w));
}

inline JobResult run_gamma_agreement(const JobContext& ctx) {
  auto E = enumerate_for(ctx, ctx.group("group"));
  const uint32_t c = static_cast<uint32_t>(ctx.req_int("c"));
  const uint64_t scan_bound = static_cast<uint64_t>(ctx.opt_int("scan_bound", 5000));
  nlohmann::json w;
  w["c"] = c;
  if (E.size() > scan_bound) {
    w["note"] = "group exceeds the scan bound; only the lattice route is available";
    return JobResult{"inconclusive", std::move(w)};
  }
  GammaAgreement rep = gamma_agreement_for(E, c, scan_bound);
  w["members"] = rep.members;
  w["scan_members"] = rep.scan_members;
  return job_outcome(rep.agree, std::move(w));
}

inline JobResult run_gamma_agreement_corpus(const JobContext& ctx) {
  const auto names = ctx.opt_strs("groups", corpus_group_names());
  const uint64_t max_order = static_cast<uint64_t>(ctx.opt_int("max_order", 2000));
  const uint64_t scan_bound = static_cast<uint64_t>(ctx.opt_int("scan_bound", 5000));
  std::vector<uint32_t> c_values{0, 1, 2};
  if (ctx.find("c_values") != nullptr) c_values = ctx.req_u32s("c_values");
  nlohmann::json groups = nlohmann::json::array();
  uint64_t checks = 0, disagreements = 0;
  for (const auto& name : names) {
    PermGroup g = resolve_group(name);
    if (g.order() > max_order) continue;
    Enumerated<PermGroup> E(g, ctx.bounds().enumeration);
    for (uint32_t c : c_values) {
      ++checks;
      if (!gamma_agreement_for(E, c, scan_bound).agree) ++disagreements;
    }
    groups.push_back(name);
  }
  nlohmann::json w;
  w["groups"] = std::move(groups);
  w["c_values"] = c_values;
  w["checks"] = checks;
  w["disagreements"] = disagreements;
  return job_outcome(disagreements == 0, std::move(w));
}

inline ObliquityVariant variant_from(const JobContext& ctx) {
  const std::string v = ctx.opt_str("variant", "A");
  if (v == "A") return ObliquityVariant::A;
  if (v == "C") return ObliquityVariant::C;
  if (v == "Astar") return ObliquityVariant::Astar;
  if (v == "Cstar") return ObliquityVariant::Cstar;
  throw error(ctx.prefix() + "parameter 'variant' must be one of A, C, Astar, Cstar");
}

inline JobResult run_obliquity_set(const JobContext& ctx) {
  PermGroup g = ctx.group("group");
  auto E = enumerate_for(ctx, g);
  Subgroup whole = full_subgroup(E);
  Subgroup h = load_subgroup(ctx, E, g, ctx.req_str("subgroup"));
  const uint32_t c = static_cast<uint32_t>(ctx.req_int("c"));
  GammaSet gs = obliquity_set(E, whole, h, c, variant_from(ctx));
  nlohmann::json w;
  w["c"] = c;
  w["variant"] = to_string(variant_from(ctx));
  w["subgroup_order"] = h.order;
  w["member_orders"] = subgroup_orders(gs.members);
  return job_outcome(true, std::move(w));
}

inline JobResult run_astar_union_check(const JobContext& ctx) {
  PermGroup g = ctx.group("group");
  auto E = enumerate_for(ctx, g);
  Subgroup whole = full_subgroup(E);
  Subgroup h = load_subgroup(ctx, E, g, ctx.req_str("subgroup"));
  const uint32_t c = static_cast<uint32_t>(ctx.req_int("c"));
  AstarUnionReport rep = astar_union_check(E, whole, h, c);
  nlohmann::json w;
  w["direct_size"] = rep.direct_size;
  w["union_size"] = rep.union_size;
  w["overgroups_used"] = rep.overgroups_used;
  return job_outcome(rep.equal, std::move(w));
}

inline JobResult run_obliquity_graph(const JobContext& ctx) {
  PermGroup g = ctx.group("group");
  auto E = enumerate_for(ctx, g);
  Subgroup whole = full_subgroup(E);
  Subgroup h = load_subgroup(ctx, E, g, ctx.req_str("subgroup"));
  const uint32_t c = static_cast<uint32_t>(ctx.req_int("c"));
  ObliquityGraph graph = obliquity_graph(E, whole, h, c);
  nlohmann::json w;
  w["vertices"] = graph.vertices.members.size();
  w["edges"] = graph.edges.size();
  w["vertex_orders"] = subgroup_orders(graph.vertices.members);
  return job_outcome(graph.descent_on_all_edges, std::move(w));
}

inline JobResult run_narrow_chain(const JobContext& ctx) {
  auto E = enumerate_for(ctx, ctx.group("group"));
  Subgroup whole = full_subgroup(E);
  const uint32_t c = static_cast<uint32_t>(ctx.opt_int("c", 1));
  const std::size_t max_len = static_cast<std::size_t>(ctx.opt_int("max_len", 16));
  auto pairs = narrow_chain(E, whole, c, max_len);
  nlohmann::json w;
  w["c"] = c;
  w["length"] = pairs.size();
  if (pairs.empty()) {
    w["note"] = "no narrow chain starts in this group";
    return JobResult{"inconclusive", std::move(w)};
  }
  std::vector<Subgroup> chain;
  for (const auto& [member, mel] : pairs) chain.push_back(member);
  ChainReport rep = verify_chain(E, whole, chain, c);
  w["chain_orders"] = subgroup_orders(chain);
  w["intersection_order"] = rep.intersection_order;
  w["conditions"] = {{"i", rep.melnikov_descent_throughout}, {"ii", rep.dichotomy_throughout}};
  return job_outcome(rep.melnikov_descent_throughout && rep.dichotomy_throughout, std::move(w));
}

inline JobResult run_hereditary_condition_v(const JobContext& ctx) {
  PermGroup g = ctx.group("group");
  auto E = enumerate_for(ctx, g);
  Subgroup whole = full_subgroup(E);
  Subgroup p = load_subgroup(ctx, E, g, ctx.req_str("subgroup"));
  const uint32_t n = static_cast<uint32_t>(ctx.req_int("n"));
  const uint32_t c = static_cast<uint32_t>(ctx.req_int("c"));
  const uint64_t scan_bound = static_cast<uint64_t>(ctx.opt_int("scan_bound", 10000));
  ConditionVReport rep = verify_hereditary_condition_v(E, whole, p, n, c, std::nullopt, scan_bound);
  nlohmann::json w;
  w["n"] = n;
  w["c"] = c;
  w["scanned"] = rep.scanned;
  w["violations"] = rep.violations.size();
  return job_outcome(rep.holds, std::move(w));
}

// ---- wreath-tower ----

inline JobResult run_lemma64_verify(const JobContext& ctx) {
  PermGroup x = ctx.group("x");
  PermGroup h = ctx.group("h");
  BaseFusionReport rep = verify_base_fusion(x, h);
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& c : rep.cases)
    cases.push_back({{"complement_order", c.complement_order},
                     {"subgroup_order", c.subgroup_order},
                     {"reps_outside_base", c.reps_outside_base},
                     {"reps_generating", c.reps_generating}});
  nlohmann::json w;
  w["wreath_order"] = rep.wreath_order;
  w["base_order"] = rep.base_order;
  w["cases"] = std::move(cases);
  return job_outcome(rep.holds, std::move(w));
}

inline JobResult run_product_action(const JobContext& ctx) {
  PermGroup x = ctx.group("x");
  PermGroup h = ctx.group("h");
  const uint32_t bound =
      static_cast<uint32_t>(ctx.opt_int("degree_bound", int64_t(ctx.bounds().degree)));
  ProductActionReport rep = verify_product_action(x, h, bound);
  nlohmann::json w;
  w["degree"] = rep.degree;
  w["order"] = rep.order;
  w["faithful"] = rep.faithful;
  w["transitive"] = rep.transitive;
  w["base_regular"] = rep.base_regular;
  w["base_unique_minimal_normal"] = rep.base_unique_minimal_normal;
  return job_outcome(rep.subprimitive, std::move(w));
}

inline JobResult run_outer_certificate(const JobContext& ctx) {
  PermGroup x = ctx.group("x");
  PermGroup h = ctx.group("h");
  const std::string phi_kind = ctx.opt_str("phi", "outer");
  Enumerated<PermGroup> ex(x, ctx.bounds().enumeration);
  auto phi = level_table(ex, x.degree(), phi_kind);
  OuterCertificateReport rep = outer_certificate(ex, h, phi);
  const bool expected_found = phi_kind == "outer";
  nlohmann::json w;
  w["phi"] = phi_kind;
  w["found"] = rep.found;
  w["note"] = rep.note;
  if (rep.found) {
    w["entry"] = rep.entry;
    w["image"] = rep.image;
  }
  return job_outcome(rep.found == expected_found, std::move(w));
}

inline JobResult run_psi_compose_check(const JobContext& ctx) {
  const TomlValue* levels = ctx.find("levels");
  require(levels != nullptr && levels->is_array(),
          ctx.prefix() + "parameter 'levels' must be an array of inline tables");
  std::vector<std::pair<PermGroup, WreathAction>> spec;
  for (std::size_t i = 0; i < levels->arr.size(); ++i) {
    const TomlValue& level = levels->arr[i];
    require(level.is_table(), ctx.prefix() + "levels entries must be inline tables");
    const TomlValue* simple = level.find("simple");
    const TomlValue* action = level.find("action");
    require(simple != nullptr && simple->is_string(),
            ctx.prefix() + "levels entries need a string field 'simple'");
    require(action != nullptr && action->is_string() &&
                (action->str == "R" || action->str == "P"),
            ctx.prefix() + "levels entries need an action of \"R\" or \"P\"");
    spec.emplace_back(resolve_group(simple->str),
                      action->str == "R" ? WreathAction::Regular : WreathAction::Product);
  }
  WreathTower tower(spec);

  auto default_kinds = [&](bool swap) {
    std::vector<std::string> kinds;
    for (uint32_t level = 0; level <= tower.depth(); ++level) {
      if (level == 0) kinds.push_back(swap ? "inner" : "outer");
      else if (level == 1) kinds.push_back(swap ? "outer" : "inner");
      else kinds.push_back("identity");
    }
    return kinds;
  };
  auto first_kinds = ctx.opt_strs("phis_first", default_kinds(false));
  auto second_kinds = ctx.opt_strs("phis_second", default_kinds(true));
  require(first_kinds.size() == tower.depth() + 1 && second_kinds.size() == tower.depth() + 1,
          ctx.prefix() + "need one automorphism kind per level");

  auto tables_for = [&](const std::vector<std::string>& kinds) {
    std::vector<std::vector<uint32_t>> tables;
    for (uint32_t level = 0; level <= tower.depth(); ++level) {
      const auto& ex = tower.x(level);
      tables.push_back(level_table(ex, ex.element(0).degree(), kinds[level]));
    }
    return tables;
  };
  const uint32_t samples = static_cast<uint32_t>(ctx.opt_int("samples", 1000));
  TowerAutomorphism first = build_psi(tower, tables_for(first_kinds), ctx.seed(), samples);
  TowerAutomorphism second = build_psi(tower, tables_for(second_kinds), ctx.seed(), samples);
  const bool agrees = psi_compose_check(tower, first, second, ctx.seed(), samples);
  nlohmann::json w;
  w["depth"] = tower.depth();
  w["samples"] = samples;
  w["phis_first"] = first_kinds;
  w["phis_second"] = second_kinds;
  w["composition_agrees"] = agrees;
  return job_outcome(agrees, std::move(w));
}

// ---- construction-b ----

inline JobResult run_validate_params(const JobContext& ctx) {
  StageParamsReport rep = validate_stage_params(stage_params_from(ctx));
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& u : rep.unit_parts) parts.push_back({{"r", u.r}, {"m", u.m}});
  nlohmann::json w;
  w["violations"] = rep.violations;
  w["unit_parts"] = std::move(parts);
  return job_outcome(rep.ok, std::move(w));
}

inline JobResult run_verify_eq2(const JobContext& ctx) {
  MonomialStage st = build_monomial_stage(stage_params_from(ctx));
  CommutatorBatteryReport rep = verify_commutator_battery(st);
  nlohmann::json w;
  w["plain_pairs"] = rep.plain_pairs;
  w["anchored_pairs"] = rep.anchored_pairs;
  if (!rep.first_mismatch.empty()) w["first_mismatch"] = rep.first_mismatch;
  return job_outcome(rep.ok, std::move(w));
}

inline JobResult run_centre_of_d(const JobContext& ctx) {
  MonomialStage st = build_monomial_stage(stage_params_from(ctx));
  WordCentreReport rep = centre_of_word_group(st);
  const uint32_t block = static_cast<uint32_t>(ctx.opt_int("slice_block", 0));
  const uint32_t points = static_cast<uint32_t>(ctx.opt_int("slice_points", 3));
  SliceCentreReport slice = slice_centre_crosscheck(st, block, points);
  nlohmann::json w;
  w["centre_order"] = rep.order;
  w["scalar_only"] = rep.scalar_only;
  w["divisibility_hypothesis"] = rep.divisibility_hypothesis;
  w["slice"] = {{"words_scanned", slice.words_scanned},
                {"central_found", slice.central_found},
                {"predicted", slice.predicted}};
  return job_outcome(rep.scalar_only && slice.agree, std::move(w));
}

inline JobResult run_verify_centre_g1(const JobContext& ctx) {
  MonomialStage st = build_monomial_stage(stage_params_from(ctx));
  StageCentreReport rep = verify_stage_centre(st);
  nlohmann::json w;
  w["scalar_value"] = rep.scalar_value;
  w["scalar_scales_globally"] = rep.scalar_scales_globally;
  w["spanning_cases_move"] = rep.spanning_cases_move;
  w["cases_checked"] = rep.cases_checked;
  return job_outcome(rep.ok, std::move(w));
}

inline JobResult run_build_psi_scalar(const JobContext& ctx) {
  MonomialStage st = build_monomial_stage(stage_params_from(ctx));
  const uint32_t lambda0 = static_cast<uint32_t>(ctx.opt_int("lambda0", 3));
  const uint32_t lambda1 = static_cast<uint32_t>(ctx.opt_int("lambda1", 6));
  const uint32_t pairs = static_cast<uint32_t>(ctx.opt_int("random_pairs", 1000));
  ScalarMap psi = build_scalar_map(st, lambda0, lambda1);
  ScalarMapReport rep = verify_scalar_map(st, psi, static_cast<uint32_t>(ctx.seed()), pairs);
  nlohmann::json w;
  w["lambda0"] = lambda0;
  w["lambda1"] = lambda1;
  w["identities_checked"] = rep.identities_checked;
  w["pairs_checked"] = rep.pairs_checked;
  w["composition"] = rep.composition;
  w["prefix_identity"] = rep.prefix_identity;
  w["scalar_subgroup"] = rep.scalar_subgroup;
  w["lambda_in_scalar_subgroup"] = rep.lambda_in_scalar_subgroup;
  return job_outcome(rep.ok, std::move(w));
}

// ---- congruence-sl ----

inline Enumerated<CongruenceSL> sl_group_from(const JobContext& ctx) {
  return enumerate_congruence_sl(static_cast<uint32_t>(ctx.req_int("n")),
                                 static_cast<uint32_t>(ctx.req_int("p")),
                                 static_cast<uint32_t>(ctx.req_int("k")),
                                 ctx.bounds().enumeration);
}

inline JobResult run_build_sl1(const JobContext& ctx) {
  auto E = sl_group_from(ctx);
  nlohmann::json w;
  w["order"] = E.size();
  w["target"] = E.backend().target_order();
  w["generators"] = E.generator_indices().size();
  return job_outcome(E.size() == E.backend().target_order(), std::move(w));
}

inline JobResult run_verify_lcs(const JobContext& ctx) {
  auto E = sl_group_from(ctx);
  auto filt = congruence_filtration(E);
  FiltrationComparison cmp = verify_lcs_equals_congruence(E, filt);
  nlohmann::json w;
  w["congruence_orders"] = cmp.congruence_orders;
  w["lcs_orders"] = cmp.lcs_orders;
  if (cmp.first_mismatch) w["first_mismatch"] = *cmp.first_mismatch;
  return job_outcome(cmp.match, std::move(w));
}

inline JobResult run_graded_quotients(const JobContext& ctx) {
  auto E = sl_group_from(ctx);
  auto filt = congruence_filtration(E);
  GradedQuotientReport rep = graded_quotients(E, filt);
  nlohmann::json w;
  w["layer_orders"] = rep.layer_orders;
  w["rank"] = rep.rank;
  w["exponent_p"] = rep.exponent_p;
  w["layers_abelian"] = rep.layers_abelian;
  return job_outcome(rep.ok, std::move(w));
}

inline JobResult run_substitution_action(const JobContext& ctx) {
  auto E = sl_group_from(ctx);
  TruncSeries f = series_param(ctx, E.backend().p(), E.backend().k(), "f");
  SubstitutionActionReport rep = verify_substitution_action(E, f);
  nlohmann::json w;
  w["elements_moved"] = rep.elements_moved;
  w["pairs_checked"] = rep.pairs_checked;
  w["determinant_one"] = rep.determinant_one;
  w["preserves_membership"] = rep.preserves_membership;
  w["inverse_recovers"] = rep.inverse_recovers;
  return job_outcome(rep.ok, std::move(w));
}

inline JobResult run_inner_conjugator_search(const JobContext& ctx) {
  auto E = sl_group_from(ctx);
  TruncSeries f = series_param(ctx, E.backend().p(), E.backend().k(), "f");
  ConjugatorSearch res = inner_conjugator_search(E, f);
  nlohmann::json w;
  w["found"] = res.witness.has_value();
  w["candidates"] = res.candidates;
  if (res.witness) w["witness_index"] = *res.witness;
  const std::string expect = ctx.opt_str("expect", "");
  if (expect.empty()) return job_outcome(true, std::move(w));
  if (expect != "none" && expect != "witness")
    throw error(ctx.prefix() + "parameter 'expect' must be \"none\" or \"witness\"");
  return job_outcome(res.witness.has_value() == (expect == "witness"), std::move(w));
}

inline JobResult run_semidirect_stage(const JobContext& ctx) {
  const uint32_t n = static_cast<uint32_t>(ctx.req_int("n"));
  const uint32_t p = static_cast<uint32_t>(ctx.req_int("p"));
  const uint32_t k = static_cast<uint32_t>(ctx.req_int("k"));
  std::vector<TruncSeries> twists;
  for (const auto& coeffs : ctx.req_u32_arrays("twists"))
    twists.push_back(series_from_coeffs(p, k, coeffs));
  auto E = enumerate_twisted_congruence_sl(n, p, k, twists, ctx.bounds().enumeration);
  nlohmann::json w;
  w["order"] = E.size();
  w["base_order"] = E.backend().base().target_order();
  w["substitutions"] = E.backend().substitution_count();
  return job_outcome(true, std::move(w));
}

}  // namespace detail

// The full operation registry: what a job may name, what parameters it
// takes, which public tag its reports carry. Validation walks this table;
// execution dispatches through it.
inline const std::map<std::pair<std::string, std::string>, JobHandler>& job_registry() {
  using K = ParamKind;
  static const std::map<std::pair<std::string, std::string>, JobHandler> registry = {
      {{"perm-engine", "stabilizer_chain"},
       {"stabilizer-chain", {{"group", K::Group, true}}, detail::run_stabilizer_chain}},
      {{"group-kernel", "melnikov"},
       {"melnikov", {{"group", K::Group, true}}, detail::run_melnikov}},
      {{"group-kernel", "mel_inclusion_check"},
       {"lemma-2.2-ii", {{"group", K::Group, true}}, detail::run_mel_inclusion_check}},
      {{"group-kernel", "mel_inclusion_corpus"},
       {"lemma-2.2-ii",
        {{"groups", K::StrArray, false}, {"max_order", K::Int, false}},
        detail::run_mel_inclusion_corpus}},
      {{"group-kernel", "narrow_above_chief"},
       {"lemma-2.2-iii", {{"group", K::Group, true}}, detail::run_narrow_above_chief}},
      {{"group-kernel", "narrow_above_chief_corpus"},
       {"lemma-2.2-iii",
        {{"groups", K::StrArray, false}, {"max_order", K::Int, false}},
        detail::run_narrow_corpus}},
      {{"jnnf-invariants", "example_2_8"},
       {"example-2.8", {{"p", K::Int, true}, {"n", K::Int, true}}, detail::run_example_2_8}},
      {{"jnnf-invariants", "gamma_set"},
       {"thm-2.7", {{"group", K::Group, true}, {"c", K::Int, true}}, detail::run_gamma_set}},
      {{"jnnf-invariants", "gamma_agreement"},
       {"thm-2.7",
        {{"group", K::Group, true}, {"c", K::Int, true}, {"scan_bound", K::Int, false}},
        detail::run_gamma_agreement}},
      {{"jnnf-invariants", "gamma_agreement_corpus"},
       {"thm-2.7",
        {{"groups", K::StrArray, false},
         {"c_values", K::IntArray, false},
         {"max_order", K::Int, false},
         {"scan_bound", K::Int, false}},
        detail::run_gamma_agreement_corpus}},
      {{"jnnf-invariants", "obliquity_set"},
       {"obliquity-set",
        {{"group", K::Group, true},
         {"subgroup", K::File, true},
         {"c", K::Int, true},
         {"variant", K::Str, false}},
        detail::run_obliquity_set}},
      {{"jnnf-invariants", "astar_union_check"},
       {"astar-union",
        {{"group", K::Group, true}, {"subgroup", K::File, true}, {"c", K::Int, true}},
        detail::run_astar_union_check}},
      {{"jnnf-invariants", "obliquity_graph"},
       {"obliquity-graph",
        {{"group", K::Group, true}, {"subgroup", K::File, true}, {"c", K::Int, true}},
        detail::run_obliquity_graph}},
      {{"jnnf-invariants", "narrow_chain"},
       {"thm-3.7",
        {{"group", K::Group, true}, {"c", K::Int, false}, {"max_len", K::Int, false}},
        detail::run_narrow_chain}},
      {{"jnnf-invariants", "verify_hereditary_condition_v"},
       {"condition-v",
        {{"group", K::Group, true},
         {"subgroup", K::File, true},
         {"n", K::Int, true},
         {"c", K::Int, true},
         {"scan_bound", K::Int, false}},
        detail::run_hereditary_condition_v}},
      {{"wreath-tower", "lemma64_verify"},
       {"lemma-6.4",
        {{"x", K::Group, true}, {"h", K::Group, true}},
        detail::run_lemma64_verify}},
      {{"wreath-tower", "product_action_subprimitive_verify"},
       {"lemma-6.8",
        {{"x", K::Group, true}, {"h", K::Group, true}, {"degree_bound", K::Int, false}},
        detail::run_product_action}},
      {{"wreath-tower", "outer_certificate"},
       {"lemma-6.5",
        {{"x", K::Group, true}, {"h", K::Group, true}, {"phi", K::Str, false}},
        detail::run_outer_certificate}},
      {{"wreath-tower", "psi_compose_check"},
       {"lemma-6.5",
        {{"levels", K::TableArray, true},
         {"samples", K::Int, false},
         {"phis_first", K::StrArray, false},
         {"phis_second", K::StrArray, false}},
        detail::run_psi_compose_check}},
      {{"construction-b", "validate_params"},
       {"construction-b-params",
        {{"p", K::IntArray, true},
         {"q", K::IntArray, true},
         {"t", K::IntArray, true},
         {"theorem612_mode", K::Bool, false}},
        detail::run_validate_params}},
      {{"construction-b", "verify_eq2"},
       {"eq-2",
        {{"p", K::IntArray, true},
         {"q", K::IntArray, true},
         {"t", K::IntArray, true},
         {"theorem612_mode", K::Bool, false}},
        detail::run_verify_eq2}},
      {{"construction-b", "centre_of_D"},
       {"lemma-6.7-iii",
        {{"p", K::IntArray, true},
         {"q", K::IntArray, true},
         {"t", K::IntArray, true},
         {"theorem612_mode", K::Bool, false},
         {"slice_block", K::Int, false},
         {"slice_points", K::Int, false}},
        detail::run_centre_of_d}},
      {{"construction-b", "verify_centre_G1"},
       {"lemma-6.7-iii",
        {{"p", K::IntArray, true},
         {"q", K::IntArray, true},
         {"t", K::IntArray, true},
         {"theorem612_mode", K::Bool, false}},
        detail::run_verify_centre_g1}},
      {{"construction-b", "build_psi_scalar"},
       {"lemma-6.10",
        {{"p", K::IntArray, true},
         {"q", K::IntArray, true},
         {"t", K::IntArray, true},
         {"theorem612_mode", K::Bool, false},
         {"lambda0", K::Int, false},
         {"lambda1", K::Int, false},
         {"random_pairs", K::Int, false}},
        detail::run_build_psi_scalar}},
      {{"congruence-sl", "build_sl1"},
       {"example-6.14",
        {{"n", K::Int, true}, {"p", K::Int, true}, {"k", K::Int, true}},
        detail::run_build_sl1}},
      {{"congruence-sl", "verify_lcs_equals_congruence"},
       {"example-6.14",
        {{"n", K::Int, true}, {"p", K::Int, true}, {"k", K::Int, true}},
        detail::run_verify_lcs}},
      {{"congruence-sl", "graded_quotients"},
       {"example-6.14",
        {{"n", K::Int, true}, {"p", K::Int, true}, {"k", K::Int, true}},
        detail::run_graded_quotients}},
      {{"congruence-sl", "substitution_action"},
       {"example-6.14",
        {{"n", K::Int, true}, {"p", K::Int, true}, {"k", K::Int, true}, {"f", K::IntArray, true}},
        detail::run_substitution_action}},
      {{"congruence-sl", "inner_conjugator_search"},
       {"example-6.14",
        {{"n", K::Int, true},
         {"p", K::Int, true},
         {"k", K::Int, true},
         {"f", K::IntArray, true},
         {"expect", K::Str, false}},
        detail::run_inner_conjugator_search}},
      {{"congruence-sl", "semidirect_stage"},
       {"example-6.14",
        {{"n", K::Int, true},
         {"p", K::Int, true},
         {"k", K::Int, true},
         {"twists", K::IntArrayArray, true}},
        detail::run_semidirect_stage}},
  };
  return registry;
}

struct ValidationIssue {
  std::size_t job_index = 0;
  std::string message;
};

// Static checks only: operations must exist, required parameters must be
// present, every present parameter must have the declared type, and nothing
// unknown may ride along. Data-level failures (a group name that does not
// resolve, a series with the wrong shape) surface as "error" reports at run
// time instead.
inline std::vector<ValidationIssue> validate_pipeline(const PipelineConfig& config) {
  std::vector<ValidationIssue> issues;
  const auto& registry = job_registry();
  for (std::size_t i = 0; i < config.jobs.size(); ++i) {
    const JobSpec& job = config.jobs[i];
    auto it = registry.find({job.module, job.operation});
    if (it == registry.end()) {
      issues.push_back(
          {i, "unknown operation '" + job.operation + "' in module '" + job.module + "'"});
      continue;
    }
    const JobHandler& handler = it->second;
    for (const auto& ps : handler.schema) {
      const TomlValue* v = job.params.find(ps.name);
      if (v == nullptr) {
        if (ps.required)
          issues.push_back({i, std::string("missing required parameter '") + ps.name + "'"});
        continue;
      }
      if (!param_kind_matches(ps.kind, *v))
        issues.push_back({i, std::string("parameter '") + ps.name + "' must be " +
                                 param_kind_describe(ps.kind)});
    }
    for (const auto& [name, value] : job.params.tab) {
      bool known = false;
      for (const auto& ps : handler.schema)
        if (name == ps.name) {
          known = true;
          break;
        }
      if (!known) issues.push_back({i, "unexpected parameter '" + name + "'"});
    }
  }
  return issues;
}

// Canonical input hash for one job: module, operation, seed, bounds and
// parameters, with group parameters replaced by the content hash of their
// closure and file parameters by the hash of their bytes.
inline std::string job_input_hash(const PipelineConfig& config, const JobSpec& job) {
  const auto& registry = job_registry();
  auto it = registry.find({job.module, job.operation});
  require(it != registry.end(), "job_input_hash: operation is not in the registry");
  nlohmann::json params = toml_to_json(job.params);
  for (const auto& ps : it->second.schema) {
    if (!params.contains(ps.name)) continue;
    if (ps.kind == ParamKind::Group) {
      params[ps.name] = group_content_hash(resolve_group(params[ps.name].get<std::string>()));
    } else if (ps.kind == ParamKind::File) {
      std::ifstream in(params[ps.name].get<std::string>());
      require(in.good(),
              "job_input_hash: cannot open " + params[ps.name].get<std::string>());
      std::stringstream buf;
      buf << in.rdbuf();
      params[ps.name] = content_hash(buf.str());
    }
  }
  nlohmann::json canon;
  canon["module"] = job.module;
  canon["operation"] = job.operation;
  canon["seed"] = config.seed;
  canon["bounds"] = {{"enumeration", config.bounds.enumeration}, {"degree", config.bounds.degree}};
  canon["params"] = std::move(params);
  return content_hash(canon.dump());
}

struct PipelineOptions {
  bool use_cache = true;
  bool verify_cache = false;  // recompute hits and byte-compare
  unsigned workers = 0;       // 0 decides from hardware, capped small
  bool write_output = true;
};

struct PipelineOutcome {
  std::vector<VerificationReport> reports;
  int exit_code = 0;  // 0 exactly when every status is pass or inconclusive
  uint32_t cache_hits = 0;
  uint32_t cache_misses = 0;
  uint32_t cache_mismatches = 0;
};

namespace detail {

inline VerificationReport execute_job(const PipelineConfig& config, std::size_t index,
                                      const ResultCache& cache, const PipelineOptions& opt,
                                      std::atomic<uint32_t>& hits, std::atomic<uint32_t>& misses,
                                      std::atomic<uint32_t>& mismatches) {
  const JobSpec& job = config.jobs[index];
  const JobHandler& handler = job_registry().at({job.module, job.operation});
  VerificationReport r;
  r.job = std::to_string(index) + "-" + job.module + "-" + job.operation;
  r.tag = handler.tag;
  r.seed = config.seed;
  JobContext ctx(config, job, index);
  const auto start = std::chrono::steady_clock::now();
  try {
    r.input_hash = job_input_hash(config, job);
    auto fresh_body = [&](const JobResult& res) {
      return nlohmann::json{
          {"status", res.status}, {"tag", handler.tag}, {"witnesses", res.witnesses}};
    };
    bool resolved = false;
    if (cache.enabled() && opt.use_cache) {
      if (auto body = cache.lookup(r.input_hash)) {
        if (body->is_object() && body->contains("status") && body->contains("tag") &&
            body->contains("witnesses")) {
          r.status = (*body)["status"].get<std::string>();
          r.tag = (*body)["tag"].get<std::string>();
          r.witnesses = (*body)["witnesses"];
          resolved = true;
          ++hits;
          if (opt.verify_cache) {
            JobResult again = handler.run(ctx);
            if (fresh_body(again).dump() != body->dump()) {
              ++mismatches;
              r.status = "error";
              r.witnesses = {{"cache", "entry does not match recomputation"},
                             {"recomputed", fresh_body(again)}};
            }
          }
        } else {
          std::cerr << "warning: cache entry " << r.input_hash
                    << " has the wrong shape, treating as a miss\n";
        }
      }
      if (!resolved) ++misses;
    }
    if (!resolved) {
      JobResult res = handler.run(ctx);
      r.status = res.status;
      r.witnesses = std::move(res.witnesses);
      // Errors are not cached: they tend to reflect the environment (a
      // missing file, an out-of-bounds request) rather than the inputs.
      if (cache.enabled() && opt.use_cache && r.status != "error")
        cache.store(r.input_hash, fresh_body(JobResult{r.status, r.witnesses}));
    }
  } catch (const std::exception& e) {
    r.status = "error";
    r.witnesses = {{"error", e.what()}};
  }
  r.timing_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace detail

// Validates, runs every job (concurrently when a pool is available), writes
// the report file, and reports the exit contract: zero exactly when every
// job passed or was inconclusive.
inline PipelineOutcome run_pipeline(const PipelineConfig& config, const PipelineOptions& opt = {}) {
  auto issues = validate_pipeline(config);
  if (!issues.empty()) {
    std::string msg = "pipeline config is invalid:";
    for (const auto& issue : issues)
      msg += "\n  job " + std::to_string(issue.job_index) + ": " + issue.message;
    throw error(msg);
  }

  ResultCache cache = ResultCache::from_environment();
  const std::size_t n = config.jobs.size();
  PipelineOutcome outcome;
  outcome.reports.resize(n);
  std::atomic<uint32_t> hits{0}, misses{0}, mismatches{0};
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      outcome.reports[i] = detail::execute_job(config, i, cache, opt, hits, misses, mismatches);
    }
  };

  unsigned workers = opt.workers;
  if (workers == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw == 0 ? 1 : std::min(hw, 4u);
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n == 0 ? 1 : n));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  outcome.cache_hits = hits;
  outcome.cache_misses = misses;
  outcome.cache_mismatches = mismatches;
  for (const auto& r : outcome.reports)
    if (!status_acceptable(r.status)) outcome.exit_code = 1;
  if (opt.verify_cache && outcome.cache_mismatches > 0) outcome.exit_code = 1;
  if (opt.write_output) write_reports(config.output, outcome.reports);
  return outcome;
}

}  // namespace jnnf
