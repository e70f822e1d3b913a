// Command line front end. Verbs:
//
//   build         construct an object from an input file and print a summary
//   verify        run a pipeline config and write its reports
//   invariants    run a single invariant operation from flags
//   report        summarize an existing report file
//   verify-cache  re-run a pipeline, byte-comparing cache hits
//   sl1           the congruence subgroup battery
//
// Exit status follows the report contract: zero exactly when every produced
// report is pass or inconclusive (and, for verify-cache, no hit mismatched).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "jnnf/json_io.hpp"
#include "jnnf/monomial_stage.hpp"
#include "jnnf/pipeline.hpp"
#include "jnnf/report.hpp"
#include "jnnf/toml_lite.hpp"
#include "jnnf/wreath_tower.hpp"

namespace {

using jnnf::TomlValue;

TomlValue toml_table() {
  TomlValue v;
  v.kind = TomlValue::Kind::Table;
  return v;
}

TomlValue toml_ints(const std::vector<int64_t>& values) {
  TomlValue v = TomlValue::make_array();
  for (int64_t n : values) v.arr.push_back(TomlValue::make_integer(n));
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw jnnf::error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_reports(const std::vector<jnnf::VerificationReport>& reports) {
  for (const auto& r : reports) {
    std::cout << r.job << ": " << r.status << "  [" << r.tag << ", "
              << static_cast<long long>(r.timing_ms) << " ms]\n";
    if (r.status != "pass") std::cout << "  witnesses: " << r.witnesses.dump() << "\n";
  }
}

int finish_pipeline(const jnnf::PipelineConfig& config, const jnnf::PipelineOptions& options) {
  jnnf::PipelineOutcome outcome = jnnf::run_pipeline(config, options);
  print_reports(outcome.reports);
  if (options.write_output)
    std::cout << outcome.reports.size() << " report(s) written to " << config.output.string()
              << "\n";
  if (jnnf::ResultCache::from_environment().enabled())
    std::cout << "cache: " << outcome.cache_hits << " hit(s), " << outcome.cache_misses
              << " miss(es)" << (options.verify_cache ? ", " + std::to_string(
                                       outcome.cache_mismatches) + " mismatch(es)" : "")
              << "\n";
  return outcome.exit_code;
}

// One ad-hoc job assembled from subcommand flags.
int run_single_job(const std::string& module, const std::string& operation, TomlValue params,
                   uint64_t seed, unsigned workers) {
  jnnf::PipelineConfig config;
  config.seed = seed;
  config.jobs.push_back({module, operation, std::move(params)});
  jnnf::PipelineOptions options;
  options.workers = workers == 0 ? 1 : workers;
  options.write_output = false;
  jnnf::PipelineOutcome outcome = jnnf::run_pipeline(config, options);
  for (const auto& r : outcome.reports) std::cout << jnnf::report_line(r) << "\n";
  return outcome.exit_code;
}

int cmd_build(const std::string& group_spec, const std::string& wreath_path,
              const std::string& cb_path, const std::string& out_path) {
  const int sources = int(!group_spec.empty()) + int(!wreath_path.empty()) + int(!cb_path.empty());
  if (sources != 1) throw jnnf::error("build: give exactly one of --group, --wreath, --cb");

  if (!group_spec.empty()) {
    jnnf::PermGroup g = jnnf::resolve_group(group_spec);
    std::cout << "kind: perm\ndegree: " << g.degree() << "\norder: " << g.order()
              << "\ngenerators: " << g.generators().size()
              << "\ncontent_hash: " << jnnf::group_content_hash(g) << "\n";
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::trunc);
      if (!out.good()) throw jnnf::error("build: cannot open " + out_path);
      out << jnnf::perm_group_to_json(g).dump(2) << "\n";
      std::cout << "written: " << out_path << "\n";
    }
    return 0;
  }

  if (!wreath_path.empty()) {
    TomlValue doc = jnnf::parse_toml(read_file(wreath_path));
    const TomlValue* levels = doc.find("levels");
    if (levels == nullptr || !levels->is_array())
      throw jnnf::error("wreath spec: missing array field 'levels'");
    std::vector<std::pair<jnnf::PermGroup, jnnf::WreathAction>> spec;
    for (const auto& level : levels->arr) {
      if (!level.is_table()) throw jnnf::error("wreath spec: levels entries must be tables");
      const TomlValue* simple = level.find("simple");
      const TomlValue* action = level.find("action");
      if (simple == nullptr || !simple->is_string() || action == nullptr || !action->is_string())
        throw jnnf::error("wreath spec: each level needs string fields 'simple' and 'action'");
      if (action->str != "R" && action->str != "P")
        throw jnnf::error("wreath spec: action must be \"R\" or \"P\"");
      spec.emplace_back(jnnf::resolve_group(simple->str), action->str == "R"
                                                              ? jnnf::WreathAction::Regular
                                                              : jnnf::WreathAction::Product);
    }
    jnnf::WreathTower tower(spec);
    std::cout << "levels: " << spec.size() << "\ndepth: " << tower.depth() << "\n";
    for (uint32_t level = 0; level <= tower.depth(); ++level)
      std::cout << "level " << level << ": |X| = " << tower.x(level).size()
                << ", degree " << tower.x(level).element(0).degree() << "\n";
    return 0;
  }

  TomlValue doc = jnnf::parse_toml(read_file(cb_path));
  jnnf::StageParams params;
  auto ints_field = [&](const char* name) {
    const TomlValue* v = doc.find(name);
    if (v == nullptr || !v->is_array())
      throw jnnf::error(std::string("stage params: missing array field '") + name + "'");
    std::vector<uint32_t> out;
    for (const auto& e : v->arr) {
      if (!e.is_integer() || e.num < 0)
        throw jnnf::error(std::string("stage params: '") + name +
                          "' must hold nonnegative integers");
      out.push_back(static_cast<uint32_t>(e.num));
    }
    return out;
  };
  params.p = ints_field("p");
  params.q = ints_field("q");
  params.t = ints_field("t");
  if (const TomlValue* mode = doc.find("theorem612_mode"); mode != nullptr) {
    if (!mode->is_boolean()) throw jnnf::error("stage params: 'theorem612_mode' must be a boolean");
    params.backward_divisibility = mode->flag;
  }
  jnnf::StageParamsReport rep = jnnf::validate_stage_params(params);
  if (!rep.ok) {
    std::cout << "hypotheses violated:\n";
    for (const auto& v : rep.violations) std::cout << "  " << v << "\n";
    return 1;
  }
  jnnf::MonomialStage st = jnnf::build_monomial_stage(params);
  std::cout << "level: " << st.level << "\nbase field: " << st.q_prev
            << "\ncoefficient field: " << st.q << "\nexponent p: " << st.p
            << "\nblocks: " << st.t << "\nscalar zeta: " << st.zeta
            << "\nplain indices: " << st.gamma_count << "\nanchored indices: " << st.anchored_count
            << "\nV dimension: " << st.v_dim << "\nW dimension: " << st.w_dim << "\n";
  return 0;
}

int cmd_report(const std::string& input) {
  auto reports = jnnf::read_reports(input);
  uint32_t pass = 0, fail = 0, errors = 0, inconclusive = 0;
  for (const auto& r : reports) {
    if (r.status == "pass") ++pass;
    else if (r.status == "fail") ++fail;
    else if (r.status == "error") ++errors;
    else ++inconclusive;
  }
  print_reports(reports);
  std::cout << reports.size() << " report(s): " << pass << " pass, " << fail << " fail, " << errors
            << " error, " << inconclusive << " inconclusive\n";
  for (const auto& r : reports)
    if (!jnnf::status_acceptable(r.status)) return 1;
  return 0;
}

int cmd_sl1(int64_t n, int64_t p, int64_t k, const std::string& checks_csv,
            const std::string& f_csv, uint64_t seed) {
  std::vector<int64_t> f;
  {
    std::stringstream ss(f_csv);
    std::string part;
    while (std::getline(ss, part, ',')) f.push_back(std::stoll(part));
  }
  jnnf::PipelineConfig config;
  config.seed = seed;
  auto base_params = [&]() {
    TomlValue t = toml_table();
    t.tab.emplace("n", TomlValue::make_integer(n));
    t.tab.emplace("p", TomlValue::make_integer(p));
    t.tab.emplace("k", TomlValue::make_integer(k));
    return t;
  };
  config.jobs.push_back({"congruence-sl", "build_sl1", base_params()});
  std::stringstream ss(checks_csv);
  std::string check;
  while (std::getline(ss, check, ',')) {
    if (check == "lcs") {
      config.jobs.push_back({"congruence-sl", "verify_lcs_equals_congruence", base_params()});
    } else if (check == "graded") {
      config.jobs.push_back({"congruence-sl", "graded_quotients", base_params()});
    } else if (check == "nottingham") {
      TomlValue params = base_params();
      params.tab.emplace("f", toml_ints(f));
      config.jobs.push_back({"congruence-sl", "substitution_action", params});
    } else {
      throw jnnf::error("sl1: unknown check '" + check + "' (expected lcs, graded, nottingham)");
    }
  }
  jnnf::PipelineOptions options;
  options.workers = 1;
  options.write_output = false;
  jnnf::PipelineOutcome outcome = jnnf::run_pipeline(config, options);
  for (const auto& r : outcome.reports) std::cout << jnnf::report_line(r) << "\n";
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-stage group constructions and their verification batteries"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "construct an object and print a summary");
  std::string build_group, build_wreath, build_cb, build_out;
  build->add_option("--group", build_group, "group name or group JSON file");
  build->add_option("--wreath", build_wreath, "wreath tower spec TOML");
  build->add_option("--cb", build_cb, "stage params TOML");
  build->add_option("--out", build_out, "write the group back as canonical JSON");

  // verify / verify-cache
  std::string verify_config, verify_output;
  unsigned verify_workers = 0;
  bool verify_no_cache = false;
  auto* verify = app.add_subcommand("verify", "run a pipeline config");
  verify->add_option("--config", verify_config, "pipeline TOML")->required();
  verify->add_option("--output", verify_output, "override the report path");
  verify->add_option("--workers", verify_workers, "worker threads (0 = automatic)");
  verify->add_flag("--no-cache", verify_no_cache, "ignore any configured cache");
  auto* verify_cache = app.add_subcommand("verify-cache", "re-run a pipeline, checking cache hits");
  std::string vcache_config;
  verify_cache->add_option("--config", vcache_config, "pipeline TOML")->required();
  verify_cache->add_option("--output", verify_output, "override the report path");
  verify_cache->add_option("--workers", verify_workers, "worker threads (0 = automatic)");

  // report
  auto* report = app.add_subcommand("report", "summarize an existing report file");
  std::string report_input;
  report->add_option("--input", report_input, "reports.jsonl path")->required();

  // sl1
  auto* sl1 = app.add_subcommand("sl1", "congruence subgroup battery");
  int64_t sl_n = 2, sl_p = 3, sl_k = 4;
  std::string sl_checks = "lcs,graded,nottingham";
  std::string sl_f = "0,1,1";
  uint64_t sl_seed = 0;
  sl1->add_option("--n", sl_n, "matrix size");
  sl1->add_option("--p", sl_p, "prime");
  sl1->add_option("--k", sl_k, "truncation length");
  sl1->add_option("--verify", sl_checks, "comma list: lcs, graded, nottingham");
  sl1->add_option("--f", sl_f, "substitution series, coefficients lowest degree first");
  sl1->add_option("--seed", sl_seed, "pipeline seed");

  // invariants subcommands, one per operation
  auto* invariants = app.add_subcommand("invariants", "run one invariant operation");
  invariants->require_subcommand(1);
  uint64_t inv_seed = 0;
  invariants->add_option("--seed", inv_seed, "pipeline seed");

  std::string inv_group, inv_subgroup, inv_variant = "A";
  int64_t inv_c = 1, inv_p = 2, inv_n = 2, inv_max_len = 16, inv_scan = 5000, inv_max_order = 2000;

  auto* op_example = invariants->add_subcommand("example_2_8", "shift stack derived census");
  op_example->add_option("--p", inv_p, "prime")->required();
  op_example->add_option("--n", inv_n, "levels")->required();

  auto* op_gamma = invariants->add_subcommand("gamma_set", "gamma set via the normal lattice");
  op_gamma->add_option("--group", inv_group)->required();
  op_gamma->add_option("--c", inv_c)->required();

  auto* op_agree = invariants->add_subcommand("gamma_agreement", "gamma set two independent ways");
  op_agree->add_option("--group", inv_group)->required();
  op_agree->add_option("--c", inv_c)->required();
  op_agree->add_option("--scan-bound", inv_scan);

  auto* op_agree_corpus =
      invariants->add_subcommand("gamma_agreement_corpus", "gamma agreement over the corpus");
  op_agree_corpus->add_option("--max-order", inv_max_order);
  op_agree_corpus->add_option("--scan-bound", inv_scan);

  auto* op_obliquity = invariants->add_subcommand("obliquity_set", "obliquity set of a subgroup");
  op_obliquity->add_option("--group", inv_group)->required();
  op_obliquity->add_option("--subgroup", inv_subgroup, "subgroup descriptor JSON")->required();
  op_obliquity->add_option("--c", inv_c)->required();
  op_obliquity->add_option("--variant", inv_variant, "A, C, Astar or Cstar");

  auto* op_astar = invariants->add_subcommand("astar_union_check", "A* as a union over overgroups");
  op_astar->add_option("--group", inv_group)->required();
  op_astar->add_option("--subgroup", inv_subgroup)->required();
  op_astar->add_option("--c", inv_c)->required();

  auto* op_graph = invariants->add_subcommand("obliquity_graph", "descent graph of the C variant");
  op_graph->add_option("--group", inv_group)->required();
  op_graph->add_option("--subgroup", inv_subgroup)->required();
  op_graph->add_option("--c", inv_c)->required();

  auto* op_chain = invariants->add_subcommand("narrow_chain", "narrow chain with descent checks");
  op_chain->add_option("--group", inv_group)->required();
  op_chain->add_option("--c", inv_c);
  op_chain->add_option("--max-len", inv_max_len);

  auto* op_hered =
      invariants->add_subcommand("verify_hereditary_condition_v", "hereditary overgroup condition");
  op_hered->add_option("--group", inv_group)->required();
  op_hered->add_option("--subgroup", inv_subgroup)->required();
  op_hered->add_option("--n", inv_n)->required();
  op_hered->add_option("--c", inv_c)->required();
  op_hered->add_option("--scan-bound", inv_scan);

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return cmd_build(build_group, build_wreath, build_cb, build_out);

    if (verify->parsed() || verify_cache->parsed()) {
      jnnf::PipelineConfig config =
          jnnf::load_pipeline_config(verify->parsed() ? verify_config : vcache_config);
      if (!verify_output.empty()) config.output = verify_output;
      jnnf::PipelineOptions options;
      options.workers = verify_workers;
      options.use_cache = !verify_no_cache;
      options.verify_cache = verify_cache->parsed();
      return finish_pipeline(config, options);
    }

    if (report->parsed()) return cmd_report(report_input);
    if (sl1->parsed()) return cmd_sl1(sl_n, sl_p, sl_k, sl_checks, sl_f, sl_seed);

    // invariants: translate the parsed subcommand into a one-job pipeline
    TomlValue params = toml_table();
    std::string module = "jnnf-invariants";
    std::string operation;
    auto put_int = [&params](const char* name, int64_t v) {
      params.tab.emplace(name, TomlValue::make_integer(v));
    };
    auto put_str = [&params](const char* name, const std::string& v) {
      params.tab.emplace(name, TomlValue::make_string(v));
    };
    if (op_example->parsed()) {
      operation = "example_2_8";
      put_int("p", inv_p);
      put_int("n", inv_n);
    } else if (op_gamma->parsed()) {
      operation = "gamma_set";
      put_str("group", inv_group);
      put_int("c", inv_c);
    } else if (op_agree->parsed()) {
      operation = "gamma_agreement";
      put_str("group", inv_group);
      put_int("c", inv_c);
      put_int("scan_bound", inv_scan);
    } else if (op_agree_corpus->parsed()) {
      operation = "gamma_agreement_corpus";
      put_int("max_order", inv_max_order);
      put_int("scan_bound", inv_scan);
    } else if (op_obliquity->parsed()) {
      operation = "obliquity_set";
      put_str("group", inv_group);
      put_str("subgroup", inv_subgroup);
      put_int("c", inv_c);
      put_str("variant", inv_variant);
    } else if (op_astar->parsed()) {
      operation = "astar_union_check";
      put_str("group", inv_group);
      put_str("subgroup", inv_subgroup);
      put_int("c", inv_c);
    } else if (op_graph->parsed()) {
      operation = "obliquity_graph";
      put_str("group", inv_group);
      put_str("subgroup", inv_subgroup);
      put_int("c", inv_c);
    } else if (op_chain->parsed()) {
      operation = "narrow_chain";
      put_str("group", inv_group);
      put_int("c", inv_c);
      put_int("max_len", inv_max_len);
    } else if (op_hered->parsed()) {
      operation = "verify_hereditary_condition_v";
      put_str("group", inv_group);
      put_str("subgroup", inv_subgroup);
      put_int("n", inv_n);
      put_int("c", inv_c);
      put_int("scan_bound", inv_scan);
    } else {
      throw jnnf::error("invariants: no operation selected");
    }
    return run_single_job(module, operation, std::move(params), inv_seed, 1);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
