#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "jnnf/content_hash.hpp"
#include "jnnf/json_io.hpp"
#include "jnnf/pipeline.hpp"
#include "jnnf/report.hpp"
#include "jnnf/result_cache.hpp"
#include "jnnf/standard_groups.hpp"
#include "jnnf/toml_lite.hpp"

using namespace jnnf;
namespace fs = std::filesystem;

namespace {

// Scratch directory per call, cleaned up eagerly so reruns start fresh.
fs::path fresh_dir(const std::string& label) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() /
                 ("jnnf-lab-" + label + "-" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string thrown_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

PipelineConfig config_from(const std::string& text) {
  return parse_pipeline_config(parse_toml(text));
}

PipelineOptions bare_options() {
  PipelineOptions opt;
  opt.use_cache = false;
  opt.write_output = false;
  return opt;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("toml reader covers the pipeline dialect") {
  const std::string text = R"(# preamble comment
seed = 42
output = "out/reports.jsonl"   # trailing comment
flag = true
neg = -17
quoted = "say \"hi\" and \\ then\nnewline"
"spaced key" = 1

[bounds]
enumeration = 2000000
degree = 10000

[[job]]
module = "jnnf-invariants"
operation = "example_2_8"
p = 2
n = 2
list = [1, 2,
        3,]
nested = [[0, 1], [1, 0]]
inline = { simple = "A5", action = "R" }

[[job]]
module = "congruence-sl"
operation = "build_sl1"
names = ["a", "b"]
)";
  TomlValue doc = parse_toml(text);
  REQUIRE(doc.is_table());
  REQUIRE(doc.find("seed")->num == 42);
  CHECK(doc.find("output")->str == "out/reports.jsonl");
  CHECK(doc.find("flag")->flag);
  CHECK(doc.find("neg")->num == -17);
  CHECK(doc.find("quoted")->str == "say \"hi\" and \\ then\nnewline");
  CHECK(doc.find("spaced key")->num == 1);

  const TomlValue* bounds = doc.find("bounds");
  REQUIRE(bounds != nullptr);
  REQUIRE(bounds->is_table());
  CHECK(bounds->find("enumeration")->num == 2000000);
  CHECK(bounds->find("degree")->num == 10000);

  const TomlValue* jobs = doc.find("job");
  REQUIRE(jobs != nullptr);
  REQUIRE(jobs->is_array());
  REQUIRE(jobs->arr.size() == 2);

  const TomlValue& first = jobs->arr[0];
  CHECK(first.find("module")->str == "jnnf-invariants");
  CHECK(first.find("p")->num == 2);
  const TomlValue* list = first.find("list");
  REQUIRE(list->arr.size() == 3);
  CHECK(list->arr[2].num == 3);
  const TomlValue* nested = first.find("nested");
  REQUIRE(nested->arr.size() == 2);
  CHECK(nested->arr[1].arr[0].num == 1);
  const TomlValue* inl = first.find("inline");
  REQUIRE(inl->is_table());
  CHECK(inl->find("simple")->str == "A5");
  CHECK(inl->find("action")->str == "R");

  CHECK(jobs->arr[1].find("names")->arr[1].str == "b");
}

TEST_CASE("toml reader rejects what the dialect excludes") {
  auto msg = [](const std::string& text) {
    return thrown_message([&] { parse_toml(text); });
  };

  CHECK(contains(msg("a = 1.5"), "floating point"));
  CHECK(contains(msg("a.b = 1"), "dotted keys are not supported"));
  CHECK(contains(msg("a = 1\na = 2"), "duplicate key"));
  CHECK(contains(msg("a = \"unterminated"), "toml line 1"));
  CHECK(contains(msg("a = [1, 2"), "toml line"));
  CHECK(contains(msg("a = 1 junk"), "toml line 1"));
  // Errors carry the line where the problem sits, not where parsing started.
  CHECK(contains(msg("ok = 1\nbad = 2.5"), "toml line 2"));
}

TEST_CASE("sha256 matches the published test vector") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(content_hash("abc") ==
        "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("permutation groups round-trip through JSON") {
  PermGroup a5 = alternating_group(5);
  nlohmann::json j = perm_group_to_json(a5);
  CHECK(j["kind"] == "perm");
  CHECK(j["degree"] == 5);

  PermGroup back = perm_group_from_json(j);
  CHECK(back.degree() == a5.degree());
  CHECK(back.order() == a5.order());
  REQUIRE(back.generators().size() == a5.generators().size());
  for (std::size_t i = 0; i < back.generators().size(); ++i)
    CHECK(back.generators()[i].images() == a5.generators()[i].images());

  // The identity has no cycles; it must still survive the trip.
  PermGroup trivial(4, {Permutation(4)});
  PermGroup trivial_back = perm_group_from_json(perm_group_to_json(trivial));
  CHECK(trivial_back.order() == 1);
  CHECK(trivial_back.degree() == 4);

  nlohmann::json bad = j;
  bad["kind"] = "matrix";
  CHECK_THROWS_AS(perm_group_from_json(bad), error);
  nlohmann::json out_of_range = perm_group_to_json(a5);
  out_of_range["generators"][0][0][0] = 7;  // point beyond the degree
  CHECK_THROWS_AS(perm_group_from_json(out_of_range), error);
}

TEST_CASE("content hash ignores how the generating set is presented") {
  // Same A4, two generating sets, different list orders.
  PermGroup first(4, {Permutation::from_cycles(4, {{0, 1, 2}}),
                      Permutation::from_cycles(4, {{0, 1}, {2, 3}})});
  PermGroup second(4, {Permutation::from_cycles(4, {{0, 1}, {2, 3}}),
                       Permutation::from_cycles(4, {{1, 2, 3}})});
  CHECK(group_content_hash(first) == group_content_hash(second));
  CHECK(group_content_hash(first) != group_content_hash(symmetric_group(4)));

  // Past the enumeration bound the serialization falls back to sorted
  // generator images, so reordering the list still cannot matter.
  PermGroup big = group_by_name("A5wrS3");
  std::vector<Permutation> reversed(big.generators().rbegin(), big.generators().rend());
  PermGroup big_reversed(big.degree(), reversed);
  CHECK(big.order() > kCanonicalizeBound);
  CHECK(canonical_group_serialization(big) == canonical_group_serialization(big_reversed));
}

TEST_CASE("subgroup descriptors keep exactly one presentation") {
  PermGroup s4 = symmetric_group(4);
  SubgroupDescriptor d;
  d.parent = group_content_hash(s4);
  d.degree = 4;
  d.generators = {Permutation::from_cycles(4, {{0, 1}, {2, 3}}),
                  Permutation::from_cycles(4, {{0, 2}, {1, 3}})};

  SubgroupDescriptor back = subgroup_from_json(subgroup_to_json(d));
  CHECK(back.parent == d.parent);
  CHECK(back.degree == 4);
  REQUIRE(back.generators.size() == 2);
  CHECK(back.elements.empty());
  CHECK(back.generators[0].images() == d.generators[0].images());

  SubgroupDescriptor both = d;
  both.elements = {Permutation(4)};
  CHECK_THROWS_AS(subgroup_to_json(both), error);

  nlohmann::json neither = subgroup_to_json(d);
  neither.erase("generators");
  CHECK_THROWS_AS(subgroup_from_json(neither), error);
}

TEST_CASE("report bodies are canonical and timing-free") {
  VerificationReport r;
  r.job = "0-m-o";
  r.tag = "t";
  r.status = "pass";
  r.witnesses = nlohmann::json{{"a", 1}};
  r.input_hash = "sha256:ab";
  r.tool_version = kToolVersion;
  r.seed = 7;
  r.timing_ms = 123;

  CHECK(report_body(r) ==
        R"({"input_hash":"sha256:ab","job":"0-m-o","seed":7,"status":"pass",)"
        R"("tag":"t","tool_version":"jnnf 0.1.0","witnesses":{"a":1}})");
  CHECK(contains(report_line(r), "\"timing_ms\":123"));

  VerificationReport r2 = r;
  r2.job = "1-m-o";
  CHECK(reports_canonical({r, r2}) == report_body(r) + "\n" + report_body(r2) + "\n");

  fs::path dir = fresh_dir("reports");
  write_reports(dir / "nested" / "out.jsonl", {r, r2});
  auto back = read_reports(dir / "nested" / "out.jsonl");
  REQUIRE(back.size() == 2);
  CHECK(back[0].job == "0-m-o");
  CHECK(back[0].timing_ms == 123);
  CHECK(back[1].job == "1-m-o");
  CHECK(reports_canonical(back) == reports_canonical({r, r2}));

  CHECK(status_acceptable("pass"));
  CHECK(status_acceptable("inconclusive"));
  CHECK(!status_acceptable("fail"));
  CHECK(!status_acceptable("error"));
}

TEST_CASE("result cache stores once and shrugs off corruption") {
  fs::path dir = fresh_dir("cache");
  ResultCache cache(dir);
  REQUIRE(cache.enabled());

  const std::string key = "sha256:00ff";
  CHECK(!cache.lookup(key).has_value());

  nlohmann::json body = {{"status", "pass"}, {"tag", "t"}, {"witnesses", {{"n", 3}}}};
  cache.store(key, body);
  auto hit = cache.lookup(key);
  REQUIRE(hit.has_value());
  CHECK(*hit == body);

  // Valid entries are write-once; a second store must not overwrite.
  nlohmann::json other = {{"status", "fail"}};
  cache.store(key, other);
  CHECK(*cache.lookup(key) == body);

  // Corruption reads as a miss and the next store repairs the entry.
  write_text(dir / "00ff.json", "{ this is not json");
  CHECK(!cache.lookup(key).has_value());
  cache.store(key, other);
  CHECK(*cache.lookup(key) == other);

  ResultCache disabled;
  CHECK(!disabled.enabled());
  CHECK(!disabled.lookup(key).has_value());
}

TEST_CASE("result cache follows the environment variable") {
  fs::path dir = fresh_dir("cache-env");
  ::setenv(kCacheEnvVar, dir.string().c_str(), 1);
  CHECK(ResultCache::from_environment().enabled());
  ::setenv(kCacheEnvVar, "", 1);
  CHECK(!ResultCache::from_environment().enabled());
  ::unsetenv(kCacheEnvVar);
  CHECK(!ResultCache::from_environment().enabled());
}

TEST_CASE("pipeline config parsing names the offending field") {
  auto msg = [](const std::string& text) {
    return thrown_message([&] { config_from(text); });
  };

  CHECK(contains(msg("mystery = 1"), "mystery"));
  CHECK(contains(msg("seed = -4"), "seed"));
  CHECK(contains(msg("[bounds]\nwidth = 3"), "width"));
  CHECK(contains(msg("[[job]]\nmodule = \"m\""), "operation"));
  CHECK(contains(msg("[[job]]\noperation = \"o\""), "module"));

  PipelineConfig c = config_from(R"(
seed = 9
output = "r.jsonl"
[bounds]
enumeration = 5000
[[job]]
module = "jnnf-invariants"
operation = "example_2_8"
p = 2
n = 2
)");
  CHECK(c.seed == 9);
  CHECK(c.output == fs::path("r.jsonl"));
  CHECK(c.bounds.enumeration == 5000);
  CHECK(c.bounds.degree == PipelineBounds{}.degree);
  REQUIRE(c.jobs.size() == 1);
  CHECK(c.jobs[0].module == "jnnf-invariants");
  CHECK(c.jobs[0].operation == "example_2_8");
  CHECK(c.jobs[0].params.find("p")->num == 2);
  CHECK(c.jobs[0].params.find("module") == nullptr);
}

TEST_CASE("validation reports every broken job before anything runs") {
  PipelineConfig c = config_from(R"(
[[job]]
module = "jnnf-invariants"
operation = "no_such_op"
[[job]]
module = "jnnf-invariants"
operation = "example_2_8"
p = 2
[[job]]
module = "jnnf-invariants"
operation = "example_2_8"
p = "two"
n = 2
[[job]]
module = "jnnf-invariants"
operation = "example_2_8"
p = 2
n = 2
extra = 1
[[job]]
module = "jnnf-invariants"
operation = "example_2_8"
p = 2
n = 2
)");
  auto issues = validate_pipeline(c);
  REQUIRE(issues.size() == 4);
  CHECK(issues[0].job_index == 0);
  CHECK(contains(issues[0].message, "unknown operation 'no_such_op'"));
  CHECK(issues[1].job_index == 1);
  CHECK(contains(issues[1].message, "missing required parameter 'n'"));
  CHECK(issues[2].job_index == 2);
  CHECK(contains(issues[2].message, "parameter 'p' must be an integer"));
  CHECK(issues[3].job_index == 3);
  CHECK(contains(issues[3].message, "unexpected parameter 'extra'"));

  // run_pipeline refuses the whole batch and its message cites the jobs.
  std::string msg = thrown_message([&] { run_pipeline(c, bare_options()); });
  CHECK(contains(msg, "job 0"));
  CHECK(contains(msg, "job 3"));
}

TEST_CASE("a single shift-stack job runs end to end") {
  PipelineConfig c = config_from(R"(
seed = 7
[[job]]
module = "jnnf-invariants"
operation = "example_2_8"
p = 2
n = 2
)");
  PipelineOutcome out = run_pipeline(c, bare_options());
  CHECK(out.exit_code == 0);
  REQUIRE(out.reports.size() == 1);
  const VerificationReport& r = out.reports[0];
  CHECK(r.job == "0-jnnf-invariants-example_2_8");
  CHECK(r.tag == "example-2.8");
  CHECK(r.status == "pass");
  CHECK(r.seed == 7);
  CHECK(r.tool_version == kToolVersion);
  CHECK(r.witnesses["census"] == 8);
  CHECK(r.witnesses["expected"] == 8);
  CHECK(r.witnesses["group_order"] == 128);
  CHECK(r.witnesses["subsets"] == 8);
  CHECK(r.input_hash.rfind("sha256:", 0) == 0);
}

TEST_CASE("empty pipelines succeed and still write their file") {
  fs::path dir = fresh_dir("empty");
  PipelineConfig c = config_from("seed = 1");
  c.output = dir / "reports.jsonl";
  PipelineOptions opt = bare_options();
  opt.write_output = true;
  PipelineOutcome out = run_pipeline(c, opt);
  CHECK(out.exit_code == 0);
  CHECK(out.reports.empty());
  CHECK(fs::exists(c.output));
  CHECK(read_reports(c.output).empty());
}

TEST_CASE("failures and data errors drive the exit code") {
  // The truncated substitution search finds no inner conjugator for this
  // series, so expecting a witness must come back as an honest fail.
  PipelineConfig failing = config_from(R"(
[[job]]
module = "congruence-sl"
operation = "inner_conjugator_search"
n = 2
p = 3
k = 4
f = [0, 1, 1]
expect = "witness"
)");
  PipelineOutcome out = run_pipeline(failing, bare_options());
  CHECK(out.exit_code == 1);
  REQUIRE(out.reports.size() == 1);
  CHECK(out.reports[0].status == "fail");

  // A group name that does not resolve is a data error, not a validation
  // error: the batch runs and the job reports status "error".
  PipelineConfig erroring = config_from(R"(
[[job]]
module = "perm-engine"
operation = "stabilizer_chain"
group = "NoSuchGroup99"
)");
  PipelineOutcome err = run_pipeline(erroring, bare_options());
  CHECK(err.exit_code == 1);
  REQUIRE(err.reports.size() == 1);
  CHECK(err.reports[0].status == "error");
  CHECK(contains(err.reports[0].witnesses["error"].get<std::string>(), "NoSuchGroup99"));

  // Inconclusive is acceptable: the scan route is out of reach, the walk
  // route alone proves nothing, and the exit code stays zero.
  PipelineConfig inconclusive = config_from(R"(
[[job]]
module = "jnnf-invariants"
operation = "gamma_agreement"
group = "S4"
c = 1
scan_bound = 5
)");
  PipelineOutcome inc = run_pipeline(inconclusive, bare_options());
  CHECK(inc.exit_code == 0);
  REQUIRE(inc.reports.size() == 1);
  CHECK(inc.reports[0].status == "inconclusive");
}

TEST_CASE("reruns with one seed reproduce report bodies byte for byte") {
  const std::string text = R"(
seed = 271828
[[job]]
module = "jnnf-invariants"
operation = "example_2_8"
p = 2
n = 2
[[job]]
module = "jnnf-invariants"
operation = "gamma_set"
group = "S4"
c = 1
[[job]]
module = "wreath-tower"
operation = "psi_compose_check"
levels = [{ simple = "A5", action = "R" }, { simple = "A5", action = "R" }]
samples = 20
)";
  PipelineOutcome first = run_pipeline(config_from(text), bare_options());
  PipelineOptions threaded = bare_options();
  threaded.workers = 3;
  PipelineOutcome second = run_pipeline(config_from(text), threaded);
  CHECK(first.exit_code == 0);
  CHECK(second.exit_code == 0);
  CHECK(reports_canonical(first.reports) == reports_canonical(second.reports));
}

TEST_CASE("input hashes see group content, not file layout") {
  fs::path dir = fresh_dir("hash");
  PermGroup first(4, {Permutation::from_cycles(4, {{0, 1, 2}}),
                      Permutation::from_cycles(4, {{0, 1}, {2, 3}})});
  PermGroup second(4, {Permutation::from_cycles(4, {{0, 1}, {2, 3}}),
                       Permutation::from_cycles(4, {{1, 2, 3}})});
  write_text(dir / "a.json", perm_group_to_json(first).dump(2));
  write_text(dir / "b.json", perm_group_to_json(second).dump());

  PipelineConfig c = config_from(R"(
[[job]]
module = "perm-engine"
operation = "stabilizer_chain"
group = ")" + (dir / "a.json").string() + R"("
[[job]]
module = "perm-engine"
operation = "stabilizer_chain"
group = ")" + (dir / "b.json").string() + R"("
)");
  PipelineOutcome out = run_pipeline(c, bare_options());
  REQUIRE(out.reports.size() == 2);
  CHECK(out.reports[0].status == "pass");
  CHECK(out.reports[0].input_hash == out.reports[1].input_hash);
}

TEST_CASE("pipeline cache hits reproduce the first run exactly") {
  fs::path dir = fresh_dir("pipe-cache");
  ::setenv(kCacheEnvVar, dir.string().c_str(), 1);

  const std::string text = R"(
seed = 5
[[job]]
module = "jnnf-invariants"
operation = "example_2_8"
p = 2
n = 2
[[job]]
module = "jnnf-invariants"
operation = "gamma_set"
group = "S4"
c = 1
)";
  PipelineOptions opt;
  opt.write_output = false;

  PipelineOutcome cold = run_pipeline(config_from(text), opt);
  CHECK(cold.cache_hits == 0);
  CHECK(cold.cache_misses == 2);

  PipelineOutcome warm = run_pipeline(config_from(text), opt);
  CHECK(warm.cache_hits == 2);
  CHECK(warm.cache_misses == 0);
  CHECK(reports_canonical(warm.reports) == reports_canonical(cold.reports));

  PipelineOptions audit = opt;
  audit.verify_cache = true;
  PipelineOutcome checked = run_pipeline(config_from(text), audit);
  CHECK(checked.cache_mismatches == 0);
  CHECK(checked.exit_code == 0);

  // Corrupt one entry on disk: it reads as a miss, gets recomputed, and the
  // batch still reproduces the cold bodies.
  bool corrupted = false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!corrupted) {
      write_text(entry.path(), "not json at all");
      corrupted = true;
    }
  }
  REQUIRE(corrupted);
  PipelineOutcome repaired = run_pipeline(config_from(text), opt);
  CHECK(repaired.cache_hits == 1);
  CHECK(repaired.cache_misses == 1);
  CHECK(reports_canonical(repaired.reports) == reports_canonical(cold.reports));

  // Errors are never cached, so the same bad job misses every time. This
  // series keeps more coefficients than the truncation does, which is only
  // detected once the job runs.
  const std::string bad = R"(
[[job]]
module = "congruence-sl"
operation = "substitution_action"
n = 2
p = 3
k = 2
f = [0, 1, 1]
)";
  PipelineOutcome bad_first = run_pipeline(config_from(bad), opt);
  PipelineOutcome bad_second = run_pipeline(config_from(bad), opt);
  CHECK(bad_first.reports[0].status == "error");
  CHECK(bad_first.cache_misses == 1);
  CHECK(bad_second.cache_misses == 1);
  CHECK(bad_second.cache_hits == 0);

  // When the inputs themselves cannot be hashed (the group name does not
  // resolve), the cache is never consulted at all.
  const std::string unhashable = R"(
[[job]]
module = "perm-engine"
operation = "stabilizer_chain"
group = "NoSuchGroup99"
)";
  PipelineOutcome unh = run_pipeline(config_from(unhashable), opt);
  CHECK(unh.reports[0].status == "error");
  CHECK(unh.cache_hits == 0);
  CHECK(unh.cache_misses == 0);

  ::unsetenv(kCacheEnvVar);
}

TEST_CASE("worker pools keep reports in declared order") {
  std::string text = "seed = 3\n";
  for (int c = 0; c < 6; ++c) {
    text += "[[job]]\nmodule = \"jnnf-invariants\"\noperation = \"gamma_set\"\n";
    text += "group = \"" + std::string(c % 2 == 0 ? "S4" : "A4") + "\"\n";
    text += "c = " + std::to_string(c % 3) + "\n";
  }
  PipelineOptions opt = bare_options();
  opt.workers = 3;
  PipelineOutcome out = run_pipeline(config_from(text), opt);
  CHECK(out.exit_code == 0);
  REQUIRE(out.reports.size() == 6);
  for (std::size_t i = 0; i < out.reports.size(); ++i)
    CHECK(out.reports[i].job.rfind(std::to_string(i) + "-", 0) == 0);
}
