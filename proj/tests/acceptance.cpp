// Acceptance runner. Twelve end-to-end checks, one line each, nonzero exit
// when any of them fails. No test framework on purpose: the output is meant
// to be read top to bottom, and ctest only needs the exit code.
//
// Expected counts and orders are pinned here rather than recomputed, so a
// regression in any engine shows up as a FAIL line instead of a silently
// shifted baseline.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "jnnf/congruence_sl.hpp"
#include "jnnf/monomial_stage.hpp"
#include "jnnf/pipeline.hpp"
#include "jnnf/shift_stack.hpp"
#include "jnnf/standard_groups.hpp"
#include "jnnf/trunc_series.hpp"
#include "jnnf/wreath_harness.hpp"
#include "jnnf/wreath_tower.hpp"

using namespace jnnf;

namespace {

constexpr uint32_t kSeed = 271828;

int failures = 0;

template <typename Body>
void criterion(const char* name, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    std::tie(ok, detail) = body();
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s  %-42s %7.1fs  %s\n", ok ? "PASS" : "FAIL", name, secs, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// The monomial stage shared by the first three criteria.
const MonomialStage& stage() {
  static const MonomialStage st = [] {
    StageParams params;
    params.p = {3};
    params.q = {7, 7};
    params.t = {1};
    params.backward_divisibility = true;
    return build_monomial_stage(params);
  }();
  return st;
}

// The runner is normally started from the source root (ctest arranges that),
// but resolve the config relative to the build tree too so it can be run by
// hand from anywhere inside the checkout.
std::filesystem::path default_config() {
  for (const char* probe : {"configs/default.toml", "../configs/default.toml",
                            "../../configs/default.toml"}) {
    if (std::filesystem::exists(probe)) return probe;
  }
  return "configs/default.toml";
}

}  // namespace

int main() {
  ::unsetenv(kCacheEnvVar);  // stale cache entries must not vouch for anything

  criterion("commutator battery on the monomial stage", [] {
    auto rep = verify_commutator_battery(stage());
    std::ostringstream d;
    d << rep.plain_pairs << " plain + " << rep.anchored_pairs << " anchored pairs";
    if (!rep.first_mismatch.empty()) d << "; first mismatch " << rep.first_mismatch;
    return std::pair(rep.ok && rep.plain_pairs == 49 && rep.anchored_pairs == 36, d.str());
  });

  criterion("word-group centre is the scalar line", [] {
    auto cen = centre_of_word_group(stage());
    auto slice = slice_centre_crosscheck(stage(), 0, 2);
    std::ostringstream d;
    d << "centre order " << cen.order << ", slice found " << slice.central_found << " of "
      << slice.predicted << " predicted";
    const bool ok =
        cen.order == 3 && cen.scalar_only && cen.divisibility_hypothesis && slice.agree;
    return std::pair(ok, d.str());
  });

  criterion("scalar relabelling map (3, 6)", [] {
    auto psi = build_scalar_map(stage(), 3, 6);
    auto rep = verify_scalar_map(stage(), psi, kSeed, 1000);
    std::ostringstream d;
    d << rep.identities_checked << " conjugation identities, " << rep.pairs_checked
      << " product pairs";
    const bool ok = rep.ok && rep.conjugation_identities && rep.homomorphism &&
                    rep.composition && rep.identities_checked == 14;
    return std::pair(ok, d.str());
  });

  criterion("base fusion, regular and natural complements", [] {
    auto regular = verify_base_fusion(alternating_group(5), cyclic_group(2));
    auto natural = verify_base_fusion(alternating_group(5), symmetric_group(3));
    uint32_t reps = 0;
    for (const auto& c : regular.cases) reps += c.reps_outside_base;
    for (const auto& c : natural.cases) reps += c.reps_outside_base;
    std::ostringstream d;
    d << regular.cases.size() + natural.cases.size() << " complement cases, " << reps
      << " class representatives off the base";
    return std::pair(regular.holds && natural.holds, d.str());
  });

  criterion("product action is subprimitive", [] {
    auto rep = verify_product_action(alternating_group(5), cyclic_group(2));
    std::ostringstream d;
    d << "degree " << rep.degree << ", order " << rep.order;
    const bool ok = rep.degree == 3600 && rep.faithful && rep.transitive && rep.base_regular &&
                    rep.base_unique_minimal_normal && rep.subprimitive;
    return std::pair(ok, d.str());
  });

  criterion("outer certificate and tower composition", [] {
    Enumerated<PermGroup> ex(alternating_group(5));
    auto flip = conjugation_table(ex, Permutation::from_cycles(5, {{0, 1}}));
    auto cert = outer_certificate(ex, symmetric_group(3), flip);

    WreathTower tower({{alternating_group(5), WreathAction::Regular},
                       {alternating_group(5), WreathAction::Regular}});
    const auto& x0 = tower.x(0);
    auto outer = conjugation_table(x0, Permutation::from_cycles(5, {{0, 1}}));
    auto inner = conjugation_table(x0, Permutation::from_cycles(5, {{0, 1, 2}}));
    auto a = build_psi(tower, {outer, inner}, kSeed, 1000);
    auto b = build_psi(tower, {inner, outer}, kSeed, 1000);
    const bool composed = psi_compose_check(tower, a, b, kSeed, 1000);
    std::ostringstream d;
    d << "certificate " << (cert.found ? "found" : "missing")
      << ", composition sampled 1000 times";
    return std::pair(cert.found && composed, d.str());
  });

  criterion("shift stack census", [] {
    auto two = shift_stack_census(2, 2);
    auto three = shift_stack_census(3, 1);
    std::ostringstream d;
    d << "p=2,n=2 gives " << two.distinct_derived << " of 8; p=3,n=1 gives "
      << three.distinct_derived << " of 4";
    return std::pair(two.distinct_derived == 8 && three.distinct_derived == 4, d.str());
  });

  criterion("gamma routes agree across the corpus", [] {
    uint64_t checks = 0, disagreements = 0;
    std::string first;
    for (const auto& name : corpus_group_names()) {
      Enumerated<PermGroup> E(resolve_group(name));
      for (uint32_t c = 0; c <= 2; ++c) {
        auto rep = detail::gamma_agreement_for(E, c, 5000);
        ++checks;
        if (!rep.agree) {
          ++disagreements;
          if (first.empty()) first = name + " at c=" + std::to_string(c);
        }
      }
    }
    std::ostringstream d;
    d << checks << " group/length pairs";
    if (disagreements) d << "; first disagreement " << first;
    return std::pair(disagreements == 0 && checks == 3 * corpus_group_names().size(), d.str());
  });

  criterion("kernel inclusion across the corpus", [] {
    uint64_t pairs = 0, disagreements = 0;
    for (const auto& name : corpus_group_names()) {
      Enumerated<PermGroup> E(resolve_group(name));
      auto rep = detail::mel_agreement_for(E);
      pairs += rep.pairs;
      disagreements += rep.disagreements;
    }
    std::ostringstream d;
    d << pairs << " normal pairs, " << disagreements << " disagreements";
    return std::pair(pairs > 0 && disagreements == 0, d.str());
  });

  criterion("narrow subgroups above every chief factor", [] {
    uint64_t factors = 0, verified = 0;
    for (const auto& name : corpus_group_names()) {
      Enumerated<PermGroup> E(resolve_group(name));
      auto rep = detail::narrow_agreement_for(E);
      factors += rep.factors;
      verified += rep.verified;
    }
    std::ostringstream d;
    d << verified << " of " << factors << " chief factors carry a verified witness";
    return std::pair(factors > 0 && verified == factors, d.str());
  });

  criterion("congruence quotients and substitution", [] {
    auto E = enumerate_congruence_sl(2, 3, 4);
    auto filt = congruence_filtration(E);
    auto lcs = verify_lcs_equals_congruence(E, filt);
    auto graded = graded_quotients(E, filt);
    auto search = inner_conjugator_search(E, series_from_coeffs(3, 4, {0, 1, 1}));
    const bool first_ok = lcs.congruence_orders == std::vector<uint64_t>{19683, 729, 27, 1} &&
                          lcs.match && graded.ok && graded.rank == 3 &&
                          !search.witness.has_value() && search.candidates == E.size();

    auto E5 = enumerate_congruence_sl(2, 5, 3);
    auto filt5 = congruence_filtration(E5);
    auto lcs5 = verify_lcs_equals_congruence(E5, filt5);
    auto graded5 = graded_quotients(E5, filt5);
    const bool second_ok = lcs5.congruence_orders == std::vector<uint64_t>{15625, 125, 1} &&
                           lcs5.match && graded5.ok && graded5.rank == 3;

    std::ostringstream d;
    d << "orders 19683 and 15625, graded ranks " << graded.rank << " and " << graded5.rank
      << ", " << search.candidates << " conjugator candidates ruled out";
    return std::pair(first_ok && second_ok, d.str());
  });

  criterion("default batch is deterministic", [] {
    PipelineOptions opt;
    opt.use_cache = false;
    opt.write_output = false;
    PipelineOutcome first = run_pipeline(load_pipeline_config(default_config()), opt);
    PipelineOptions threaded = opt;
    threaded.workers = 3;
    PipelineOutcome second = run_pipeline(load_pipeline_config(default_config()), threaded);
    const bool same = reports_canonical(first.reports) == reports_canonical(second.reports);
    std::ostringstream d;
    d << first.reports.size() << " reports twice, exits " << first.exit_code << " and "
      << second.exit_code << (same ? ", identical bodies" : ", bodies differ");
    return std::pair(same && first.exit_code == 0 && second.exit_code == 0, d.str());
  });

  if (failures == 0) {
    std::printf("all 12 criteria hold\n");
    return 0;
  }
  std::printf("%d of 12 criteria failed\n", failures);
  return 1;
}
