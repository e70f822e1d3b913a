#pragma once

// Checkers for descending chains of normal subgroups and for the conditions
// linking consecutive stages of a finite inverse system.  Every routine
// reports condition-by-condition outcomes with witnesses; none of them
// asserts a theorem's conclusion on the caller's behalf.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jnnf/enumerated_group.hpp"
#include "jnnf/error.hpp"
#include "jnnf/group_concepts.hpp"
#include "jnnf/group_kernel.hpp"
#include "jnnf/quotient.hpp"
#include "jnnf/subgroup_scan.hpp"

namespace jnnf {

enum class CheckStatus { holds, fails, not_applicable };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::holds: return "holds";
    case CheckStatus::fails: return "fails";
    case CheckStatus::not_applicable: return "not-applicable";
  }
  return "?";
}

namespace detail {

template <GroupBackend G>
void require_normal_in(const Enumerated<G>& E, const Subgroup& u, const Subgroup& s,
                       const char* what) {
  require(s.mask.subset_of(u.mask), what);
  for (uint32_t ug : u.gens)
    for (uint32_t sg : s.gens) require(s.mask.get(E.conj(sg, ug)), what);
}

}  // namespace detail

// Step n of a chain H_0 > H_1 > ... compares H_n against H_{n-1}.
struct ChainStep {
  // gamma_{c+1}(H_n) <= M_U(gamma_{c+1}(H_{n-1})) < gamma_{c+1}(H_{n-1});
  // the Melnikov side is undefined when gamma_{c+1}(H_{n-1}) is trivial,
  // and the step is marked not-applicable.
  CheckStatus melnikov_descent = CheckStatus::not_applicable;
  // every N normal in U satisfies gamma_{c+1}(N) <= H_{n-1} or
  // gamma_{c+1}(H_n) <= gamma_{c+1}(N)
  bool dichotomy = true;
  std::vector<Subgroup> dichotomy_failures;
};

struct ChainReport {
  std::vector<ChainStep> steps;  // steps[n-1] links chain[n-1] and chain[n]
  uint64_t intersection_order = 0;
  bool melnikov_descent_throughout = true;  // no step fails; not-applicable allowed
  bool dichotomy_throughout = true;
};

template <GroupBackend G>
ChainReport verify_chain(const Enumerated<G>& E, const Subgroup& u,
                         const std::vector<Subgroup>& chain, uint32_t c) {
  require(!chain.empty(), "verify_chain: empty chain");
  for (const auto& m : chain)
    detail::require_normal_in(E, u, m, "verify_chain: chain member is not normal");
  for (std::size_t i = 1; i < chain.size(); ++i)
    require(chain[i].mask.subset_of(chain[i - 1].mask) && chain[i].order < chain[i - 1].order,
            "verify_chain: chain is not strictly descending");

  auto lattice = normal_subgroups(E, u);
  std::vector<Subgroup> lattice_gammas;
  lattice_gammas.reserve(lattice.size());
  for (const auto& n : lattice) lattice_gammas.push_back(gamma(E, n, c));

  ChainReport report;
  Bitset meet = chain.front().mask;
  Subgroup gamma_prev = gamma(E, chain.front(), c);
  for (std::size_t n = 1; n < chain.size(); ++n) {
    ChainStep step;
    Subgroup gamma_cur = gamma(E, chain[n], c);

    if (gamma_prev.order == 1) {
      step.melnikov_descent = CheckStatus::not_applicable;
    } else {
      Subgroup mel = melnikov_rel(E, u, gamma_prev);
      bool ok = gamma_cur.mask.subset_of(mel.mask) && mel.order < gamma_prev.order;
      step.melnikov_descent = ok ? CheckStatus::holds : CheckStatus::fails;
      if (!ok) report.melnikov_descent_throughout = false;
    }

    for (std::size_t i = 0; i < lattice.size(); ++i) {
      if (lattice_gammas[i].mask.subset_of(chain[n - 1].mask)) continue;
      if (gamma_cur.mask.subset_of(lattice_gammas[i].mask)) continue;
      step.dichotomy = false;
      step.dichotomy_failures.push_back(lattice[i]);
    }
    if (!step.dichotomy) report.dichotomy_throughout = false;

    meet = meet & chain[n].mask;
    gamma_prev = std::move(gamma_cur);
    report.steps.push_back(std::move(step));
  }
  report.intersection_order = subgroup_from_elements(E, meet).order;
  return report;
}

// Descending chain of narrow normal subgroups linked through Melnikov
// subgroups: L_i = M_U(K_i) and K_{i+1} is narrow inside gamma_{c+1}(L_i).
// The chain stops when that gamma value is trivial, when no narrow subgroup
// exists inside it, or at max_len links.
//
// Narrow members are chosen largest-canonical-first, preferring proper
// subgroups for the head of the chain; picking the smallest would jump
// straight to a minimal normal subgroup, whose Melnikov subgroup is trivial,
// ending every chain after one link.
template <GroupBackend G>
std::vector<std::pair<Subgroup, Subgroup>> narrow_chain(const Enumerated<G>& E,
                                                        const Subgroup& u, uint32_t c,
                                                        std::size_t max_len) {
  std::vector<std::pair<Subgroup, Subgroup>> out;
  if (u.order == 1 || max_len == 0) return out;
  auto lattice = normal_subgroups(E, u);

  auto pick = [&](const Bitset& bound, bool proper_only) -> std::optional<Subgroup> {
    std::optional<Subgroup> best;
    for (const auto& k : lattice) {
      if (k.order == 1) continue;
      if (proper_only && k.order == u.order) continue;
      if (!k.mask.subset_of(bound)) continue;
      if (!is_narrow(E, u, k)) continue;
      if (!best || Subgroup::canonical_less(*best, k)) best = k;
    }
    return best;
  };

  std::optional<Subgroup> k = pick(u.mask, true);
  if (!k) k = pick(u.mask, false);
  while (k && out.size() < max_len) {
    Subgroup l = melnikov_rel(E, u, *k);
    out.emplace_back(std::move(*k), l);
    if (l.order == 1) break;
    Subgroup g = gamma(E, l, c);
    if (g.order == 1) break;
    k = pick(g.mask, false);
  }
  return out;
}

// Outcome of the four conditions tying a stage (group, distinguished normal
// subgroup P) to the following stage through the connecting surjection rho.
// Q is the image of the next stage's distinguished subgroup under rho, and
// the kernel entries refer to the map from this stage down to the previous
// one, which does not exist at the bottom stage.
struct InvlimStageReport {
  // condition: the stage has a normal subgroup of nilpotency class at most
  // c.  Trivially true for a finite group; the witness records the largest
  // normal subgroup S with gamma_{c+1}(S) = 1 so degeneracy stays visible.
  bool virtually_nilpotent = true;
  uint64_t nilpotent_witness_order = 0;
  uint64_t nilpotent_witness_index = 0;

  bool p_strictly_above_q = false;

  // links of the sandwich gamma(P) > M >= ker >= gamma(Q) > 1, where
  // M = M_{G}(gamma_{c+1}(P)).  Without a downward map the two kernel links
  // are not applicable and the direct comparison M >= gamma(Q) substitutes.
  CheckStatus gamma_p_above_melnikov = CheckStatus::not_applicable;
  CheckStatus melnikov_above_kernel = CheckStatus::not_applicable;
  CheckStatus kernel_above_gamma_q = CheckStatus::not_applicable;
  CheckStatus melnikov_above_gamma_q = CheckStatus::not_applicable;
  CheckStatus gamma_q_nontrivial = CheckStatus::fails;
  bool sandwich = false;  // all applicable links hold

  bool dichotomy = true;  // gamma(N) <= P or gamma(Q) <= gamma(N), all N normal
  std::vector<Subgroup> dichotomy_failures;

  Subgroup q;
};

template <GroupBackend A, GroupBackend B>
InvlimStageReport verify_invlim_stage(const Enumerated<A>& stage, const Subgroup& p,
                                      const std::optional<Subgroup>& kernel_from_below,
                                      const Enumerated<B>& next, const Subgroup& next_p,
                                      const Homomorphism& rho, uint32_t c) {
  Subgroup whole = full_subgroup(stage);
  detail::require_normal_in(stage, whole, p, "verify_invlim_stage: P is not normal");
  detail::require_normal_in(next, full_subgroup(next), next_p,
                            "verify_invlim_stage: next stage's P is not normal");
  require(rho.well_defined && is_surjective(next, stage, rho),
          "verify_invlim_stage: connecting map is not a surjective homomorphism");
  if (kernel_from_below)
    detail::require_normal_in(stage, whole, *kernel_from_below,
                              "verify_invlim_stage: supplied kernel is not normal");

  InvlimStageReport report;
  report.q = image_of(next, stage, rho, next_p);
  detail::require_normal_in(stage, whole, report.q,
                            "verify_invlim_stage: image of next P is not normal");

  auto lattice = normal_subgroups(stage, whole);
  for (const auto& n : lattice)
    if (gamma(stage, n, c).order == 1 && n.order > report.nilpotent_witness_order)
      report.nilpotent_witness_order = n.order;
  report.nilpotent_witness_index = whole.order / report.nilpotent_witness_order;
  report.virtually_nilpotent = true;

  report.p_strictly_above_q =
      report.q.mask.subset_of(p.mask) && report.q.order < p.order;

  Subgroup gamma_p = gamma(stage, p, c);
  Subgroup gamma_q = gamma(stage, report.q, c);
  report.gamma_q_nontrivial = gamma_q.order > 1 ? CheckStatus::holds : CheckStatus::fails;

  if (gamma_p.order > 1) {
    Subgroup mel = melnikov_rel(stage, whole, gamma_p);
    report.gamma_p_above_melnikov =
        mel.order < gamma_p.order ? CheckStatus::holds : CheckStatus::fails;
    if (kernel_from_below) {
      report.melnikov_above_kernel = kernel_from_below->mask.subset_of(mel.mask)
                                         ? CheckStatus::holds
                                         : CheckStatus::fails;
      report.kernel_above_gamma_q = gamma_q.mask.subset_of(kernel_from_below->mask)
                                        ? CheckStatus::holds
                                        : CheckStatus::fails;
    } else {
      report.melnikov_above_gamma_q =
          gamma_q.mask.subset_of(mel.mask) ? CheckStatus::holds : CheckStatus::fails;
    }
  }
  auto applicable_holds = [](CheckStatus s) { return s != CheckStatus::fails; };
  report.sandwich = gamma_p.order > 1 && report.gamma_q_nontrivial == CheckStatus::holds &&
                    applicable_holds(report.gamma_p_above_melnikov) &&
                    applicable_holds(report.melnikov_above_kernel) &&
                    applicable_holds(report.kernel_above_gamma_q) &&
                    applicable_holds(report.melnikov_above_gamma_q);

  for (const auto& n : lattice) {
    Subgroup gn = gamma(stage, n, c);
    if (gn.mask.subset_of(p.mask)) continue;
    if (gamma_q.mask.subset_of(gn.mask)) continue;
    report.dichotomy = false;
    report.dichotomy_failures.push_back(n);
  }
  return report;
}

// Search for a non-normal subgroup V with at most n conjugates, any two
// distinct conjugates commuting elementwise, whose normal closure W
// satisfies gamma_{c+1}(P) <= gamma_{c+1}(gamma_{c+1}(W)).  The condition
// under test holds exactly when no such V exists.
struct ConditionVOutcome {
  Subgroup v;
  std::size_t conjugate_count = 0;
  std::string status;  // "violates" or the reason the candidate was excluded
};

struct ConditionVReport {
  bool holds = true;
  std::vector<ConditionVOutcome> violations;
  std::vector<ConditionVOutcome> candidate_log;  // filled in candidate mode only
  std::size_t scanned = 0;
};

template <GroupBackend G>
ConditionVReport verify_hereditary_condition_v(
    const Enumerated<G>& E, const Subgroup& u, const Subgroup& p, uint32_t n, uint32_t c,
    const std::optional<std::vector<Subgroup>>& candidates = std::nullopt,
    uint64_t scan_bound = 10000) {
  detail::require_normal_in(E, u, p, "verify_hereditary_condition_v: P is not normal");
  Subgroup gamma_p = gamma(E, p, c);

  auto evaluate = [&](const Subgroup& v,
                      const std::vector<Subgroup>& orbit) -> ConditionVOutcome {
    ConditionVOutcome out{v, orbit.size(), ""};
    if (orbit.size() == 1) {
      out.status = "normal";
      return out;
    }
    if (orbit.size() > n) {
      out.status = "too-many-conjugates";
      return out;
    }
    for (std::size_t i = 0; i < orbit.size(); ++i)
      for (std::size_t j = i + 1; j < orbit.size(); ++j)
        for (uint32_t a : orbit[i].gens)
          for (uint32_t b : orbit[j].gens)
            if (E.comm(a, b) != E.identity_index()) {
              out.status = "conjugates-do-not-commute";
              return out;
            }
    Subgroup w = normal_closure_in(E, u, v.gens);
    Subgroup inner = gamma(E, gamma(E, w, c), c);
    out.status = gamma_p.mask.subset_of(inner.mask) ? "violates" : "closure-misses-gamma-p";
    return out;
  };

  ConditionVReport report;
  if (candidates) {
    for (const auto& v : *candidates) {
      require(v.mask.subset_of(u.mask),
              "verify_hereditary_condition_v: candidate outside the group");
      auto outcome = evaluate(v, subgroup_conjugates(E, u, v));
      if (outcome.status == "violates") report.violations.push_back(outcome);
      report.candidate_log.push_back(std::move(outcome));
      ++report.scanned;
    }
  } else {
    require(u.order <= scan_bound,
            "verify_hereditary_condition_v: scan bound exceeded and no candidate list");
    for (const auto& v : all_subgroups(E, u, scan_bound)) {
      if (v.order == 1 || v.order == u.order) continue;
      auto orbit = subgroup_conjugates(E, u, v);
      bool least = true;  // visit each conjugacy class of subgroups once
      for (const auto& s : orbit)
        if (Subgroup::canonical_less(s, v)) {
          least = false;
          break;
        }
      if (!least) continue;
      ++report.scanned;
      auto outcome = evaluate(v, orbit);
      if (outcome.status == "violates") report.violations.push_back(std::move(outcome));
    }
  }
  report.holds = report.violations.empty();
  return report;
}

}  // namespace jnnf
