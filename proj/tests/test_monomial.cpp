#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "jnnf/monomial_stage.hpp"

using Catch::Matchers::ContainsSubstring;

namespace {

constexpr uint32_t kSeed = 0x6d6f6e6f;

jnnf::StageParams default_params() {
  jnnf::StageParams params;
  params.p = {3};
  params.q = {7, 7};
  params.t = {1};
  params.backward_divisibility = true;
  return params;
}

const jnnf::MonomialStage& the_stage() {
  static const jnnf::MonomialStage st = jnnf::build_monomial_stage(default_params());
  return st;
}

// V index of the anchored monomial with exponent digits s; the anchor
// column of each block carries minus the block sum.
uint32_t embed_w_line(const jnnf::MonomialStage& st, uint32_t s) {
  uint32_t idx = 0;
  for (uint32_t k = 0; k < st.t; ++k) {
    uint32_t sum = 0;
    for (uint32_t u = 1; u < st.q_prev; ++u) {
      const uint32_t d = st.w_digit(s, st.anchored_index(u, k));
      sum = (sum + d) % st.p;
      idx += d * st.vpow[st.gamma_index(u, k)];
    }
    idx += (st.p - sum) % st.p * st.vpow[st.gamma_index(0, k)];
  }
  return idx;
}

jnnf::StageWord single_word(const jnnf::MonomialStage& st, bool diagonal, uint32_t i) {
  jnnf::StageWord w = jnnf::word_identity(st);
  (diagonal ? w.diag_exp : w.trans_exp)[i] = 1;
  return w;
}

jnnf::StageWord random_word(const jnnf::MonomialStage& st, std::mt19937& rng) {
  std::uniform_int_distribution<uint32_t> pd(0, st.p - 1);
  jnnf::StageWord w = jnnf::word_identity(st);
  for (uint32_t i = 0; i < st.anchored_count; ++i) {
    w.trans_exp[i] = pd(rng);
    w.diag_exp[i] = pd(rng);
  }
  w.scalar_exp = pd(rng);
  return w;
}

}  // namespace

TEST_CASE("stage parameters are screened arithmetically") {
  SECTION("the default parameters pass with their unit parts") {
    const auto rep = jnnf::validate_stage_params(default_params());
    REQUIRE(rep.ok);
    REQUIRE(rep.violations.empty());
    REQUIRE(rep.unit_parts == std::vector<jnnf::UnitPart>{{6, 0}, {2, 1}});
  }
  SECTION("an even extension prime is rejected") {
    auto params = default_params();
    params.p = {2};
    const auto rep = jnnf::validate_stage_params(params);
    REQUIRE_FALSE(rep.ok);
    bool mentioned = false;
    for (const auto& v : rep.violations) mentioned = mentioned || v.find("p_1") != std::string::npos;
    REQUIRE(mentioned);
  }
  SECTION("backward divisibility is only demanded in that mode") {
    auto params = default_params();
    params.q = {5, 7};
    REQUIRE_FALSE(jnnf::validate_stage_params(params).ok);
    params.backward_divisibility = false;
    REQUIRE(jnnf::validate_stage_params(params).ok);
  }
  SECTION("shape and coincidence violations") {
    auto params = default_params();
    params.q = {7};
    REQUIRE_FALSE(jnnf::validate_stage_params(params).ok);

    params = default_params();
    params.t = {0};
    REQUIRE_FALSE(jnnf::validate_stage_params(params).ok);

    params = default_params();
    params.q = {3, 7};
    params.backward_divisibility = false;
    const auto rep = jnnf::validate_stage_params(params);
    REQUIRE_FALSE(rep.ok);
    REQUIRE_THAT(rep.violations.front(), ContainsSubstring("equals"));
  }
}

TEST_CASE("the first stage materializes with the forced counts") {
  const auto& st = the_stage();
  REQUIRE(st.q_prev == 7);
  REQUIRE(st.p == 3);
  REQUIRE(st.q == 7);
  REQUIRE(st.zeta == 2);
  REQUIRE(st.gamma_count == 7);
  REQUIRE(st.anchored_count == 6);
  REQUIRE(st.v_dim == 2187);
  REQUIRE(st.w_dim == 729);
  REQUIRE(st.trans.size() == 7);
  REQUIRE(st.rel_trans.size() == 6);
  REQUIRE(jnnf::word_group_order(st) == 1594323);  // 3^13

  SECTION("the pairing table is two on the diagonal and one across the block") {
    for (uint32_t g = 0; g < st.anchored_count; ++g)
      for (uint32_t d = 0; d < st.anchored_count; ++d)
        REQUIRE(st.pairing[g][d] == (g == d ? 2u : 1u));
  }
  SECTION("oversized bases are refused") {
    auto params = default_params();
    params.t = {2};
    REQUIRE_THROWS_WITH(jnnf::build_monomial_stage(params), ContainsSubstring("10000"));

    params = default_params();
    params.q = {13, 7};
    REQUIRE_THROWS_WITH(jnnf::build_monomial_stage(params), ContainsSubstring("10000"));

    params = default_params();
    params.q = {2, 7};
    params.t = {8};
    params.backward_divisibility = false;
    REQUIRE_THROWS_WITH(jnnf::build_monomial_stage(params), ContainsSubstring("1000000"));
  }
  SECTION("later stages are refused outright") {
    REQUIRE_THROWS_WITH(jnnf::build_monomial_stage(default_params(), 2),
                        ContainsSubstring("first stage"));
  }
  SECTION("invalid parameters are refused with the first violation") {
    auto params = default_params();
    params.p = {2};
    REQUIRE_THROWS_AS(jnnf::build_monomial_stage(params), jnnf::error);
  }
}

TEST_CASE("generator actions on the algebra basis") {
  const auto& st = the_stage();

  SECTION("a translation moves the empty monomial to its own line") {
    for (uint32_t g = 0; g < st.gamma_count; ++g) {
      REQUIRE(st.trans[g].dest[0] == st.vpow[g]);
      REQUIRE(st.trans[g].coef[0] == 1);
    }
  }
  SECTION("a diagonal reads one exponent") {
    REQUIRE(st.diag[3].coef[0] == 1);
    REQUIRE(st.diag[3].coef[st.vpow[3]] == st.zeta);
    REQUIRE(st.diag[3].dest[st.vpow[3]] == st.vpow[3]);
  }
  SECTION("the scalar multiplies every line") {
    for (uint32_t i = 0; i < st.v_dim; ++i) {
      REQUIRE(st.scalar_v.dest[i] == i);
      REQUIRE(st.scalar_v.coef[i] == 2);
    }
  }
  SECTION("base steps relabel the plain generators") {
    bool all = true;
    for (uint32_t g = 1; g < st.q_prev; ++g) {
      const auto base = jnnf::base_action_on_v(st, g);
      const auto back = jnnf::map_inverse(base, st.q);
      for (uint32_t gi = 0; gi < st.gamma_count; ++gi) {
        const uint32_t moved =
            st.gamma_index((st.gamma_u(gi) + g) % st.q_prev, st.gamma_k(gi));
        all = all && jnnf::map_compose(jnnf::map_compose(back, st.trans[gi], st.q), base,
                                       st.q) == st.trans[moved];
        all = all && jnnf::map_compose(jnnf::map_compose(back, st.diag[gi], st.q), base,
                                       st.q) == st.diag[moved];
      }
    }
    REQUIRE(all);
  }
  SECTION("the anchored maps are the restriction of the full ones") {
    bool all = true;
    for (uint32_t i = 0; i < st.anchored_count; ++i) {
      for (uint32_t s = 0; s < st.w_dim; ++s) {
        const uint32_t line = embed_w_line(st, s);
        all = all && embed_w_line(st, st.w_trans[i].dest[s]) == st.rel_trans[i].dest[line];
        all = all && st.w_trans[i].coef[s] == st.rel_trans[i].coef[line];
        all = all && embed_w_line(st, st.w_diag[i].dest[s]) == st.rel_diag[i].dest[line];
        all = all && st.w_diag[i].coef[s] == st.rel_diag[i].coef[line];
      }
    }
    for (uint32_t g = 0; g < st.q_prev; ++g) {
      const auto on_w = jnnf::base_action_on_w(st, g);
      const auto on_v = jnnf::base_action_on_v(st, g);
      for (uint32_t s = 0; s < st.w_dim; ++s)
        all = all && embed_w_line(st, on_w.dest[s]) == on_v.dest[embed_w_line(st, s)];
    }
    for (uint32_t s = 0; s < st.w_dim; ++s)
      all = all && st.scalar_w.coef[s] == st.scalar_v.coef[embed_w_line(st, s)];
    REQUIRE(all);
  }
}

TEST_CASE("the commutator battery separates matching indices") {
  const auto& st = the_stage();
  const auto rep = jnnf::verify_commutator_battery(st);
  REQUIRE(rep.plain_pairs == 49);
  REQUIRE(rep.anchored_pairs == 36);
  REQUIRE(rep.ok);
  REQUIRE(rep.first_mismatch.empty());

  SECTION("a matching pair produces exactly the scalar") {
    REQUIRE(jnnf::map_commutator(st.trans[2], st.diag[2], st.q) == st.scalar_v);
  }
  SECTION("a mixed pair commutes outright") {
    REQUIRE(jnnf::map_is_identity(jnnf::map_commutator(st.trans[1], st.diag[4], st.q)));
  }
}

TEST_CASE("normal form words mirror the monomial composition") {
  const auto& st = the_stage();

  std::vector<jnnf::StageWord> gens;
  for (uint32_t i = 0; i < st.anchored_count; ++i) {
    gens.push_back(single_word(st, false, i));
    gens.push_back(single_word(st, true, i));
  }
  {
    jnnf::StageWord z = jnnf::word_identity(st);
    z.scalar_exp = 1;
    gens.push_back(z);
  }

  SECTION("every generator pair multiplies faithfully on both bases") {
    bool all = true;
    for (const auto& a : gens)
      for (const auto& b : gens) {
        const auto product = jnnf::word_multiply(st, a, b);
        all = all && jnnf::word_realize(st, product, false) ==
                         jnnf::map_compose(jnnf::word_realize(st, a, false),
                                           jnnf::word_realize(st, b, false), st.q);
        all = all && jnnf::word_realize(st, product, true) ==
                         jnnf::map_compose(jnnf::word_realize(st, a, true),
                                           jnnf::word_realize(st, b, true), st.q);
      }
    REQUIRE(all);
  }
  SECTION("random words multiply faithfully") {
    std::mt19937 rng(kSeed);
    bool all = true;
    for (int j = 0; j < 200; ++j) {
      const auto a = random_word(st, rng), b = random_word(st, rng);
      all = all && jnnf::word_realize(st, jnnf::word_multiply(st, a, b), false) ==
                       jnnf::map_compose(jnnf::word_realize(st, a, false),
                                         jnnf::word_realize(st, b, false), st.q);
    }
    REQUIRE(all);
  }
  SECTION("swapping a matching pair costs the scalar squared") {
    const auto t = single_word(st, false, 4), d = single_word(st, true, 4);
    const auto td = jnnf::word_multiply(st, t, d);
    const auto dt = jnnf::word_multiply(st, d, t);
    REQUIRE(td.scalar_exp == 0);
    REQUIRE(dt.scalar_exp == 1);  // minus two mod three
    jnnf::StageWord zz = jnnf::word_identity(st);
    zz.scalar_exp = 2;
    REQUIRE(jnnf::word_multiply(st, dt, zz) == td);
  }
  SECTION("the scalar word is central") {
    std::mt19937 rng(kSeed + 1);
    jnnf::StageWord z = jnnf::word_identity(st);
    z.scalar_exp = 1;
    bool all = true;
    for (int j = 0; j < 50; ++j) {
      const auto w = random_word(st, rng);
      all = all && jnnf::word_multiply(st, w, z) == jnnf::word_multiply(st, z, w);
    }
    REQUIRE(all);
  }
  SECTION("translation-only words add with no correction") {
    std::mt19937 rng(kSeed + 2);
    bool all = true;
    for (int j = 0; j < 50; ++j) {
      auto a = random_word(st, rng), b = random_word(st, rng);
      a.diag_exp.assign(st.anchored_count, 0);
      b.diag_exp.assign(st.anchored_count, 0);
      a.scalar_exp = b.scalar_exp = 0;
      all = all && jnnf::word_multiply(st, a, b).scalar_exp == 0;
    }
    REQUIRE(all);
  }
  SECTION("inverses cancel") {
    std::mt19937 rng(kSeed + 3);
    bool all = true;
    for (int j = 0; j < 200; ++j) {
      const auto w = random_word(st, rng);
      all = all && jnnf::word_multiply(st, w, jnnf::word_inverse(st, w)) ==
                       jnnf::word_identity(st);
      all = all && jnnf::word_multiply(st, jnnf::word_inverse(st, w), w) ==
                       jnnf::word_identity(st);
    }
    REQUIRE(all);
  }
  SECTION("words from another stage are rejected") {
    jnnf::StageWord stray;
    stray.trans_exp.assign(2, 0);
    stray.diag_exp.assign(2, 0);
    REQUIRE_THROWS_WITH(jnnf::word_multiply(st, stray, stray),
                        ContainsSubstring("does not belong"));
  }
}

TEST_CASE("the word group centre is the scalar line") {
  const auto& st = the_stage();
  const auto rep = jnnf::centre_of_word_group(st);
  REQUIRE(rep.trans_null_dim == 0);
  REQUIRE(rep.diag_null_dim == 0);
  REQUIRE(rep.order == 3);
  REQUIRE(rep.scalar_only);
  REQUIRE(rep.divisibility_hypothesis);

  SECTION("the brute-force slice scan agrees with the radical") {
    const auto slice = jnnf::slice_centre_crosscheck(st, 0, 2);
    REQUIRE(slice.words_scanned == 243);   // 3^5
    REQUIRE(slice.central_found == 27);    // radical is one-dimensional on each side
    REQUIRE(slice.predicted == 27);
    REQUIRE(slice.agree);
  }
  SECTION("slice bounds are enforced") {
    REQUIRE_THROWS_WITH(jnnf::slice_centre_crosscheck(st, 1, 2),
                        ContainsSubstring("no such block"));
    REQUIRE_THROWS_WITH(jnnf::slice_centre_crosscheck(st, 0, 7),
                        ContainsSubstring("wider"));
  }
}

TEST_CASE("the stage centre argument verifies step by step") {
  const auto& st = the_stage();
  const auto rep = jnnf::verify_stage_centre(st);
  REQUIRE(rep.scalar_scales_globally);
  REQUIRE(rep.scalar_value == 2);
  REQUIRE(rep.spanning_cases_move);
  REQUIRE(rep.cases_checked == 104);  // 7 * 15 cases minus the identity
  REQUIRE(rep.ok);
}

TEST_CASE("stage elements form the advertised extension") {
  const auto& st = the_stage();
  std::mt19937 rng(kSeed + 4);

  SECTION("identity and inverses") {
    const auto id = jnnf::stage_identity(st);
    bool all = true;
    for (int j = 0; j < 100; ++j) {
      const auto e = jnnf::random_stage_element(st, rng);
      all = all && jnnf::stage_multiply(st, e, id) == e;
      all = all && jnnf::stage_multiply(st, id, e) == e;
      all = all && jnnf::stage_multiply(st, e, jnnf::stage_inverse(st, e)) == id;
      all = all && jnnf::stage_multiply(st, jnnf::stage_inverse(st, e), e) == id;
    }
    REQUIRE(all);
  }
  SECTION("associativity on random triples") {
    bool all = true;
    for (int j = 0; j < 100; ++j) {
      const auto a = jnnf::random_stage_element(st, rng);
      const auto b = jnnf::random_stage_element(st, rng);
      const auto c = jnnf::random_stage_element(st, rng);
      all = all && jnnf::stage_multiply(st, jnnf::stage_multiply(st, a, b), c) ==
                       jnnf::stage_multiply(st, a, jnnf::stage_multiply(st, b, c));
    }
    REQUIRE(all);
  }
  SECTION("the complement acts through a homomorphism") {
    bool all = true;
    for (int j = 0; j < 60; ++j) {
      auto a = jnnf::random_stage_element(st, rng);
      auto b = jnnf::random_stage_element(st, rng);
      a.w.clear();
      b.w.clear();
      const auto ab = jnnf::stage_multiply(st, a, b);
      all = all && jnnf::complement_action(st, ab.d, ab.g) ==
                       jnnf::map_compose(jnnf::complement_action(st, a.d, a.g),
                                         jnnf::complement_action(st, b.d, b.g), st.q);
    }
    REQUIRE(all);
  }
  SECTION("word conjugation matches the monomial picture") {
    bool all = true;
    for (uint32_t g = 0; g < st.q_prev; ++g) {
      const auto base = jnnf::base_action_on_v(st, g);
      const auto back = jnnf::map_inverse(base, st.q);
      for (uint32_t i = 0; i < st.anchored_count; ++i)
        for (const bool diagonal : {false, true}) {
          const auto w = single_word(st, diagonal, i);
          all = all && jnnf::word_realize(st, jnnf::conjugate_word(st, w, g), false) ==
                           jnnf::map_compose(
                               jnnf::map_compose(back, jnnf::word_realize(st, w, false), st.q),
                               base, st.q);
        }
    }
    for (int j = 0; j < 30; ++j) {
      const auto w = random_word(st, rng);
      const uint32_t g = rng() % st.q_prev;
      const auto base = jnnf::base_action_on_v(st, g);
      const auto back = jnnf::map_inverse(base, st.q);
      all = all && jnnf::word_realize(st, jnnf::conjugate_word(st, w, g), false) ==
                       jnnf::map_compose(
                           jnnf::map_compose(back, jnnf::word_realize(st, w, false), st.q),
                           base, st.q);
    }
    REQUIRE(all);
  }
}

TEST_CASE("scalar maps relabel generators and respect the product") {
  const auto& st = the_stage();
  const auto psi = jnnf::build_scalar_map(st, 3, 6);

  SECTION("the index relabelling is multiplication by the base scalar") {
    REQUIRE(psi.gamma_image == std::vector<uint32_t>{0, 3, 6, 2, 5, 1, 4});
  }
  SECTION("the full verification battery passes") {
    const auto rep = jnnf::verify_scalar_map(st, psi, kSeed, 1000);
    REQUIRE(rep.conjugation_identities);
    REQUIRE(rep.identities_checked == 14);
    REQUIRE(rep.homomorphism);
    REQUIRE(rep.pairs_checked == 16 * 16 + 1000);
    REQUIRE(rep.composition);
    REQUIRE_FALSE(rep.prefix_identity);
    REQUIRE(rep.scalar_subgroup == std::vector<uint32_t>{1, 2, 4});
    REQUIRE_FALSE(rep.lambda_in_scalar_subgroup);
    REQUIRE(rep.ok);
  }
  SECTION("unit scalars give the identity map") {
    const auto one = jnnf::build_scalar_map(st, 1, 1);
    REQUIRE(jnnf::map_is_identity(one.on_v));
    REQUIRE(jnnf::map_is_identity(one.on_w));
    std::mt19937 rng(kSeed + 5);
    bool all = true;
    for (int j = 0; j < 20; ++j) {
      const auto e = jnnf::random_stage_element(st, rng);
      all = all && jnnf::scalar_map_apply(st, one, e) == e;
    }
    REQUIRE(all);
  }
  SECTION("composing two maps multiplies the scalars") {
    const auto theta = jnnf::build_scalar_map(st, 2, 3);
    const auto prod = jnnf::build_scalar_map(st, 6, 4);  // 3*2 and 6*3 mod 7
    std::mt19937 rng(kSeed + 6);
    bool all = true;
    for (int j = 0; j < 50; ++j) {
      const auto e = jnnf::random_stage_element(st, rng);
      const auto direct = jnnf::scalar_map_apply(st, prod, e);
      all = all && jnnf::scalar_map_apply(st, theta, jnnf::scalar_map_apply(st, psi, e)) ==
                       direct;
      all = all && jnnf::scalar_map_apply(st, psi, jnnf::scalar_map_apply(st, theta, e)) ==
                       direct;
    }
    REQUIRE(all);
  }
  SECTION("zero scalars are rejected") {
    REQUIRE_THROWS_WITH(jnnf::build_scalar_map(st, 0, 5), ContainsSubstring("unit"));
    REQUIRE_THROWS_WITH(jnnf::build_scalar_map(st, 7, 5), ContainsSubstring("unit"));
    REQUIRE_THROWS_WITH(jnnf::build_scalar_map(st, 3, 7), ContainsSubstring("unit"));
  }
}
