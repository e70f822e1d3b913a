#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "jnnf/enumerated_group.hpp"
#include "jnnf/group_kernel.hpp"
#include "jnnf/quotient.hpp"
#include "jnnf/standard_groups.hpp"
#include "jnnf/subgroup_scan.hpp"

using namespace jnnf;

namespace {

Enumerated<PermGroup> enumerate(const PermGroup& g) { return Enumerated<PermGroup>(g); }

Subgroup sub_of(const Enumerated<PermGroup>& E, const std::vector<Permutation>& gens) {
  std::vector<uint32_t> idx;
  for (const auto& g : gens) idx.push_back(E.index_of(g));
  return closure(E, idx);
}

}

TEST_CASE("enumeration is complete and multiplication agrees with the backend") {
  auto E = enumerate(symmetric_group(4));
  REQUIRE(E.size() == 24);
  for (uint32_t a = 0; a < E.size(); ++a) {
    CHECK(E.mul(a, E.identity_index()) == a);
    CHECK(E.mul(a, E.inv(a)) == E.identity_index());
  }
  // spot check against the backend
  uint32_t x = E.generator_indices()[0], y = E.generator_indices()[1];
  CHECK(E.element(E.mul(x, y)) == E.element(x) * E.element(y));
}

TEST_CASE("enumeration bound is enforced") {
  CHECK_THROWS_AS(Enumerated<PermGroup>(symmetric_group(6), 500), bound_error);
}

TEST_CASE("element orders") {
  auto E = enumerate(quaternion_group());
  uint64_t n1 = 0, n2 = 0, n4 = 0;
  for (uint32_t i = 0; i < E.size(); ++i) {
    uint64_t o = E.element_order(i);
    if (o == 1) ++n1;
    if (o == 2) ++n2;
    if (o == 4) ++n4;
  }
  CHECK(n1 == 1);
  CHECK(n2 == 1);  // only -1 has order 2
  CHECK(n4 == 6);
}

TEST_CASE("conjugacy class sizes") {
  auto check_sizes = [](const PermGroup& g, std::vector<std::size_t> want) {
    auto E = enumerate(g);
    auto classes = conjugacy_classes(E, full_subgroup(E));
    std::vector<std::size_t> got;
    for (const auto& c : classes) got.push_back(c.size());
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);
  };
  check_sizes(symmetric_group(4), {1, 3, 6, 6, 8});
  check_sizes(alternating_group(4), {1, 3, 4, 4});
  check_sizes(quaternion_group(), {1, 1, 2, 2, 2});
  check_sizes(alternating_group(5), {1, 12, 12, 15, 20});
}

TEST_CASE("commutator subgroups of the classics") {
  auto derived_order = [](const PermGroup& g) {
    auto E = enumerate(g);
    auto u = full_subgroup(E);
    return commutator_subgroup(E, u, u).order;
  };
  CHECK(derived_order(symmetric_group(4)) == 12);
  CHECK(derived_order(alternating_group(4)) == 4);
  CHECK(derived_order(dihedral_group(4)) == 2);
  CHECK(derived_order(quaternion_group()) == 2);
  CHECK(derived_order(special_linear_2(3)) == 8);
  CHECK(derived_order(alternating_group(5)) == 60);
}

TEST_CASE("generator-route commutator equals the elementwise oracle") {
  for (const char* name : {"S4", "A4", "D4", "D6", "Q8", "SL2_3", "C12", "S3xS3", "C3wrC3"}) {
    auto E = enumerate(group_by_name(name));
    auto u = full_subgroup(E);
    INFO(name);
    CHECK(commutator_subgroup(E, u, u).mask == commutator_subgroup_brute(E, u, u).mask);
    // and against a proper normal pair: derived subgroup with the whole group
    auto d = commutator_subgroup(E, u, u);
    if (d.order > 1)
      CHECK(commutator_subgroup(E, d, u).mask == commutator_subgroup_brute(E, d, u).mask);
  }
}

TEST_CASE("commutator of a non-normalizing pair is rejected") {
  auto E = enumerate(symmetric_group(4));
  auto a = sub_of(E, {Permutation::from_cycles(4, {{0, 1}})});
  auto b = sub_of(E, {Permutation::from_cycles(4, {{1, 2}})});
  CHECK_THROWS_AS(commutator_subgroup(E, a, b), error);
}

TEST_CASE("lower central series") {
  auto series_orders = [](const PermGroup& g) {
    auto E = enumerate(g);
    std::vector<uint64_t> o;
    for (const auto& s : lower_central_series(E, full_subgroup(E))) o.push_back(s.order);
    return o;
  };
  CHECK(series_orders(dihedral_group(4)) == std::vector<uint64_t>{8, 2, 1});
  CHECK(series_orders(quaternion_group()) == std::vector<uint64_t>{8, 2, 1});
  CHECK(series_orders(symmetric_group(4)) == std::vector<uint64_t>{24, 12});
  CHECK(series_orders(cyclic_group(12)) == std::vector<uint64_t>{12, 1});
  // C3 wr C3 is a 3-group of class 3
  CHECK(series_orders(wreath_imprimitive(cyclic_group(3), cyclic_group(3))) ==
        std::vector<uint64_t>{81, 9, 3, 1});
}

TEST_CASE("nilpotency detection") {
  auto nil = [](const PermGroup& g) {
    auto E = enumerate(g);
    return is_nilpotent(E, full_subgroup(E));
  };
  CHECK(nil(dihedral_group(4)));
  CHECK(nil(quaternion_group()));
  CHECK(nil(cyclic_group(12)));
  CHECK_FALSE(nil(symmetric_group(3)));
  CHECK_FALSE(nil(alternating_group(4)));
}

TEST_CASE("iterated commutators pin down the action on a minimal normal subgroup") {
  auto E = enumerate(alternating_group(4));
  auto u = full_subgroup(E);
  auto v4 = sub_of(E, {Permutation::from_cycles(4, {{0, 1}, {2, 3}}),
                       Permutation::from_cycles(4, {{0, 2}, {1, 3}})});
  CHECK(iterated_commutator(E, v4, u, 0).mask == v4.mask);
  CHECK(iterated_commutator(E, v4, u, 1).mask == v4.mask);  // [V4, A4] = V4
  CHECK(iterated_commutator(E, v4, u, 3).mask == v4.mask);
}

TEST_CASE("normal subgroup lattice matches the exhaustive scan") {
  for (const char* name :
       {"S3", "S4", "A4", "A5", "D4", "D6", "Q8", "SL2_3", "SL2_5", "PSL2_7", "C12", "S3xS3",
        "C3wrC3"}) {
    auto E = enumerate(group_by_name(name));
    auto u = full_subgroup(E);
    auto fast = normal_subgroups(E, u);
    auto slow = normal_subgroups_by_scan(E, u);
    INFO(name);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i].mask == slow[i].mask);
  }
}

TEST_CASE("normal lattice sizes of the classics") {
  auto count = [](const PermGroup& g) {
    auto E = enumerate(g);
    return normal_subgroups(E, full_subgroup(E)).size();
  };
  CHECK(count(symmetric_group(4)) == 4);   // 1, V4, A4, S4
  CHECK(count(alternating_group(4)) == 3);
  CHECK(count(alternating_group(5)) == 2);
  CHECK(count(dihedral_group(4)) == 6);
  CHECK(count(quaternion_group()) == 6);
  CHECK(count(special_linear_2(3)) == 4);  // 1, Z, Q8, SL2(3)
}

TEST_CASE("full subgroup scan hits the known counts") {
  auto count = [](const PermGroup& g) {
    auto E = enumerate(g);
    return all_subgroups(E, full_subgroup(E)).size();
  };
  CHECK(count(symmetric_group(3)) == 6);
  CHECK(count(symmetric_group(4)) == 30);
  CHECK(count(alternating_group(4)) == 10);
  CHECK(count(dihedral_group(4)) == 10);
  CHECK(count(quaternion_group()) == 6);
  CHECK(count(cyclic_group(12)) == 6);
  CHECK(count(special_linear_2(3)) == 15);
  CHECK(count(alternating_group(5)) == 59);
}

TEST_CASE("chief factors of S4") {
  auto E = enumerate(symmetric_group(4));
  auto cf = chief_factors(E, full_subgroup(E));
  // 1 < V4 < A4 < S4 is the unique chief series
  REQUIRE(cf.size() == 3);
  std::vector<std::pair<uint64_t, uint64_t>> orders;
  for (const auto& [k, l] : cf) orders.emplace_back(k.order, l.order);
  std::sort(orders.begin(), orders.end());
  CHECK(orders == std::vector<std::pair<uint64_t, uint64_t>>{{4, 1}, {12, 4}, {24, 12}});
}

TEST_CASE("invariant subgroup enumeration") {
  auto E = enumerate(alternating_group(4));
  auto u = full_subgroup(E);
  auto v4 = sub_of(E, {Permutation::from_cycles(4, {{0, 1}, {2, 3}}),
                       Permutation::from_cycles(4, {{0, 2}, {1, 3}})});
  // under the full A4-action only 1 and V4 survive; under V4 itself all five
  CHECK(invariant_subgroups(E, u.gens, v4).size() == 2);
  CHECK(invariant_subgroups(E, v4.gens, v4).size() == 5);
}

TEST_CASE("melnikov subgroups of the classics") {
  auto mel_order = [](const PermGroup& g) {
    auto E = enumerate(g);
    return melnikov(E, full_subgroup(E)).order;
  };
  CHECK(mel_order(symmetric_group(4)) == 12);  // unique maximal normal A4
  CHECK(mel_order(quaternion_group()) == 2);   // <i>,<j>,<k> intersect in the centre
  CHECK(mel_order(dihedral_group(4)) == 2);
  CHECK(mel_order(alternating_group(5)) == 1);
  CHECK(mel_order(cyclic_group(4)) == 2);
  CHECK(mel_order(cyclic_group(6)) == 1);
  CHECK_THROWS_AS(melnikov(enumerate(cyclic_group(1)), full_subgroup(enumerate(cyclic_group(1)))),
                  error);
}

TEST_CASE("narrowness: unique maximal invariant subgroup") {
  auto E = enumerate(symmetric_group(4));
  auto u = full_subgroup(E);
  auto v4 = sub_of(E, {Permutation::from_cycles(4, {{0, 1}, {2, 3}}),
                       Permutation::from_cycles(4, {{0, 2}, {1, 3}})});
  auto a4 = sub_of(E, {Permutation::from_cycles(4, {{0, 1, 2}}),
                       Permutation::from_cycles(4, {{0, 1}, {2, 3}})});
  CHECK(is_narrow(E, u, v4));  // minimal normal subgroups are narrow
  CHECK(is_narrow(E, u, a4));  // its only maximal S4-invariant subgroup is V4
  CHECK(melnikov_rel(E, u, a4).mask == v4.mask);
  CHECK_FALSE(is_narrow(E, u, trivial_subgroup(E)));

  // A3 x A3 in S3 x S3 has two maximal invariant subgroups, so it is not narrow
  auto E2 = enumerate(group_by_name("S3xS3"));
  auto u2 = full_subgroup(E2);
  auto a3a3 = sub_of(E2, {Permutation::from_cycles(6, {{0, 1, 2}}),
                          Permutation::from_cycles(6, {{3, 4, 5}})});
  CHECK_FALSE(is_narrow(E2, u2, a3a3));
  CHECK(melnikov_rel(E2, u2, a3a3).order == 1);
}

TEST_CASE("inclusion against the relative melnikov subgroup is equivalent to plain inclusion") {
  // For normal K, L: K <= L * M_U(K) holds exactly when K <= L.
  for (const char* name : {"S4", "A4", "D4", "D6", "Q8", "SL2_3", "C12", "S3xS3", "C3wrC3"}) {
    auto E = enumerate(group_by_name(name));
    auto u = full_subgroup(E);
    auto lattice = normal_subgroups(E, u);
    INFO(name);
    for (const auto& k : lattice) {
      if (k.order == 1) continue;
      for (const auto& l : lattice) {
        auto r = mel_inclusion_check(E, u, k, l);
        CHECK(r.k_in_l_times_mel == r.k_in_l);
      }
    }
  }
}

TEST_CASE("a narrow witness sits above every chief factor") {
  for (const char* name : {"S4", "A4", "D4", "Q8", "SL2_3", "S3xS3"}) {
    auto E = enumerate(group_by_name(name));
    auto u = full_subgroup(E);
    INFO(name);
    for (const auto& [k, l] : chief_factors(E, u)) {
      auto w = narrow_above_chief(E, u, k, l);
      CHECK(w.narrow.subset_of(k));
      CHECK_FALSE(w.narrow.subset_of(l));
      CHECK(is_narrow(E, u, w.narrow));
      CHECK(intersection(E, w.narrow, l).mask == w.melnikov_rel_a.mask);
    }
  }
}

TEST_CASE("fitting subgroups") {
  auto fit_order = [](const PermGroup& g) {
    auto E = enumerate(g);
    return fitting_subgroup(E, full_subgroup(E)).order;
  };
  CHECK(fit_order(symmetric_group(4)) == 4);
  CHECK(fit_order(alternating_group(4)) == 4);
  CHECK(fit_order(dihedral_group(4)) == 8);
  CHECK(fit_order(alternating_group(5)) == 1);
  CHECK(fit_order(special_linear_2(3)) == 8);
  CHECK(fit_order(group_by_name("S3xS3")) == 9);
  CHECK(fit_order(symmetric_group(5)) == 1);
}

TEST_CASE("basal subgroup recovery from a wreath factor") {
  auto E = Enumerated<PermGroup>(group_by_name("A5wrC2"));
  auto u = full_subgroup(E);
  // the first A5 factor of the base
  auto k = sub_of(E, {Permutation::from_cycles(10, {{0, 1, 2}}),
                      Permutation::from_cycles(10, {{0, 1, 2, 3, 4}})});
  REQUIRE(k.order == 60);
  auto r = reid_basal(E, u, k);
  CHECK(r.basal.mask == k.mask);
  CHECK(r.conjugates.size() == 2);
  CHECK(r.product.order == 3600);

  // the full base is normal, so it is basal with a single conjugate
  auto base = sub_of(E, {Permutation::from_cycles(10, {{0, 1, 2}}),
                         Permutation::from_cycles(10, {{0, 1, 2, 3, 4}}),
                         Permutation::from_cycles(10, {{5, 6, 7}}),
                         Permutation::from_cycles(10, {{5, 6, 7, 8, 9}})});
  auto rb = reid_basal(E, u, base);
  CHECK(rb.conjugates.size() == 1);
  CHECK(rb.product.mask == base.mask);
}

TEST_CASE("basal preconditions are enforced") {
  auto E = enumerate(group_by_name("S3xS3"));
  auto u = full_subgroup(E);
  auto a3 = sub_of(E, {Permutation::from_cycles(6, {{0, 1, 2}})});
  // S3 x S3 has nontrivial Fitting subgroup
  CHECK_THROWS_AS(reid_basal(E, u, a3), error);

  auto E5 = enumerate(alternating_group(5));
  // a C3 is not normal in its normal closure (which is all of A5)
  auto c3 = sub_of(E5, {Permutation::from_cycles(5, {{0, 1, 2}})});
  CHECK_THROWS_AS(reid_basal(E5, full_subgroup(E5), c3), error);
}

TEST_CASE("quotient groups through canonical coset representatives") {
  auto E = std::make_shared<const Enumerated<PermGroup>>(symmetric_group(4));
  auto u = full_subgroup(*E);
  auto v4 = sub_of(*E, {Permutation::from_cycles(4, {{0, 1}, {2, 3}}),
                        Permutation::from_cycles(4, {{0, 2}, {1, 3}})});
  auto a4 = sub_of(*E, {Permutation::from_cycles(4, {{0, 1, 2}}),
                        Permutation::from_cycles(4, {{0, 1}, {2, 3}})});

  QuotientBackend<PermGroup> q(E, u, v4);
  auto EQ = Enumerated<QuotientBackend<PermGroup>>(q);
  CHECK(EQ.size() == 6);
  // S4/V4 is S3: non-abelian, so some pair of generators must not commute
  auto g = EQ.generator_indices();
  bool commutes = true;
  for (uint32_t a : g)
    for (uint32_t b : g)
      if (EQ.mul(a, b) != EQ.mul(b, a)) commutes = false;
  CHECK_FALSE(commutes);

  QuotientBackend<PermGroup> q2(E, u, a4);
  CHECK(Enumerated<QuotientBackend<PermGroup>>(q2).size() == 2);

  // Q8 over its centre is elementary abelian of order 4
  auto EQ8 = std::make_shared<const Enumerated<PermGroup>>(quaternion_group());
  auto uq = full_subgroup(*EQ8);
  auto z = melnikov(*EQ8, uq);
  QuotientBackend<PermGroup> q3(EQ8, uq, z);
  auto EZ = Enumerated<QuotientBackend<PermGroup>>(q3);
  REQUIRE(EZ.size() == 4);
  for (uint32_t i = 0; i < EZ.size(); ++i) CHECK(EZ.mul(i, i) == EZ.identity_index());
}

TEST_CASE("quotient by a non-normal subgroup is rejected") {
  auto E = std::make_shared<const Enumerated<PermGroup>>(symmetric_group(4));
  auto u = full_subgroup(*E);
  auto c2 = sub_of(*E, {Permutation::from_cycles(4, {{0, 1}})});
  CHECK_THROWS_AS((QuotientBackend<PermGroup>(E, u, c2)), error);
}

TEST_CASE("homomorphisms are verified, not assumed") {
  auto E = enumerate(symmetric_group(4));
  auto C2 = enumerate(cyclic_group(2));
  uint32_t flip = 1 - C2.identity_index();

  // the sign map: both S4 generators here (a transposition, a 4-cycle) are odd
  auto h = build_homomorphism(E, C2, {flip, flip});
  REQUIRE(h.well_defined);
  CHECK(kernel_of(E, C2, h).order == 12);
  CHECK(is_surjective(E, C2, h));

  // sending the 4-cycle to the identity is not
  auto bad = build_homomorphism(E, C2, {flip, C2.identity_index()});
  CHECK_FALSE(bad.well_defined);
}

TEST_CASE("subgroup helpers") {
  auto E = enumerate(symmetric_group(4));
  auto u = full_subgroup(E);
  auto a4 = sub_of(E, {Permutation::from_cycles(4, {{0, 1, 2}}),
                       Permutation::from_cycles(4, {{0, 1}, {2, 3}})});
  CHECK(join(E, a4, a4).mask == a4.mask);
  CHECK(intersection(E, a4, u).mask == a4.mask);
  // masks that are not closed are rejected
  Bitset open_mask(E.size());
  open_mask.set(E.identity_index());
  open_mask.set(E.index_of(Permutation::from_cycles(4, {{0, 1, 2}})));
  CHECK_THROWS_AS(subgroup_from_elements(E, open_mask), error);

  auto big = sub_of(E, {Permutation::from_cycles(4, {{0, 1}}),
                        Permutation::from_cycles(4, {{0, 1, 2, 3}}),
                        Permutation::from_cycles(4, {{0, 1, 2}}),
                        Permutation::from_cycles(4, {{2, 3}})});
  auto slim = big;
  shrink_generators(E, slim);
  CHECK(slim.mask == big.mask);
  CHECK(closure(E, slim.gens).mask == big.mask);
  CHECK(slim.gens.size() <= 2);
}

TEST_CASE("upward subgroup scan finds every overgroup") {
  auto E = enumerate(symmetric_group(4));
  auto u = full_subgroup(E);
  auto c2 = sub_of(E, {Permutation::from_cycles(4, {{0, 1}, {2, 3}})});
  auto ups = subgroups_containing(E, u, c2);
  // cross-check against filtering the full scan
  std::size_t expect = 0;
  for (const auto& s : all_subgroups(E, u))
    if (c2.subset_of(s)) ++expect;
  CHECK(ups.size() == expect);
  for (const auto& s : ups) CHECK(c2.subset_of(s));
}

TEST_CASE("relative Melnikov subgroups pass to quotients") {
  // with L normal and contained in M_G(K), the Melnikov subgroup of K/L in
  // G/L is exactly M_G(K)/L
  for (const char* name : {"S4", "D4", "Q8", "A4", "SL2_3", "C12", "S3xS3"}) {
    auto sp = std::make_shared<Enumerated<PermGroup>>(group_by_name(name));
    Subgroup whole = full_subgroup(*sp);
    auto lattice = normal_subgroups(*sp, whole);
    for (const auto& k : lattice) {
      if (k.order == 1) continue;
      Subgroup m = melnikov_rel(*sp, whole, k);
      for (const auto& l : lattice) {
        if (!l.mask.subset_of(m.mask)) continue;
        using QB = QuotientBackend<PermGroup>;
        QB qb(sp, whole, l);
        Enumerated<QB> Eq(qb);
        auto project = [&](const Subgroup& s) {
          Bitset mask(Eq.size());
          for (uint32_t x : s.elements()) mask.set(Eq.index_of(qb.project(x)));
          return subgroup_from_elements(Eq, mask);
        };
        Subgroup kq = project(k);
        REQUIRE(kq.order > 1);  // guaranteed by L <= M < K
        CHECK(melnikov_rel(Eq, full_subgroup(Eq), kq) == project(m));
      }
    }
  }
}

TEST_CASE("iterated commutators collapse onto the class bound") {
  // with gamma_{c+1}(N) trivial, K normal, and L the join of K and N:
  // [N,2c L] <= [N,c+1 K] <= gamma_{c+1}(K) <= gamma_{c+1}(L)
  for (const char* name : {"S4", "D4", "Q8", "SL2_3", "A4", "S3xS3", "C3wrC3", "D6"}) {
    auto E = enumerate(group_by_name(name));
    Subgroup whole = full_subgroup(E);
    auto lattice = normal_subgroups(E, whole);
    for (const auto& n : lattice) {
      auto series = lower_central_series(E, n);
      if (series.back().order != 1) continue;
      uint32_t c = static_cast<uint32_t>(series.size()) - 1;
      for (const auto& k : lattice) {
        Subgroup l = join(E, k, n);
        Subgroup gk = gamma(E, k, c);
        Subgroup gl = gamma(E, l, c);
        Subgroup mid = iterated_commutator(E, n, k, c + 1);
        Subgroup lhs = iterated_commutator(E, n, l, 2 * c);
        CHECK(lhs.mask.subset_of(mid.mask));
        CHECK(mid.mask.subset_of(gk.mask));
        CHECK(gk.mask.subset_of(gl.mask));
      }
    }
  }
}

TEST_CASE("commutation with the whole group descends into the gamma value") {
  // with gamma_{c+1}(N) trivial, [N,i G] lies in gamma_{c+1}(G) for every
  // i >= c and the terms descend as i grows
  for (const char* name : {"S4", "D4", "Q8", "SL2_3", "A4", "S3xS3", "C3wrC3"}) {
    auto E = enumerate(group_by_name(name));
    Subgroup whole = full_subgroup(E);
    for (const auto& n : normal_subgroups(E, whole)) {
      auto series = lower_central_series(E, n);
      if (series.back().order != 1) continue;
      uint32_t c = static_cast<uint32_t>(series.size()) - 1;
      Subgroup bound = gamma(E, whole, c);
      Subgroup prev = iterated_commutator(E, n, whole, c);
      CHECK(prev.mask.subset_of(bound.mask));
      for (uint32_t i = c + 1; i <= c + 3; ++i) {
        Subgroup cur = commutator_subgroup(E, prev, whole);
        CHECK(cur.mask.subset_of(bound.mask));
        CHECK(cur.mask.subset_of(prev.mask));
        prev = std::move(cur);
      }
    }
  }
}
