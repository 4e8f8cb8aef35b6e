#include "forge/scott.hpp"

#include "doctest.h"
#include "forge/backforth.hpp"
#include "forge/rng.hpp"

using namespace forge;

TEST_CASE("omega scott family: element n satisfies phi_n") {
  Presentation w = Presentation::ordinal_order(Ordinal::omega());
  ScottFamily fam = ScottFamily::for_family(StructureFamily::ordinal_order);
  CHECK(fam.index_of(w, {5}, 50) == "pos:5");
  CHECK(fam.satisfies(w, {5}, "pos:5", 50));
  CHECK(!fam.satisfies(w, {4}, "pos:5", 50));
  // uniqueness over the first 50 elements
  std::set<std::string> seen;
  for (Elem e = 0; e < 50; ++e)
    CHECK(seen.insert(fam.index_of(w, {e}, 60)).second);
}

TEST_CASE("S over a permuted presentation counts predecessors") {
  Presentation pw =
      Presentation::ordinal_order(Ordinal::omega()).permuted(13, 40);
  ScottFamily fam = ScottFamily::for_family(StructureFamily::ordinal_order);
  InvariantSet s = compute_S(pw, fam, 40);
  for (const auto& e : s.entries) {
    REQUIRE(e.a.size() == 1);
    auto n = pw.element_ordinal(e.a[0]).as_nat();
    REQUIRE(n);
    CHECK(e.formula == "pos:" + std::to_string(*n));
  }
  CHECK(compute_S(pw, fam, 0).entries.empty());
}

TEST_CASE("automorphism invariance of formula indices") {
  Presentation v = Presentation::rational_vector_space();
  ScottFamily fam =
      ScottFamily::for_family(StructureFamily::rational_vector_space);
  // (x, 2x) and (y, 2y) satisfy the same dependence formula
  VecQ vx = v.element_vector(1);
  auto two_x = v.find_vector(vec_scale(2, vx), 600);
  VecQ vy = v.element_vector(2);
  auto two_y = v.find_vector(vec_scale(2, vy), 600);
  REQUIRE(two_x);
  REQUIRE(two_y);
  CHECK(fam.index_of(v, {1, *two_x}, 600) == fam.index_of(v, {2, *two_y}, 600));
  CHECK(fam.index_of(v, {1, 2}, 600) != fam.index_of(v, {1, *two_x}, 600));
}

TEST_CASE("T membership: witnesses are upward closed in lex order") {
  Presentation w = Presentation::ordinal_order(Ordinal::omega());
  ScottFamily fam = ScottFamily::for_family(StructureFamily::ordinal_order);
  InvariantSet t = compute_T(w, fam, 30);
  const auto* e5 = [&]() -> const InvariantSet::Entry* {
    for (const auto& e : t.entries)
      if (e.a == Tuple{5}) return &e;
    return nullptr;
  }();
  REQUIRE(e5);
  CHECK(e5->witness == Tuple{0, 1, 2, 3, 4});
  CHECK(t.t_contains({5}, {0, 1, 2, 3, 4}, e5->formula));
  CHECK(t.t_contains({5}, {0, 1, 2, 3, 9}, e5->formula));   // lex bigger
  CHECK(!t.t_contains({5}, {0, 1, 2, 3, 3}, e5->formula));  // lex smaller
  CHECK(!t.t_contains({5}, {0, 1, 2, 3, 4}, "pos:6"));      // wrong formula
}

TEST_CASE("S and T reconstruct each other") {
  Presentation w = Presentation::ordinal_order(Ordinal::omega());
  ScottFamily fam = ScottFamily::for_family(StructureFamily::ordinal_order);
  InvariantSet s = compute_S(w, fam, 25);
  InvariantSet t = compute_T(w, fam, 25);
  InvariantSet s2 = S_from_T(t);
  REQUIRE(s.entries.size() == s2.entries.size());
  for (size_t i = 0; i < s.entries.size(); ++i) {
    CHECK(s.entries[i].a == s2.entries[i].a);
    CHECK(s.entries[i].formula == s2.entries[i].formula);
  }
  InvariantSet t2 = T_from_S(s, w, w, fam, 25);
  REQUIRE(t.entries.size() == t2.entries.size());
  for (size_t i = 0; i < t.entries.size(); ++i)
    CHECK(t.entries[i].witness == t2.entries[i].witness);
}

TEST_CASE("iso_from_S equals iso_from_succ on permuted omega") {
  Presentation w = Presentation::ordinal_order(Ordinal::omega());
  Presentation pw = w.permuted(13, 60);
  ScottFamily fam = ScottFamily::for_family(StructureFamily::ordinal_order);
  PartialMap via_s = iso_from_S(w, pw, fam, 40, 60);
  auto succ = succ_relation(pw, 60);
  PartialMap via_succ = iso_from_succ(pw, succ);
  // via_s maps canonical k to the pw element at position k; via_succ is its
  // inverse on the explored part
  for (size_t i = 0; i < via_s.size(); ++i) {
    Elem canonical = via_s.dom_at(i);
    Elem target = via_s.ran_at(i);
    auto back = via_succ.apply(target);
    REQUIRE(back);
    CHECK(*back == canonical);
  }
}

TEST_CASE("succ examples") {
  Presentation w = Presentation::ordinal_order(Ordinal::omega());
  auto succ = succ_relation(w, 10);
  CHECK(std::count(succ.begin(), succ.end(), std::make_pair(Elem(3), Elem(4))) ==
        1);
  PartialMap iso = iso_from_succ(w, succ);
  for (size_t i = 0; i < iso.size(); ++i)
    CHECK(iso.dom_at(i) == iso.ran_at(i));  // identity on the canonical copy
  // bound 1: single point map
  CHECK(iso_from_succ(w, succ_relation(w, 1)).size() <= 1);
}

TEST_CASE("independence, bases, and linear isomorphisms") {
  Presentation v = Presentation::rational_vector_space();
  int window = 220;
  auto indep = indep_relation(v, 24, 2);
  // the standard-like first two independent elements appear
  CHECK(!indep.empty());
  // (x, 2x) is dependent: never in the relation
  auto two = v.find_vector(vec_scale(2, v.element_vector(1)), window);
  REQUIRE(two);
  Tuple dep{1, *two};
  std::sort(dep.begin(), dep.end());
  CHECK(std::find(indep.begin(), indep.end(), dep) == indep.end());

  auto basis = basis_from_indep(v, indep, 24);
  CHECK(basis.size() >= 2);

  Presentation pv = v.permuted(29, window);
  auto indep_p = indep_relation(pv, 24, 2);
  auto basis_p = basis_from_indep(pv, indep_p, 24);
  size_t dim = std::min(basis.size(), basis_p.size());
  std::vector<Elem> bv(basis.begin(), basis.begin() + static_cast<long>(dim));
  std::vector<Elem> bw(basis_p.begin(),
                       basis_p.begin() + static_cast<long>(dim));
  PartialMap iso = iso_from_basis(v, pv, bv, bw, window);
  REQUIRE(iso.size() > 0);
  // linearity on random sums within the explored span
  Rng rng(77);
  int checked = 0;
  for (int t = 0; t < 400 && checked < 20; ++t) {
    Elem x = static_cast<Elem>(rng.below(16));
    Elem y = static_cast<Elem>(rng.below(16));
    auto fx = iso.apply(x);
    auto fy = iso.apply(y);
    if (!fx || !fy) continue;
    auto sum = v.find_vector(
        vec_add(v.element_vector(x), v.element_vector(y)), window);
    if (!sum) continue;
    auto fsum = iso.apply(*sum);
    if (!fsum) continue;
    CHECK(vectors_equal(
        pv.element_vector(*fsum),
        vec_add(pv.element_vector(*fx), pv.element_vector(*fy))));
    ++checked;
  }
  CHECK(checked >= 5);
}
