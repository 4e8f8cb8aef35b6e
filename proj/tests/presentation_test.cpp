#include "forge/presentation.hpp"

#include <set>

#include "doctest.h"

using namespace forge;

TEST_CASE("diagram of the identity omega presentation") {
  Presentation w = Presentation::ordinal_order(Ordinal::omega());
  auto d0 = diagram_at(w, 0);
  CHECK(d0.empty());
  auto d3 = diagram_at(w, 3);
  std::set<Fact> facts(d3.begin(), d3.end());
  CHECK(facts.count(Fact{0, {0, 1}, true}));
  CHECK(facts.count(Fact{0, {0, 2}, true}));
  CHECK(facts.count(Fact{0, {1, 2}, true}));
  CHECK(facts.count(Fact{0, {1, 0}, false}));
  CHECK(!facts.count(Fact{0, {1, 0}, true}));
  // monotone in s
  auto d5 = diagram_at(w, 5);
  std::set<Fact> bigger(d5.begin(), d5.end());
  for (const auto& f : d3) CHECK(bigger.count(f));
}

TEST_CASE("rational enumeration is the fixed Stern-Brocot order") {
  CHECK(rational_at(0) == 0);
  CHECK(rational_at(1) == 1);
  CHECK(rational_at(2) == -1);
  CHECK(rational_at(3) == mpq_class(1, 2));
  CHECK(rational_at(4) == mpq_class(-1, 2));
  CHECK(rational_at(5) == 2);
  // diagram facts among the first 4 enumerated rationals: 0, 1, -1, 1/2
  Presentation q = Presentation::rational_order();
  auto d = diagram_at(q, 4);
  std::set<Fact> facts(d.begin(), d.end());
  CHECK(facts.count(Fact{0, {0, 1}, true}));   // 0 < 1
  CHECK(facts.count(Fact{0, {2, 0}, true}));   // -1 < 0
  CHECK(facts.count(Fact{0, {3, 1}, true}));   // 1/2 < 1
  CHECK(facts.count(Fact{0, {0, 3}, true}));   // 0 < 1/2
}

TEST_CASE("pullback examples") {
  Presentation w = Presentation::ordinal_order(Ordinal::omega());
  PartialMap p;
  p.add(0, 5);
  p.add(1, 2);
  auto facts = pullback(w, p, 1);
  std::set<Fact> fs(facts.begin(), facts.end());
  CHECK(fs.count(Fact{0, {1, 0}, true}));   // b1 < b0
  CHECK(fs.count(Fact{0, {0, 1}, false}));  // not (b0 < b1)
  CHECK(pullback(w, PartialMap{}, 1).empty());

  // rational pullback: order type copied through the map
  Presentation q = Presentation::rational_order();
  PartialMap m;
  m.add(0, 3);  // q3 = 1/2
  m.add(1, 1);  // q1 = 1
  m.add(2, 5);  // q5 = 2
  auto rf = pullback(q, m, 1);
  std::set<Fact> rs(rf.begin(), rf.end());
  CHECK(rs.count(Fact{0, {0, 1}, true}));  // 1/2 < 1
  CHECK(rs.count(Fact{0, {1, 2}, true}));  // 1 < 2
  CHECK(rs.count(Fact{0, {2, 0}, false}));

  // pullback soundness: every fact maps to a fact of the base
  for (const auto& f : rf) {
    Tuple img;
    for (auto b : f.args) img.push_back(*m.apply(b));
    CHECK(q.eval_atom(static_cast<size_t>(f.symbol), img) == f.positive);
  }
}

TEST_CASE("automorphism types") {
  Presentation w = Presentation::ordinal_order(Ordinal::omega());
  CHECK(auto_type_equal(w, {3, 5}, {3, 5}));
  CHECK(!auto_type_equal(w, {3, 5}, {2, 7}));  // omega is rigid

  Presentation q = Presentation::rational_order();
  // two increasing pairs are automorphic by homogeneity: 0 < 1 and 1/2 < 2
  CHECK(auto_type_equal(q, {0, 1}, {3, 5}));
  CHECK(!auto_type_equal(q, {0, 1}, {1, 0}));

  Presentation v = Presentation::rational_vector_space();
  // (x, 2x) is automorphic to (y, 2y) for nonzero x, y
  Elem x = 1;
  VecQ vx = v.element_vector(x);
  REQUIRE(!vx.empty());
  auto two_x = v.find_vector(vec_scale(2, vx), 600);
  REQUIRE(two_x);
  Elem y = 2;
  VecQ vy = v.element_vector(y);
  REQUIRE(!vy.empty());
  auto two_y = v.find_vector(vec_scale(2, vy), 600);
  REQUIRE(two_y);
  CHECK(auto_type_equal(v, {x, *two_x}, {y, *two_y}));
  // zero is not automorphic to a nonzero element
  CHECK(!auto_type_equal(v, {0}, {x}));
  // automorphism equivalence is reflexive/symmetric on samples
  CHECK(auto_type_equal(v, {x, y}, {x, y}));
}

TEST_CASE("ordinal order engine: w*2 interleaves the blocks") {
  Presentation p = Presentation::ordinal_order(Ordinal::parse("w*2"));
  // enumeration starts 0,1,2,w,3,w+1,...
  CHECK(p.element_ordinal(0) == Ordinal::nat(0));
  CHECK(p.element_ordinal(3) == Ordinal::omega());
  CHECK(p.less(0, 3));
  CHECK(p.less(3, 5));  // w < w+1
  CHECK(p.element_for_ordinal(Ordinal::parse("w*1+1")).has_value());
  CHECK(!p.element_for_ordinal(Ordinal::parse("w*2")).has_value());
  // every element below w*2, order respected along the enumeration
  for (Elem e = 0; e < 30; ++e)
    CHECK(p.element_ordinal(e) < Ordinal::parse("w*2"));
}

TEST_CASE("permuted presentations stay isomorphic") {
  Presentation w = Presentation::ordinal_order(Ordinal::omega());
  Presentation pw = w.permuted(13, 50);
  std::set<uint64_t> seen;
  for (Elem e = 0; e < 50; ++e) {
    auto n = pw.element_ordinal(e).as_nat();
    REQUIRE(n);
    CHECK(*n < 50);
    CHECK(seen.insert(*n).second);
  }
  // rigid: automorphic iff equal elements
  CHECK(auto_type_equal(pw, {4, 7}, {4, 7}));
}

TEST_CASE("canonical tuples are length-lex") {
  Presentation w = Presentation::ordinal_order(Ordinal::omega());
  auto ts = canonical_tuples(w, 2, 3);
  REQUIRE(ts.size() == 3 + 9);
  CHECK(ts[0] == Tuple{0});
  CHECK(ts[1] == Tuple{1});
  CHECK(ts[2] == Tuple{2});
  CHECK(ts[3] == Tuple{0, 0});  // first length-2 tuple
  // deterministic: the 10th tuple is pinned
  CHECK(ts[9] == Tuple{2, 0});
}

TEST_CASE("exact rational linear algebra") {
  VecQ a{1, 2};
  VecQ b{2, 4};
  VecQ c{0, 1};
  CHECK(rank_of({a, b}) == 1);
  CHECK(rank_of({a, c}) == 2);
  auto k = relation_kernel({a, b});
  REQUIRE(k.size() == 1);  // 2*a - b = 0, normalized (1, -1/2)
  CHECK(k[0][0] == 1);
  CHECK(k[0][1] == mpq_class(-1, 2));
  CHECK(relation_kernel({a, c}).empty());
}

TEST_CASE("partial map invariants") {
  PartialMap m;
  m.add(0, 4);
  m.add(1, 2);
  CHECK_THROWS_AS(m.add(0, 9), std::invalid_argument);
  CHECK_THROWS_AS(m.add(2, 4), std::invalid_argument);
  CHECK(m.range_tuple() == Tuple{4, 2});
  CHECK(m.prefix(1).range_tuple() == Tuple{4});
  PartialMap big = m;
  big.add(2, 7);
  CHECK(m.prefix_of(big));
  CHECK(!big.prefix_of(m));
}

TEST_CASE("fact text round trip") {
  Signature sig = Signature::for_family(StructureFamily::ordinal_order);
  Fact f{0, {3, 5}, false};
  std::string line = f.to_string(sig);
  CHECK(line == "fact </2 3 5 0");
  CHECK(Fact::parse(line, sig) == f);
}
