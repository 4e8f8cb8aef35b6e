#include "forge/ordinal.hpp"

#include "doctest.h"

using namespace forge;

TEST_CASE("cnf comparison") {
  // w*2+3 < w^2
  Ordinal a = Ordinal::parse("w*2+3");
  Ordinal b = Ordinal::parse("w^2*1");
  CHECK(compare(a, b) == Cmp::less);
  CHECK(compare(Ordinal(), Ordinal()) == Cmp::equal);
  // w^2*2+w > w^2*2+1
  CHECK(compare(Ordinal::parse("w^2*2+w*1"), Ordinal::parse("w^2*2+1")) ==
        Cmp::greater);
}

TEST_CASE("classification") {
  CHECK(Ordinal().kind() == Ordinal::Kind::zero);
  Ordinal o = Ordinal::parse("w*1+1");
  CHECK(o.kind() == Ordinal::Kind::successor);
  CHECK(o.predecessor() == Ordinal::omega());
  CHECK(Ordinal::parse("w*3").kind() == Ordinal::Kind::limit);
}

TEST_CASE("successor round trip") {
  for (const char* s : {"0", "5", "w*1", "w^2*3+w*1+4", "w^3*2"}) {
    Ordinal o = Ordinal::parse(s);
    Ordinal succ = o.successor();
    CHECK(succ.kind() == Ordinal::Kind::successor);
    CHECK(succ.predecessor() == o);
    CHECK(compare(o, succ) == Cmp::less);
  }
}

TEST_CASE("fundamental sequences") {
  CHECK(fundamental_sequence(Ordinal::omega(), 5) == Ordinal::nat(5));
  CHECK(fundamental_sequence(Ordinal::parse("w^2*1"), 3) ==
        Ordinal::parse("w*3"));
  CHECK(fundamental_sequence(Ordinal::parse("w*2"), 4) ==
        Ordinal::parse("w*1+4"));
  // strictly increasing with supremum below lambda
  for (const char* s : {"w*1", "w*2", "w^2*1", "w^2*3+w*2", "w^3*1"}) {
    Ordinal lam = Ordinal::parse(s);
    Ordinal prev = fundamental_sequence(lam, 0);
    CHECK(prev < lam);
    for (uint64_t n = 1; n < 6; ++n) {
      Ordinal cur = fundamental_sequence(lam, n);
      CHECK(prev < cur);
      CHECK(cur < lam);
      prev = cur;
    }
  }
  CHECK_THROWS_AS(fundamental_sequence(Ordinal::nat(3), 1),
                  std::invalid_argument);
}

TEST_CASE("ordinals_upto") {
  auto v = ordinals_upto(Ordinal::omega(), 3);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == Ordinal());
  CHECK(v[1] == Ordinal::nat(1));
  CHECK(v[2] == Ordinal::nat(2));
  CHECK(ordinals_upto(Ordinal::parse("w*2"), 0).empty());
  auto w = ordinals_upto(Ordinal::parse("w^2*1"), 4, Ordinal::omega());
  REQUIRE(w.size() == 4);
  CHECK(w[0] == Ordinal::parse("w*1"));
  CHECK(w[3] == Ordinal::parse("w*1+3"));
  // exhausted range
  CHECK(ordinals_upto(Ordinal::nat(3), 10).size() == 3);
}

TEST_CASE("parse and print round trip") {
  for (const char* s :
       {"0", "4", "w*1", "w*2+3", "w^2*3+w*1+4", "w^3*1+w^2*2+7"}) {
    Ordinal o = Ordinal::parse(s);
    CHECK(Ordinal::parse(o.to_string()) == o);
  }
  CHECK(Ordinal::parse("w").to_string() == "w*1");
  CHECK(Ordinal::parse("w^2").to_string() == "w^2*1");
  CHECK_THROWS_AS(Ordinal::parse("1+w"), std::invalid_argument);
  CHECK_THROWS_AS(Ordinal::parse("w^2*"), std::invalid_argument);
  CHECK_THROWS_AS(Ordinal::parse(""), std::invalid_argument);
  // below the default bound w^w the exponents are naturals
  CHECK_THROWS_AS(parse_ordinal_below("w^(w^2*1)*1", Ordinal::omega_omega()),
                  std::invalid_argument);
  CHECK(parse_ordinal_below("w^3*9", Ordinal::omega_omega()) ==
        Ordinal::parse("w^3*9"));
}

TEST_CASE("compare is a total order on generated notations") {
  std::vector<Ordinal> all;
  for (uint64_t e = 0; e < 3; ++e)
    for (uint64_t c = 1; c <= 3; ++c) {
      all.push_back(Ordinal::omega_pow(Ordinal::nat(e), c));
      all.push_back(Ordinal::omega_pow(Ordinal::nat(e), c).successor());
    }
  all.push_back(Ordinal());
  for (const auto& a : all)
    for (const auto& b : all) {
      Cmp ab = compare(a, b), ba = compare(b, a);
      if (ab == Cmp::equal) CHECK(ba == Cmp::equal);
      if (ab == Cmp::less) CHECK(ba == Cmp::greater);
      for (const auto& c : all) {
        if (compare(a, b) != Cmp::greater && compare(b, c) != Cmp::greater)
          CHECK(compare(a, c) != Cmp::greater);
      }
    }
}
