#include "forge/truestage.hpp"

#include "doctest.h"
#include "forge/backforth.hpp"

using namespace forge;

namespace {
// the revelation family: nabla^1 = <1> revealed at stage 3
ApproximationFamily revelation_family() {
  return make_family(
      Ordinal::nat(1), 6, {Ordinal::nat(0), Ordinal::nat(1)},
      {{"1", {{}, {}, {}, {1}, {1}, {1}, {1}}}}, {{"1", {1}}, {"0", {}}});
}

// eta = 2, level 2 guesses <0> at stages 1..2 and the truth <1> from 3 on;
// the level-1 row grows strictly so that leq_0 stays the standard order
ApproximationFamily single_flip_family() {
  return make_family(
      Ordinal::nat(2), 6,
      {Ordinal::nat(0), Ordinal::nat(1), Ordinal::nat(2)},
      {{"1",
        {{},
         {0},
         {0, 1},
         {0, 1, 0},
         {0, 1, 0, 1},
         {0, 1, 0, 1, 0},
         {0, 1, 0, 1, 0, 1}}},
       {"2", {{}, {0}, {0}, {1}, {1}, {1}, {1}}}},
      {{"0", {}}, {"1", {0, 1, 0, 1, 0, 1, 0}}, {"2", {1}}});
}
}  // namespace

TEST_CASE("nstring parse and print") {
  CHECK(nstring_to_string({}) == "-");
  CHECK(nstring_to_string({0, 1, 1}) == "011");
  CHECK(nstring_to_string({0, 7}) == "#0,7");
  CHECK(nstring_to_string({12}) == "#12");
  CHECK(nstring_parse("011") == NString{0, 1, 1});
  CHECK(nstring_parse("#0,7") == NString{0, 7});
  CHECK(nstring_parse("#12") == NString{12});
  CHECK(nstring_parse("-").empty());
  CHECK(nstring_prefix({0, 1}, {0, 1, 1}));
  CHECK(!nstring_prefix({1}, {0, 1}));
}

TEST_CASE("revelation family: rows empty then the truth") {
  ApproximationFamily f = revelation_family();
  CHECK(f.row(Ordinal::nat(1), 2).empty());
  CHECK(f.row(Ordinal::nat(1), 3) == NString{1});
  CHECK(check_N_properties(f).all_pass());
  // budget=0 family: all strings empty
  ApproximationFamily z =
      make_family(Ordinal::nat(1), 0, {Ordinal::nat(0), Ordinal::nat(1)}, {},
                  {{"1", {1}}});
  CHECK(z.row(Ordinal::nat(1), 0).empty());
  CHECK(check_N_properties(z).items[0].checkable);
}

TEST_CASE("single flip family: true path is {0} plus the tail") {
  ApproximationFamily f = single_flip_family();
  CHECK(check_N_properties(f).all_pass());
  auto path = true_path(f);
  CHECK(path == std::vector<int>{0, 3, 4, 5, 6});
  StageRelations r = derive_relations(f);
  CHECK(check_B_properties(r, f).all_pass());
  // stage 0 is always on the path; wrong stages are excluded
  CHECK(!r.trleq_all(1, 3));
  CHECK(r.trleq_all(3, 5));
}

TEST_CASE("planted N3 violation is caught") {
  // level 2 retracts a nonempty guess that level 1 contradicts
  ApproximationFamily f = make_family(
      Ordinal::nat(2), 3, {Ordinal::nat(0), Ordinal::nat(1), Ordinal::nat(2)},
      {{"1", {{}, {0, 0}, {0}, {0}}},  // level-1 row shrinks while...
       {"2", {{}, {1}, {1}, {1}}}},    // ...level 2 stays put
      {});
  auto rep = check_N_properties(f);
  bool n3_failed = false;
  for (const auto& item : rep.items)
    if (item.property == "N3" && !item.pass) n3_failed = true;
  CHECK(n3_failed);
}

TEST_CASE("simulated families pass the checks across eta") {
  for (const char* eta : {"1", "2", "3", "w*1", "w*1+1"}) {
    for (uint64_t seed : {7ULL, 8ULL}) {
      ApproximationFamily f = simulate_family(Ordinal::parse(eta), 60,
                                              FamilySource::injected_truth,
                                              seed);
      CAPTURE(eta);
      CAPTURE(seed);
      CHECK(check_N_properties(f).all_pass());
      StageRelations r = derive_relations(f);
      auto rep = check_B_properties(r, f);
      INFO(rep.summary());
      CHECK(rep.all_pass());
      // determinism
      ApproximationFamily g = simulate_family(Ordinal::parse(eta), 60,
                                              FamilySource::injected_truth,
                                              seed);
      CHECK(f.to_text() == g.to_text());
    }
  }
  // the machine-pool source too
  ApproximationFamily m = simulate_family(Ordinal::parse("2"), 60,
                                          FamilySource::machine_pool, 11);
  CHECK(check_N_properties(m).all_pass());
  StageRelations mr = derive_relations(m);
  CHECK(check_B_properties(mr, m).all_pass());
}

TEST_CASE("for eta <= w the leq tables equal the trleq tables") {
  for (const char* eta : {"2", "3", "w*1"}) {
    ApproximationFamily f = simulate_family(Ordinal::parse(eta), 50,
                                            FamilySource::injected_truth, 42);
    StageRelations r = derive_relations(f);
    CHECK(r.c_set.empty());
    CHECK(r.leq_xi == r.trleq_xi);
  }
}

TEST_CASE("an eta=w+1 family produces C-triples and divergence") {
  // search a few seeds for a family with a nonempty C-set
  bool found = false;
  for (uint64_t seed = 1; seed <= 30 && !found; ++seed) {
    ApproximationFamily f = simulate_family(Ordinal::parse("w*1+1"), 60,
                                            FamilySource::injected_truth,
                                            seed);
    StageRelations r = derive_relations(f);
    if (r.c_set.empty()) continue;
    found = true;
    CHECK(check_B_properties(r, f).all_pass());
    // divergence: some pair trleq_xi but not leq_xi
    bool diverged = false;
    for (size_t ri = 0; ri < r.reps.size() && !diverged; ++ri)
      for (int s = 0; s <= r.budget && !diverged; ++s)
        for (int t = 0; t <= r.budget && !diverged; ++t)
          if (r.trleq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(t)] &&
              !r.leq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(t)])
            diverged = true;
    CHECK(diverged);
  }
  CHECK(found);
}

TEST_CASE("heights follow the stage support") {
  ApproximationFamily f = single_flip_family();
  CHECK(height_of(f, 0) == Ordinal());       // empty support convention
  CHECK(height_of(f, 3) == Ordinal::nat(1)); // level 1 is the top below eta
}

TEST_CASE("associated stages on the single flip family") {
  ApproximationFamily f = single_flip_family();
  StageRelations r = derive_relations(f);
  // s=1: only stage 0 precedes and 0 trleq 1
  AssociatedStages a1 = associated_stages(r, 1);
  CHECK(a1.t_star == 0);
  CHECK(a1.k() == 0);
  CHECK(a1.stages == std::vector<int>{0});
  // s with s-1 trleq s exits immediately
  AssociatedStages a5 = associated_stages(r, 5);
  CHECK(a5.k() == 0);
  CHECK(a5.t_star == 4);
  // the flip stage: 3 is not trleq-below... stage 3's predecessor is wrong
  AssociatedStages a3 = associated_stages(r, 3);
  CHECK(a3.t_star == 0);
  CHECK(a3.stages.front() == 2);
  // invariants: t* trleq s, s_i leq_{xi_i} s, s_{i+1} leq_{xi_i + 1} s_i
  for (int s = 1; s <= r.budget; ++s) {
    AssociatedStages as = associated_stages(r, s);
    CHECK(r.trleq_all(as.t_star, s));
    for (int i = 0; i < as.k(); ++i) {
      CHECK(r.leq(as.ordinals[static_cast<size_t>(i)],
                  as.stages[static_cast<size_t>(i)], s));
      CHECK(r.leq(as.ordinals[static_cast<size_t>(i)].successor(),
                  as.stages[static_cast<size_t>(i) + 1],
                  as.stages[static_cast<size_t>(i)]));
    }
  }
}

TEST_CASE("family text round trip") {
  ApproximationFamily f = simulate_family(Ordinal::parse("2"), 40,
                                          FamilySource::injected_truth, 5);
  ApproximationFamily g = ApproximationFamily::from_text(f.to_text());
  CHECK(g.to_text() == f.to_text());
  CHECK(g.eta == f.eta);
  CHECK(g.budget == f.budget);
  auto pf = true_path(f);
  auto pg = true_path(g);
  CHECK(pf == pg);
}

TEST_CASE("corrupted truth raises") {
  ApproximationFamily f = simulate_family(Ordinal::parse("2"), 60,
                                          FamilySource::injected_truth, 5);
  int ei = f.level_index(Ordinal::nat(2));
  REQUIRE(ei >= 0);
  REQUIRE(!f.truth[static_cast<size_t>(ei)].empty());
  // flip the first truth bit: every committed guess becomes wrong
  f.truth[static_cast<size_t>(ei)][0] ^= 1;
  CHECK_THROWS_AS(true_path(f), InvariantViolation);
}
