#include "forge/constructions.hpp"

#include <set>

#include "doctest.h"

using namespace forge;

namespace {
const Leq0Variant kV = Leq0Variant::full_qf;
SearchBound cbnd() { return SearchBound::construction(); }

Presentation omega() { return Presentation::ordinal_order(Ordinal::omega()); }

PartialMap compose_with_automorphism(const CodingRun& run) {
  // B is a copy of omega here, so the explored part is rigid; the only
  // automorphism-precomposed variant is the map itself
  return run.final_map();
}
}  // namespace

TEST_CASE("ce schedules are valid and deterministic") {
  CeApproximation ce = CeApproximation::seeded({2, 5, 9}, 100, 11);
  CHECK(ce.target == std::vector<int>{2, 5, 9});
  ce.validate(100);
  CeApproximation ce2 = CeApproximation::seeded({2, 5, 9}, 100, 11);
  CHECK(ce.schedule == ce2.schedule);
  CHECK(ce.enumeration_stage(5) > 0);
  CHECK(ce.enumeration_stage(4) == -1);
  CHECK_THROWS_AS(CeApproximation::seeded({0, 1, 2, 3}, 8, 1),
                  std::invalid_argument);
}

TEST_CASE("empty set gives a straight copy construction") {
  CeApproximation ce = CeApproximation::seeded({}, 60, 1);
  CodingRun run = build_jump_coding(omega(), ce, 60, kV, cbnd());
  // f is injective and total on an initial segment in the limit
  const PartialMap& f = run.final_map();
  CHECK(f.size() >= 30);
  // every pair stays on the automorphic side
  const auto& pairs = run.pairs_by_stage.back();
  for (size_t n = 0; n < pairs.size(); ++n) {
    if (!pairs[n]) continue;
    Tuple img;
    for (int i = pairs[n]->b_start; i < pairs[n]->b_start + pairs[n]->b_len;
         ++i)
      img.push_back(*f.apply(i));
    CHECK(img == pairs[n]->a);
  }
  // decode returns the empty set
  CHECK(decode_ce_set(run, limit_isomorphism(run, {})).empty());
}

TEST_CASE("a single enumeration flips exactly one witness") {
  // C = {0} entering at stage 1
  CeApproximation ce;
  ce.target = {0};
  ce.schedule.assign(41, -1);
  ce.schedule[1] = 0;
  CodingRun run = build_jump_coding(omega(), ce, 40, kV, cbnd());
  const PartialMap& f = run.final_map();
  const auto& p0 = run.pairs_by_stage.back()[0];
  REQUIRE(p0);
  Tuple img;
  for (int i = p0->b_start; i < p0->b_start + p0->b_len; ++i)
    img.push_back(*f.apply(i));
  CHECK(img != p0->a);  // knocked off the automorphic side
  auto decoded = decode_ce_set(run, limit_isomorphism(run, {0}));
  CHECK(decoded == std::vector<int>{0});
}

TEST_CASE("diagram monotone and witnesses stabilize") {
  CeApproximation ce = CeApproximation::seeded({0, 3}, 80, 7);
  CodingRun run = build_jump_coding(omega(), ce, 80, kV, cbnd());
  // monotone diagrams (checked again here over the stored stages)
  for (int s = 0; s < 80; ++s) {
    std::set<Fact> now(run.diagram_by_stage[static_cast<size_t>(s)].begin(),
                       run.diagram_by_stage[static_cast<size_t>(s)].end());
    for (const auto& fact : run.diagram_by_stage[static_cast<size_t>(s)])
      CHECK(now.count(fact));
    std::set<Fact> next(
        run.diagram_by_stage[static_cast<size_t>(s) + 1].begin(),
        run.diagram_by_stage[static_cast<size_t>(s) + 1].end());
    for (const auto& fact : now) CHECK(next.count(fact));
  }
  // stabilization: pairs constant after the last enumeration
  int last = 0;
  for (int s = 0; s <= 80; ++s)
    if (run.ce.schedule[static_cast<size_t>(s)] >= 0) last = s;
  for (int s = last; s < 80; ++s) {
    const auto& a = run.pairs_by_stage[static_cast<size_t>(s)];
    const auto& b = run.pairs_by_stage[static_cast<size_t>(s) + 1];
    for (size_t n = 0; n < a.size(); ++n) {
      if (!a[n]) continue;
      REQUIRE(n < b.size());
      REQUIRE(b[n]);
      CHECK(a[n]->a == b[n]->a);
      CHECK(a[n]->b_start == b[n]->b_start);
    }
  }
}

TEST_CASE("jump coding round trip across seeds") {
  for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    std::vector<int> c{1, 4};
    CeApproximation ce = CeApproximation::seeded(c, 70, seed);
    CodingRun run = build_jump_coding(omega(), ce, 70, kV, cbnd());
    PartialMap f = limit_isomorphism(run, c);
    CHECK(decode_ce_set(run, f) == c);
    CHECK(decode_ce_set(run, compose_with_automorphism(run)) == c);
    // the limit map is the stagewise limit elementwise
    for (size_t i = 0; i < f.size(); ++i) {
      Elem last = run.f_by_stage.back().ran_at(i);
      CHECK(f.ran_at(i) == last);
    }
  }
  // wrong oracle is rejected
  CeApproximation ce = CeApproximation::seeded({2}, 60, 4);
  CodingRun run = build_jump_coding(omega(), ce, 60, kV, cbnd());
  CHECK_THROWS_AS(limit_isomorphism(run, {5}), InvariantViolation);
}

TEST_CASE("tuple_adjust: empty constraints and skip branch") {
  Presentation w2 = Presentation::ordinal_order(Ordinal::parse("w^2*1"));
  Tuple x{0, 1, 2};
  CHECK(tuple_adjust(w2, x, {}, kV, cbnd()) == x);
  // a block already non-automorphic to the reference is left alone
  Presentation w = omega();
  Tuple base_u{0};
  Tuple base_v = find_free_tuple(w, base_u, Ordinal::nat(1), kV, cbnd());
  Tuple y = concat(base_u, base_v);
  // make x differ from (u, v) in the block already
  Tuple x2 = y;
  x2.back() = static_cast<Elem>(x2.back() + 1);
  std::vector<AdjustConstraint> cs{
      {base_u, base_v, Ordinal::nat(1), Ordinal()}};
  CHECK(tuple_adjust(w, x2, cs, kV, cbnd(), false) == x2);
}

TEST_CASE("tuple_adjust posts on omega^2") {
  Presentation w2 = Presentation::ordinal_order(Ordinal::parse("w^2*1"));
  // one constraint with alpha = 1, beta = 0
  Tuple u{0};
  Tuple v = find_free_tuple(w2, u, Ordinal::nat(1), kV, cbnd());
  Tuple x = concat(u, v);
  std::vector<AdjustConstraint> cs{{u, v, Ordinal::nat(1), Ordinal()}};
  Tuple y = tuple_adjust(w2, x, cs, kV, cbnd());
  REQUIRE(y.size() == x.size());
  // (1) prefix preserved
  CHECK(Tuple(y.begin(), y.begin() + 1) == u);
  // (2) x <=_beta y blockwise
  CHECK(leq_beta(w2, x, y, Ordinal(), kV, cbnd()) != Tri::no);
  // (3) block not automorphic to (u, v)
  CHECK(!auto_type_equal(w2, y, concat(u, v)));
}

TEST_CASE("main system over omega at eta=1 is a straight copy") {
  ApproximationFamily fam = simulate_family(Ordinal::nat(1), 30,
                                            FamilySource::injected_truth, 3);
  MainBuildResult res =
      build_main(omega(), Ordinal::nat(1), fam, 30, kV, cbnd());
  CHECK(res.run.states.size() == 31);
  // heights are all zero, so every pair block is a single fresh element and
  // the map enumerates an initial segment of omega
  const MainState& last = res.state(30);
  CHECK(last.p.size() >= 30);
  // B isomorphic to the explored omega-segment: order facts match positions
  for (size_t i = 0; i < 10; ++i)
    for (size_t j = 0; j < 10; ++j) {
      bool b_less = false;
      for (const auto& f : res.diagram)
        if (f.symbol == 0 && f.args.size() == 2 &&
            f.args[0] == static_cast<int32_t>(i) &&
            f.args[1] == static_cast<int32_t>(j) && f.positive)
          b_less = true;
      Elem ei = *last.p.apply(static_cast<int32_t>(i));
      Elem ej = *last.p.apply(static_cast<int32_t>(j));
      CHECK(b_less == omega().less(ei, ej));
    }
}

TEST_CASE("main system over w*2 at eta=2 passes all checks") {
  ApproximationFamily fam = simulate_family(Ordinal::nat(2), 24,
                                            FamilySource::injected_truth, 5);
  Presentation w2 = Presentation::ordinal_order(Ordinal::parse("w*2"));
  MainBuildResult res =
      build_main(w2, Ordinal::nat(2), fam, 24, kV, cbnd());
  ZeroRunCheck zc = check_zero_run(res.sys, res.rels, res.run);
  CHECK(zc.ok);
  // decode round trip along the ground-truth path
  std::vector<int> path = true_path(fam);
  std::vector<int> within;
  for (int s : path)
    if (s <= 24) within.push_back(s);
  PartialMap iso = iso_from_true_path(res.run, within);
  std::vector<int> decoded = decode_true_path(w2, res.run, iso, 24);
  CHECK(decoded == within);
  // a fake path through a non-true stage has non-nested maps
  std::vector<int> fake = within;
  bool have_fake = false;
  for (int s = 1; s <= 24 && !have_fake; ++s)
    if (std::find(within.begin(), within.end(), s) == within.end()) {
      fake.push_back(s);
      std::sort(fake.begin(), fake.end());
      have_fake = true;
    }
  if (have_fake)
    CHECK_THROWS_AS(iso_from_true_path(res.run, fake), InvariantViolation);
}

TEST_CASE("planted state violations are rejected by the tests") {
  ApproximationFamily fam = simulate_family(Ordinal::nat(1), 10,
                                            FamilySource::injected_truth, 3);
  StageRelations rels = derive_relations(fam);
  EtaSystem sys = main_system(omega(), Ordinal::nat(1), rels, kV, cbnd());
  Run run = run_metatheorem(sys, rels, 10);
  // (L3) violation: a state whose map is shorter than its pairs claim
  auto good = std::dynamic_pointer_cast<const MainState>(run.states[4]);
  REQUIRE(good);
  auto bad = std::make_shared<MainState>(*good);
  bad->pairs.back().second.push_back(99);
  CHECK(!sys.in_state_set(bad));
  // (P2) violation: swap in a state whose prefix breaks the automorphism
  // condition for a trleq-related index
  RunSeq seq(run.states.begin(), run.states.begin() + 5);
  auto tampered = std::make_shared<MainState>(*good);
  PartialMap moved;
  for (size_t i = 0; i < good->p.size(); ++i)
    moved.add(good->p.dom_at(i), good->p.ran_at(i) + 100);
  tampered->p = moved;
  seq[4] = tampered;
  CHECK(!sys.in_action_tree(seq));
}

TEST_CASE("budget 1 gives a one-state run") {
  ApproximationFamily fam = simulate_family(Ordinal::nat(1), 1,
                                            FamilySource::injected_truth, 3);
  MainBuildResult res = build_main(omega(), Ordinal::nat(1), fam, 1, kV,
                                   cbnd());
  CHECK(res.run.states.size() == 2);
  CHECK(!res.diagram.empty());
}
