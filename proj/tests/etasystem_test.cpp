#include "forge/etasystem.hpp"

#include "doctest.h"
#include "forge/backforth.hpp"

using namespace forge;

namespace {
StageRelations rels_for(const char* eta, int budget, uint64_t seed) {
  ApproximationFamily f = simulate_family(Ordinal::parse(eta), budget,
                                          FamilySource::injected_truth, seed);
  return derive_relations(f);
}
}  // namespace

TEST_CASE("one-state system runs to any budget") {
  StageRelations r = rels_for("2", 40, 3);
  EtaSystem sys = one_state_system(Ordinal::nat(2));
  Run run = run_metatheorem(sys, r, 40);
  CHECK(run.states.size() == 41);
  ZeroRunCheck zc = check_zero_run(sys, r, run);
  CHECK(zc.ok);
  CHECK(enumeration_union(sys, run, nullptr).empty());
}

TEST_CASE("empty run is a 0-run") {
  StageRelations r = rels_for("2", 10, 3);
  EtaSystem sys = one_state_system(Ordinal::nat(2));
  Run empty;
  CHECK(check_zero_run(sys, r, empty).ok);
}

TEST_CASE("a witness that violates P aborts with context") {
  StageRelations r = rels_for("2", 10, 3);
  EtaSystem sys = one_state_system(Ordinal::nat(2));
  sys.in_action_tree = [](const RunSeq& seq) { return seq.size() < 4; };
  CHECK_THROWS_AS(run_metatheorem(sys, r, 10), InvariantViolation);
}

TEST_CASE("a planted incomparable state fails check_zero_run") {
  StageRelations r = rels_for("2", 12, 3);
  // states are integers; restraints compare payload values
  struct IntState : EtaStateBase {
    int v;
    explicit IntState(int x) : v(x) {}
    std::string id() const override { return std::to_string(v); }
  };
  EtaSystem sys;
  sys.eta = Ordinal::nat(2);
  sys.name = "int-chain";
  sys.in_state_set = [](const StatePtr& s) {
    return dynamic_cast<const IntState*>(s.get()) != nullptr;
  };
  sys.in_action_tree = [](const RunSeq&) { return true; };
  auto val = [](const StatePtr& s) {
    return dynamic_cast<const IntState*>(s.get())->v;
  };
  sys.restraint = [val](const Ordinal&, const StatePtr& a, const StatePtr& b) {
    return val(a) <= val(b);
  };
  sys.trleq_state = [val](const StatePtr& a, const StatePtr& b) {
    return val(a) <= val(b);
  };
  sys.enumerate = [](const StatePtr&) { return std::vector<Fact>{}; };
  sys.extension_witness = [](const RunSeq& pi, const AssociatedStages&) {
    return std::make_shared<IntState>(static_cast<int>(pi.size()));
  };
  Run run = run_metatheorem(sys, r, 12);
  CHECK(check_zero_run(sys, r, run).ok);
  // replace one state by an incomparable one
  run.states[5] = std::make_shared<IntState>(-7);
  ZeroRunCheck zc = check_zero_run(sys, r, run);
  CHECK(!zc.ok);
  CHECK(!zc.counterexample.empty());
}

TEST_CASE("run trace lines are one record per stage") {
  StageRelations r = rels_for("2", 8, 3);
  EtaSystem sys = one_state_system(Ordinal::nat(2));
  Run run = run_metatheorem(sys, r, 8);
  std::string trace = run_to_jsonl(sys, run);
  int lines = 0;
  for (char c : trace)
    if (c == '\n') ++lines;
  CHECK(lines == 9);
  CHECK(trace.find("\"stage\":0") != std::string::npos);
  CHECK(trace.find("\"t_star\"") != std::string::npos);
}
