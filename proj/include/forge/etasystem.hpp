#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "forge/presentation.hpp"
#include "forge/truestage.hpp"

namespace forge {

// Opaque system state. Concrete systems derive from this; the runner only
// touches states through the system's declared tests.
struct EtaStateBase {
  virtual ~EtaStateBase() = default;
  virtual std::string id() const = 0;
  virtual std::string to_json() const { return "{\"state\":\"" + id() + "\"}"; }
};

using StatePtr = std::shared_ptr<const EtaStateBase>;
using RunSeq = std::vector<StatePtr>;

// Def-5.3-style eta-system: states, action tree, restraint relations, the
// derived trleq test (supplied separately, since for limit eta the
// conjunction over xi < eta is not finitely checkable), the enumeration
// function, and a constructive extendability witness. The runner re-verifies
// every witness, so the witness is trusted for progress, never correctness.
struct EtaSystem {
  Ordinal eta;
  std::string name;
  std::function<bool(const StatePtr&)> in_state_set;                  // L
  std::function<bool(const RunSeq&)> in_action_tree;                  // P
  std::function<bool(const Ordinal&, const StatePtr&, const StatePtr&)>
      restraint;                                                      // <=^L_xi
  std::function<bool(const StatePtr&, const StatePtr&)> trleq_state;  // trleq^L
  std::function<std::vector<Fact>(const StatePtr&)> enumerate;        // E
  std::function<StatePtr(const RunSeq&, const AssociatedStages&)>
      extension_witness;
};

struct Run {
  RunSeq states;
  // associated stages per stage (index 0 unused)
  std::vector<AssociatedStages> assoc;
  int budget = 0;
};

struct ZeroRunCheck {
  bool ok = true;
  std::string counterexample;
};

// True iff every prefix is in P and s <=_xi t implies l_s <=^L_xi l_t for all
// s,t < |pi| and every representative xi of R.
ZeroRunCheck check_zero_run(const EtaSystem& sys, const StageRelations& rels,
                            const Run& run);

// Thm-5.6 runner: at each stage compute the associated stages, ask the
// witness for the next state, verify the extendability guarantees
// (pi+l in P, l_{t*} trleq^L l, l_{s_i} <=^L_{xi_i} l), append. Throws
// InvariantViolation with a context dump when the witness cheats.
Run run_metatheorem(const EtaSystem& sys, const StageRelations& rels,
                    int budget);

// E(pi) = union of E(l_s); with ground truth available, verifies that the
// union over true stages alone already equals the full union.
std::vector<Fact> enumeration_union(const EtaSystem& sys, const Run& run,
                                    const ApproximationFamily* truth_family);

// The degenerate one-state system (L = {l}, P everything, E(l) = {}).
EtaSystem one_state_system(const Ordinal& eta);

// Run trace as JSON lines (stage, state id, t*, associated pairs, newly
// appended facts).
std::string run_to_jsonl(const EtaSystem& sys, const Run& run);

}  // namespace forge
