#pragma once

#include <optional>
#include <vector>

#include "forge/backforth.hpp"
#include "forge/etasystem.hpp"
#include "forge/presentation.hpp"
#include "forge/truestage.hpp"

namespace forge {

// A c.e. set given by its enumeration schedule: at most one element per
// stage, with a long empty tail so every witness settles within the budget.
struct CeApproximation {
  std::vector<int> target;    // the set C, sorted
  std::vector<int> schedule;  // schedule[s] = element entering at stage s, or -1

  static CeApproximation seeded(const std::vector<int>& c, int budget,
                                uint64_t seed);
  void validate(int budget) const;  // throws on malformed schedules
  // stage at which n is enumerated, or -1
  int enumeration_stage(int n) const;
  bool contains(int n) const;
};

// Theorem-4.6-style jump coding: stage-indexed partial isomorphism f_s,
// distinguished pairs (a_n[s], b_n[s]) with b-blocks of consecutive fresh
// B-constants, and the growing pullback diagram.
struct CodingRun {
  struct PairState {
    Tuple a;      // target tuple in the base structure
    int b_start;  // first B-constant of the block
    int b_len;
  };
  Presentation base;
  Leq0Variant variant = Leq0Variant::full_qf;
  SearchBound bound;
  CeApproximation ce;
  int budget = 0;
  std::vector<PartialMap> f_by_stage;  // f_0..f_budget
  std::vector<std::vector<std::optional<PairState>>> pairs_by_stage;
  std::vector<std::vector<Fact>> diagram_by_stage;  // cumulative

  const PartialMap& final_map() const { return f_by_stage.back(); }
  const std::vector<Fact>& final_diagram() const {
    return diagram_by_stage.back();
  }
};

// Run the construction: on enumeration of n, remap b_n's image with a
// leq0-preserving, automorphism-type-breaking move; on quiet stages extend
// with the least 1-free tuple over the current range and close the range
// downward. Throws SearchExhausted when a freeness search comes up empty.
CodingRun build_jump_coding(const Presentation& a, const CeApproximation& ce,
                            int budget, Leq0Variant v,
                            const SearchBound& bound);

// The limit of f_s on elements settled within the budget, reachable from the
// oracle answers alone. Throws when the oracle disagrees with the schedule.
PartialMap limit_isomorphism(const CodingRun& run,
                             const std::vector<int>& c_oracle);

// Iterative decoding: walk n = 0,1,..., test whether g carries b_n to a
// tuple automorphic (over the prefix) to a_n, advance witness versions past
// the enumeration stage on mismatch. g must be an isomorphism on the
// explored domain (checked).
std::vector<int> decode_ce_set(const CodingRun& run, const PartialMap& g);

// ---------------------------------------------------------------------------
// Lemma-6.1 tuple adjustment

struct AdjustConstraint {
  Tuple u;        // u_i
  Tuple v;        // v_i, alpha_i-free over u_i
  Ordinal alpha;  // alpha_i > beta_i
  Ordinal beta;   // beta_1 >= beta_2 >= ...
};

// Returns y with, for each constraint i: (1) y agrees with x below |u_1|,
// (2) x|_{|u_i|+|v_i|} <=_{beta_i} y|_{|u_i|+|v_i|}, (3) y's i-th block not
// automorphic to u_i v_i. Computed by the inductive proof, skipping blocks
// already non-automorphic.
Tuple tuple_adjust(const Presentation& p, const Tuple& x,
                   const std::vector<AdjustConstraint>& constraints,
                   Leq0Variant v, const SearchBound& bound,
                   bool check_preconditions = true);

// ---------------------------------------------------------------------------
// the main Section-6 system

struct MainState : EtaStateBase {
  PartialMap p;  // fresh constants -> base structure, dom an initial segment
  std::vector<std::pair<Tuple, Tuple>> pairs;  // (a_n, b_n), tuples in A

  std::string id() const override;
};

// Build the eta-system whose states satisfy (L1)-(L5), paths (P1)-(P3),
// restraints compare ran(p) under the back-and-forth relations, E is the
// pullback, and whose extendability witness implements the two claims of
// the extendability lemma plus the fresh-pair step.
EtaSystem main_system(const Presentation& a, const Ordinal& eta,
                      const StageRelations& rels, Leq0Variant v,
                      const SearchBound& bound);

struct MainBuildResult {
  Run run;
  std::vector<Fact> diagram;
  StageRelations rels;
  EtaSystem sys;

  const MainState& state(int s) const;
};

// run_metatheorem over main_system; the diagram is the enumeration union.
MainBuildResult build_main(const Presentation& a, const Ordinal& eta,
                           const ApproximationFamily& f, int budget,
                           Leq0Variant v, const SearchBound& bound);

// Criterion (*): stages j whose pair (a_j, b_j) is carried by f to an
// automorphic image; equals the true path when f extends one.
std::vector<int> decode_true_path(const Presentation& a, const Run& run,
                                  const PartialMap& f, int budget);

// Union of the p_j along a trleq-increasing stage list; errors on non-nested
// maps (the signature of a non-true path).
PartialMap iso_from_true_path(const Run& run, const std::vector<int>& path);

// Validation shared by the decoders: g preserves the pulled-back facts.
void require_isomorphism_on_explored(const Presentation& a,
                                     const PartialMap& structure_map,
                                     const PartialMap& g);

}  // namespace forge
