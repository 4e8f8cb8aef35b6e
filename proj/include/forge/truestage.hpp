#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forge/ordinal.hpp"

namespace forge {

// A finite approximation string; entries are small naturals. Correct-stage
// strings are prefixes of the level truth; retracted guesses are single
// stage-tagged entries (>= 2), so distinct wrong guesses never nest.
using NString = std::vector<uint32_t>;

bool nstring_prefix(const NString& a, const NString& b);  // a initial seg of b
std::string nstring_to_string(const NString& s);
NString nstring_parse(const std::string& text);

// Simulated nabla-family: for each stage s <= budget and each level xi in a
// finite support set, a finite string nabla^xi_s, plus optional ground truth
// per level and the base oracle D.
struct ApproximationFamily {
  Ordinal eta;
  int budget = 0;
  std::vector<Ordinal> support;              // sorted, includes eta
  std::map<std::string, int> support_index;  // notation text -> index
  // rows[level index][stage]
  std::vector<std::vector<NString>> rows;
  // ground truth per level (horizon-truncated); empty vector = absent
  std::vector<NString> truth;
  bool has_truth = false;
  NString base_oracle;  // D

  int level_index(const Ordinal& xi) const;  // -1 when not in support
  const NString& row(const Ordinal& xi, int s) const;
  const NString& row(int level_idx, int s) const { return rows[level_idx][s]; }
  // Support levels with nonempty row at stage s.
  std::vector<Ordinal> stage_support(int s) const;

  std::string to_text() const;
  static ApproximationFamily from_text(const std::string& text);
};

enum class FamilySource { injected_truth, machine_pool };

// Generate a family satisfying (N1)-(N3) with ground truth recorded.
// injected_truth draws the correctness schedule directly; machine_pool
// derives it from a pool of step-bounded programs run against the base
// oracle D, levels settling later the higher they sit.
ApproximationFamily simulate_family(const Ordinal& eta, int budget,
                                    FamilySource source, uint64_t seed);

// Hand-built family for tests: explicit rows per (level, stage).
ApproximationFamily make_family(const Ordinal& eta, int budget,
                                const std::vector<Ordinal>& support,
                                const std::map<std::string, std::vector<NString>>& rows,
                                const std::map<std::string, NString>& truth);

struct CheckReport {
  struct Item {
    std::string property;
    bool pass = true;
    bool checkable = true;
    std::string counterexample;
  };
  std::vector<Item> items;
  bool all_pass() const;
  std::string summary() const;
};

// (N1) correct stages infinite-within-budget, nested, union covers the
// explored truth; (N2) per-stage support finite and listed; (N3) the nesting
// implication. N1 is reported not-checkable without ground truth.
CheckReport check_N_properties(const ApproximationFamily& f);

struct CWitness {
  Ordinal lambda;
  int u = 0, v = 0;
  Ordinal gamma;  // gamma_{lambda,v}
};

// Stage relations derived from a family per the displayed definitions:
// s trleq_xi t iff nabla^g_s <= nabla^g_t for all g <= xi+1;
// s trleq t iff that holds for all xi < eta;
// s leq_xi t iff s trleq_xi t and no C-triple with gamma_{lambda,v} < xi
// blocks the pair.
struct StageRelations {
  Ordinal eta;
  int budget = 0;
  std::vector<Ordinal> reps;  // representative levels; relations constant between
  // tables[rep][s][t]
  std::vector<std::vector<std::vector<bool>>> trleq_xi, leq_xi;
  std::vector<std::vector<bool>> trleq;
  std::vector<Ordinal> heights;
  std::vector<CWitness> c_set;

  int rep_index(const Ordinal& xi) const;  // largest rep <= xi
  bool leq(const Ordinal& xi, int s, int t) const;
  bool trleq_at(const Ordinal& xi, int s, int t) const;
  bool trleq_all(int s, int t) const { return trleq[s][t]; }
  const Ordinal& height(int s) const { return heights[s]; }
};

StageRelations derive_relations(const ApproximationFamily& f);

// H(s) = max{ xi < eta : nabla^xi_s nonempty }, 0 on empty support.
Ordinal height_of(const ApproximationFamily& f, int s);

// All s <= budget whose eta-row is an initial segment of the explored truth;
// verified pairwise trleq-increasing. Requires ground truth.
std::vector<int> true_path(const ApproximationFamily& f);

// (B0)-(B10); (B6) and (B10) only when ground truth is present.
CheckReport check_B_properties(const StageRelations& r,
                               const ApproximationFamily& f);

// Def-5.4 associated stages and ordinals for stage s >= 1.
struct AssociatedStages {
  int t_star = 0;                // = stages.back() = s_k
  std::vector<int> stages;       // s_0 = s-1 > s_1 > ... > s_k
  std::vector<Ordinal> ordinals; // xi_0 < xi_1 < ... < xi_{k-1}
  int k() const { return static_cast<int>(stages.size()) - 1; }
};

AssociatedStages associated_stages(const StageRelations& r, int s);

// Relation dump as JSON lines, consumed by `forge verify`.
std::string relations_to_jsonl(const StageRelations& r);

}  // namespace forge
