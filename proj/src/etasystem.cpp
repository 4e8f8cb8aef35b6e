#include "forge/etasystem.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "forge/backforth.hpp"

namespace forge {

ZeroRunCheck check_zero_run(const EtaSystem& sys, const StageRelations& rels,
                            const Run& run) {
  ZeroRunCheck out;
  size_t n = run.states.size();
  for (size_t len = 1; len <= n; ++len) {
    RunSeq prefix(run.states.begin(), run.states.begin() + static_cast<long>(len));
    if (!sys.in_action_tree(prefix)) {
      out.ok = false;
      out.counterexample = "prefix of length " + std::to_string(len) +
                           " not in the action tree";
      return out;
    }
  }
  for (size_t s = 0; s < n; ++s)
    for (size_t t = 0; t < n; ++t)
      for (const auto& xi : rels.reps) {
        if (!rels.leq(xi, static_cast<int>(s), static_cast<int>(t))) continue;
        if (!sys.restraint(xi, run.states[s], run.states[t])) {
          out.ok = false;
          out.counterexample = "stages (" + std::to_string(s) + "," +
                               std::to_string(t) + ") at xi=" + xi.to_string();
          return out;
        }
      }
  return out;
}

Run run_metatheorem(const EtaSystem& sys, const StageRelations& rels,
                    int budget) {
  if (budget > rels.budget)
    throw std::invalid_argument("run_metatheorem: budget exceeds relations");
  Run run;
  run.budget = budget;
  run.assoc.resize(static_cast<size_t>(budget) + 1);
  for (int s = 0; s <= budget; ++s) {
    AssociatedStages as;
    if (s >= 1) as = associated_stages(rels, s);
    run.assoc[static_cast<size_t>(s)] = as;
    StatePtr next = sys.extension_witness(run.states, as);
    std::ostringstream ctx;
    ctx << "system " << sys.name << " stage " << s;
    if (!next)
      throw InvariantViolation(ctx.str() + ": witness returned no state");
    if (!sys.in_state_set(next))
      throw InvariantViolation(ctx.str() + ": witness state not in L: " +
                               next->id());
    if (s >= 1) {
      // l_{t*} trleq^L l and l_{s_i} <=^L_{xi_i} l
      const auto& ts = run.states[static_cast<size_t>(as.t_star)];
      if (!sys.trleq_state(ts, next))
        throw InvariantViolation(ctx.str() +
                                 ": extendability violated: l_{t*} !trleq l");
      for (int i = 0; i < as.k(); ++i) {
        const auto& si = run.states[static_cast<size_t>(as.stages[static_cast<size_t>(i)])];
        if (!sys.restraint(as.ordinals[static_cast<size_t>(i)], si, next))
          throw InvariantViolation(
              ctx.str() + ": extendability violated at s_i=" +
              std::to_string(as.stages[static_cast<size_t>(i)]) +
              " xi_i=" + as.ordinals[static_cast<size_t>(i)].to_string());
      }
    }
    RunSeq extended = run.states;
    extended.push_back(next);
    if (!sys.in_action_tree(extended))
      throw InvariantViolation(ctx.str() + ": pi+l not in the action tree");
    run.states = std::move(extended);
  }
  return run;
}

std::vector<Fact> enumeration_union(const EtaSystem& sys, const Run& run,
                                    const ApproximationFamily* truth_family) {
  std::set<Fact> all;
  for (const auto& st : run.states) {
    auto fs = sys.enumerate(st);
    all.insert(fs.begin(), fs.end());
  }
  if (truth_family && truth_family->has_truth) {
    // horizon reading of E(pi) = union over true stages: the true stages
    // carry everything enumerated up to the last of them (the facts past the
    // final true stage belong to the unexplored tail of the infinite run)
    std::set<Fact> along_true;
    int last_true = 0;
    for (int s : true_path(*truth_family)) {
      if (s >= static_cast<int>(run.states.size())) continue;
      last_true = s;
      auto fs = sys.enumerate(run.states[static_cast<size_t>(s)]);
      along_true.insert(fs.begin(), fs.end());
    }
    std::set<Fact> upto;
    for (int s = 0; s <= last_true; ++s) {
      auto fs = sys.enumerate(run.states[static_cast<size_t>(s)]);
      upto.insert(fs.begin(), fs.end());
    }
    if (along_true != upto)
      throw InvariantViolation(
          "enumeration_union: true stages miss facts enumerated below stage " +
          std::to_string(last_true));
  }
  return std::vector<Fact>(all.begin(), all.end());
}

namespace {
struct UnitState : EtaStateBase {
  std::string id() const override { return "unit"; }
};
}  // namespace

EtaSystem one_state_system(const Ordinal& eta) {
  auto unit = std::make_shared<UnitState>();
  EtaSystem sys;
  sys.eta = eta;
  sys.name = "one-state";
  sys.in_state_set = [](const StatePtr& s) {
    return dynamic_cast<const UnitState*>(s.get()) != nullptr;
  };
  sys.in_action_tree = [](const RunSeq&) { return true; };
  sys.restraint = [](const Ordinal&, const StatePtr&, const StatePtr&) {
    return true;
  };
  sys.trleq_state = [](const StatePtr&, const StatePtr&) { return true; };
  sys.enumerate = [](const StatePtr&) { return std::vector<Fact>{}; };
  sys.extension_witness = [unit](const RunSeq&, const AssociatedStages&) {
    return unit;
  };
  return sys;
}

std::string run_to_jsonl(const EtaSystem& sys, const Run& run) {
  std::ostringstream os;
  std::set<std::string> seen;
  for (size_t s = 0; s < run.states.size(); ++s) {
    const auto& as = run.assoc[s];
    os << "{\"stage\":" << s << ",\"state_id\":\"" << run.states[s]->id()
       << "\",\"t_star\":" << (s == 0 ? 0 : as.t_star) << ",\"assoc\":[";
    if (s > 0)
      for (int i = 0; i < as.k(); ++i)
        os << (i ? "," : "") << "{\"s_i\":" << as.stages[static_cast<size_t>(i)]
           << ",\"xi_i\":\"" << as.ordinals[static_cast<size_t>(i)].to_string()
           << "\"}";
    os << "],\"appended_facts\":[";
    bool first = true;
    for (const auto& f : sys.enumerate(run.states[s])) {
      std::ostringstream key;
      key << f.symbol << "|" << f.positive;
      for (auto a : f.args) key << "," << a;
      if (seen.insert(key.str()).second) {
        if (!first) os << ",";
        first = false;
        os << "\"" << key.str() << "\"";
      }
    }
    os << "]}\n";
  }
  return os.str();
}

}  // namespace forge
