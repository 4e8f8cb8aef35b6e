#include "forge/constructions.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "forge/qformula.hpp"
#include "forge/rng.hpp"

namespace forge {

// ---------------------------------------------------------------------------
// c.e. schedules

CeApproximation CeApproximation::seeded(const std::vector<int>& c, int budget,
                                        uint64_t seed) {
  CeApproximation ce;
  ce.target = c;
  std::sort(ce.target.begin(), ce.target.end());
  ce.target.erase(std::unique(ce.target.begin(), ce.target.end()),
                  ce.target.end());
  ce.schedule.assign(static_cast<size_t>(budget) + 1, -1);
  int window = std::max(2, budget / 2);
  if (static_cast<int>(ce.target.size()) >= window)
    throw std::invalid_argument("ce schedule: set too large for the budget");
  Rng rng(seed);
  std::set<int> used;
  for (int n : ce.target) {
    int s;
    do {
      s = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(window)));
    } while (used.count(s));
    used.insert(s);
    ce.schedule[static_cast<size_t>(s)] = n;
  }
  ce.validate(budget);
  return ce;
}

void CeApproximation::validate(int budget) const {
  if (static_cast<int>(schedule.size()) != budget + 1)
    throw std::invalid_argument("ce schedule: wrong length");
  std::set<int> seen;
  int empty = 0;
  for (int s = 0; s <= budget; ++s) {
    int e = schedule[static_cast<size_t>(s)];
    if (e < 0) {
      ++empty;
      continue;
    }
    if (s == 0) throw std::invalid_argument("ce schedule: enumeration at 0");
    if (!seen.insert(e).second)
      throw std::invalid_argument("ce schedule: element enumerated twice");
  }
  std::set<int> tgt(target.begin(), target.end());
  if (seen != tgt)
    throw std::invalid_argument("ce schedule: union differs from target");
  if (empty * 4 < 3 * (budget + 1))
    throw std::invalid_argument("ce schedule: not enough empty stages");
}

int CeApproximation::enumeration_stage(int n) const {
  for (int s = 0; s < static_cast<int>(schedule.size()); ++s)
    if (schedule[static_cast<size_t>(s)] == n) return s;
  return -1;
}

bool CeApproximation::contains(int n) const {
  return std::find(target.begin(), target.end(), n) != target.end();
}

// ---------------------------------------------------------------------------
// shared helpers

namespace {

Tuple prefix_of(const Tuple& t, size_t k) {
  return Tuple(t.begin(), t.begin() + static_cast<long>(std::min(k, t.size())));
}

// Godel index of the formula expressing a signed atomic fact with variable
// indices = the fact's argument positions; large sentinel when beyond the cap.
size_t gn_of_fact(const Signature& sig, const Fact& f) {
  static std::map<std::tuple<bool, int32_t, std::vector<int32_t>, bool>, size_t>
      cache;
  auto key = std::make_tuple(sig.infinite(), f.symbol, f.args, f.positive);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  constexpr size_t kCap = 4096;
  const auto& list = godel_v1(sig, kCap);
  size_t found = kCap;
  for (size_t i = 0; i < list.size(); ++i) {
    const QFormula& q = list[i];
    const QFormula* atom = &q;
    bool positive = true;
    if (q.kind == QFormula::Kind::neg) {
      atom = &q.sub[0];
      positive = false;
    }
    if (atom->kind != QFormula::Kind::atom) continue;
    if (positive != f.positive || atom->symbol != f.symbol) continue;
    if (atom->vars.size() != f.args.size()) continue;
    bool same = true;
    for (size_t j = 0; j < f.args.size(); ++j)
      if (atom->vars[j] != f.args[j]) same = false;
    if (same) {
      found = i;
      break;
    }
  }
  cache[key] = found;
  return found;
}

// The enumeration function / coding diagram: pullback along p, restricted
// under the paper-truncated variant to facts whose formula index lies below
// |ran(p)| (exactly what leq0 preserves, so enumerated facts are never
// retracted).
std::vector<Fact> coding_pullback(const Presentation& a, const PartialMap& p,
                                  Leq0Variant v) {
  size_t nsym = std::min<size_t>(std::max<size_t>(p.size(), 1),
                                 a.signature().count());
  std::vector<Fact> facts = pullback(a, p, nsym);
  if (v == Leq0Variant::full_qf) return facts;
  std::vector<Fact> kept;
  for (auto& f : facts)
    if (gn_of_fact(a.signature(), f) < p.size()) kept.push_back(std::move(f));
  return kept;
}

void require_superset(const std::vector<Fact>& small,
                      const std::vector<Fact>& big, const std::string& what) {
  std::set<Fact> b(big.begin(), big.end());
  for (const auto& f : small)
    if (!b.count(f))
      throw InvariantViolation(what + ": diagram fact retracted");
}

// least elements of [0, upto) missing from `used`, ascending
Tuple missing_elements(const Tuple& used, int upto) {
  std::set<Elem> u(used.begin(), used.end());
  Tuple out;
  for (Elem e = 0; e < upto; ++e)
    if (!u.count(e)) out.push_back(e);
  return out;
}

// Free block search with a pinned coverage prefix: least tuple of the form
// coverage + tail (tail over the least unused elements) that is alpha-free
// over c. alpha = 0 needs no search: every tuple is free.
Tuple free_block_with_coverage(const Presentation& a, const Tuple& c,
                               const Ordinal& alpha, const Tuple& coverage,
                               Leq0Variant v, const SearchBound& bound) {
  if (alpha.is_zero()) {
    if (!coverage.empty()) return coverage;
    // keep the block nonempty so the range grows: least unused element
    std::set<Elem> used(c.begin(), c.end());
    Elem e = 0;
    while (used.count(e)) ++e;
    return {e};
  }
  std::set<Elem> used(c.begin(), c.end());
  for (Elem e : coverage) used.insert(e);
  std::vector<Elem> fresh;
  for (Elem e = 0; fresh.size() < static_cast<size_t>(bound.free_max_elem);
       ++e) {
    if (a.size() && e >= *a.size()) break;
    if (!used.count(e)) fresh.push_back(e);
  }
  std::vector<Tuple> tails;
  for (int len = 1; len <= bound.free_len; ++len) {
    Tuple cur;
    std::function<void()> rec = [&]() {
      if (static_cast<int>(cur.size()) == len) {
        tails.push_back(cur);
        return;
      }
      for (Elem e : fresh) {
        if (std::find(cur.begin(), cur.end(), e) != cur.end()) continue;
        cur.push_back(e);
        rec();
        cur.pop_back();
      }
    };
    rec();
  }
  // coverage alone first, then coverage + tail in canonical tail order
  std::vector<Tuple> cands;
  if (!coverage.empty()) cands.push_back(coverage);
  for (const auto& t : tails) cands.push_back(concat(coverage, t));
  for (const Tuple& cand : cands) {
    if (is_alpha_free(a, c, cand, alpha, v, bound).is_free()) return cand;
  }
  throw SearchExhausted(
      "free_block_with_coverage: no free block at alpha=" + alpha.to_string() +
      " over range of size " + std::to_string(c.size()));
}

}  // namespace

void require_isomorphism_on_explored(const Presentation& a,
                                     const PartialMap& structure_map,
                                     const PartialMap& g) {
  // g is an isomorphism on the explored domain iff it transports the
  // pulled-back facts of the structure map
  for (size_t i = 0; i < g.size(); ++i)
    for (size_t j = 0; j < g.size(); ++j) {
      auto fi = structure_map.apply(g.dom_at(i));
      auto fj = structure_map.apply(g.dom_at(j));
      if (!fi || !fj)
        throw InvariantViolation("isomorphism check: unexplored constant");
      if (a.less(*fi, *fj) != a.less(g.ran_at(i), g.ran_at(j)))
        throw InvariantViolation(
            "not an isomorphism on the explored domain at (" +
            std::to_string(g.dom_at(i)) + "," + std::to_string(g.dom_at(j)) +
            ")");
    }
}

// ---------------------------------------------------------------------------
// Theorem 4.6 jump coding

CodingRun build_jump_coding(const Presentation& a, const CeApproximation& ce,
                            int budget, Leq0Variant v,
                            const SearchBound& bound) {
  if (!a.is_order())
    throw std::invalid_argument("build_jump_coding: order families only");
  ce.validate(budget);
  CodingRun run;
  run.base = a;
  run.variant = v;
  run.bound = bound;
  run.ce = ce;
  run.budget = budget;

  std::vector<std::optional<CodingRun::PairState>> pairs;
  PartialMap f;
  std::set<int> c_so_far;

  // Stage 0: least 1-free tuple, mapped from the first fresh constants.
  Tuple a0 = free_block_with_coverage(a, {}, Ordinal::nat(1), {}, v, bound);
  for (size_t i = 0; i < a0.size(); ++i)
    f.add(static_cast<int32_t>(i), a0[i]);
  pairs.push_back(CodingRun::PairState{a0, 0, static_cast<int>(a0.size())});
  run.f_by_stage.push_back(f);
  run.pairs_by_stage.push_back(pairs);
  run.diagram_by_stage.push_back(coding_pullback(a, f, v));

  for (int s = 1; s <= budget; ++s) {
    int entering = ce.schedule[static_cast<size_t>(s)];
    bool created = false;
    int created_n = -1;
    if (entering < 0) {
      // quiet stage: create the least undefined pair
      int n = 0;
      while (n < static_cast<int>(pairs.size()) &&
             pairs[static_cast<size_t>(n)])
        ++n;
      Tuple ran = f.range_tuple();
      // least 1-free tuple over the range; fresh elements only, since the
      // map must stay injective
      Tuple an = free_block_with_coverage(a, ran, Ordinal::nat(1), {}, v, bound);
      int b_start = static_cast<int>(f.size());
      for (size_t i = 0; i < an.size(); ++i)
        f.add(static_cast<int32_t>(b_start) + static_cast<int32_t>(i), an[i]);
      // close the range over the elements enumerated up to and including an
      Elem top = *std::max_element(an.begin(), an.end());
      Tuple fill;
      for (Elem e = 0; e <= top; ++e)
        if (!f.contains_range(e)) fill.push_back(e);
      for (Elem e : fill)
        f.add(static_cast<int32_t>(f.size()), e);
      if (n >= static_cast<int>(pairs.size())) pairs.resize(static_cast<size_t>(n) + 1);
      pairs[static_cast<size_t>(n)] =
          CodingRun::PairState{an, b_start, static_cast<int>(an.size())};
      created = true;
      created_n = n;
      if (ce.contains(n) && c_so_far.count(n)) entering = n;  // already in C
    }
    if (entering >= 0) {
      c_so_far.insert(entering);
      int n = entering;
      if (n < static_cast<int>(pairs.size()) && pairs[static_cast<size_t>(n)]) {
        const auto& ps = *pairs[static_cast<size_t>(n)];
        size_t lo = static_cast<size_t>(ps.b_start);
        size_t hi = lo + static_cast<size_t>(ps.b_len);
        Tuple x = f.range_tuple();
        // y: same prefix, slot block retyped, leq0-preserving
        Tuple y = break_slot_type(a, x, lo, hi, Ordinal(), v, bound);
        if (!leq0(a, x, y, v))
          throw InvariantViolation("jump coding: remap is not leq0-preserving");
        PartialMap nf;
        for (size_t i = 0; i < y.size(); ++i)
          nf.add(f.dom_at(i), y[i]);
        f = nf;
        // pairs above n lose their witnesses
        for (size_t m = static_cast<size_t>(n) + 1; m < pairs.size(); ++m)
          pairs[m].reset();
        if (created && created_n > n) {
          // the pair created this stage was above the injury
          created = false;
        }
      }
      // pairs at or below n keep their tuples (the image moved, the target
      // a_n stays: that is the coding bit)
    }
    run.f_by_stage.push_back(f);
    run.pairs_by_stage.push_back(pairs);
    std::vector<Fact> diag = coding_pullback(a, f, v);
    require_superset(run.diagram_by_stage.back(), diag, "jump coding");
    run.diagram_by_stage.push_back(std::move(diag));
  }
  return run;
}

PartialMap limit_isomorphism(const CodingRun& run,
                             const std::vector<int>& c_oracle) {
  std::set<int> oracle(c_oracle.begin(), c_oracle.end());
  std::set<int> truth(run.ce.target.begin(), run.ce.target.end());
  if (oracle != truth)
    throw InvariantViolation(
        "limit_isomorphism: oracle inconsistent with the schedule");
  // replay: after the last enumeration stage nothing moves, so the final map
  // is the limit on everything defined by the budget horizon
  int last = 0;
  for (int s = 0; s <= run.budget; ++s)
    if (run.ce.schedule[static_cast<size_t>(s)] >= 0) last = s;
  (void)last;
  return run.final_map();
}

std::vector<int> decode_ce_set(const CodingRun& run, const PartialMap& g) {
  require_isomorphism_on_explored(run.base, run.final_map(), g);
  std::vector<int> decoded;
  int version_stage = 0;
  for (int n = 0;; ++n) {
    // witness version: first stage >= version_stage where pair n is defined
    // and stable through the next enumeration of some m <= n
    int stage = -1;
    for (int s = version_stage; s <= run.budget; ++s) {
      if (n < static_cast<int>(run.pairs_by_stage[static_cast<size_t>(s)].size()) &&
          run.pairs_by_stage[static_cast<size_t>(s)][static_cast<size_t>(n)]) {
        stage = s;
        break;
      }
    }
    if (stage < 0) break;  // witness never settles within the budget
    const auto& ps =
        *run.pairs_by_stage[static_cast<size_t>(stage)][static_cast<size_t>(n)];
    // g must cover the block and everything before it
    if (static_cast<size_t>(ps.b_start + ps.b_len) > g.size()) break;
    Tuple g_prefix, g_block, a_side;
    for (int i = 0; i < ps.b_start; ++i)
      g_prefix.push_back(*g.apply(i));
    for (int i = ps.b_start; i < ps.b_start + ps.b_len; ++i)
      g_block.push_back(*g.apply(i));
    a_side = ps.a;
    bool same = auto_type_equal(run.base, concat(g_prefix, g_block),
                                concat(g_prefix, a_side));
    if (!same) {
      int es = run.ce.enumeration_stage(n);
      if (es < 0)
        throw InvariantViolation(
            "decode_ce_set: witness mismatch for an element outside C");
      decoded.push_back(n);
      version_stage = std::max(version_stage, es + 1);
    }
  }
  return decoded;
}

// ---------------------------------------------------------------------------
// Lemma 6.1

Tuple tuple_adjust(const Presentation& p, const Tuple& x,
                   const std::vector<AdjustConstraint>& constraints,
                   Leq0Variant v, const SearchBound& bound,
                   bool check_preconditions) {
  // hypotheses: beta decreasing, block lengths chained, freeness
  for (size_t i = 0; i + 1 < constraints.size(); ++i) {
    if (constraints[i].beta < constraints[i + 1].beta)
      throw std::invalid_argument("tuple_adjust: betas must be decreasing");
    if (constraints[i + 1].u.size() !=
        constraints[i].u.size() + constraints[i].v.size())
      throw std::invalid_argument("tuple_adjust: block lengths must chain");
  }
  for (const auto& c : constraints) {
    if (!(c.beta < c.alpha))
      throw std::invalid_argument("tuple_adjust: alpha_i > beta_i required");
    if (c.u.size() + c.v.size() > x.size())
      throw std::invalid_argument("tuple_adjust: block exceeds tuple");
    if (check_preconditions &&
        !is_alpha_free(p, c.u, c.v, c.alpha, v, bound).is_free())
      throw std::invalid_argument("tuple_adjust: v_i not alpha_i-free over u_i");
  }
  Tuple y = x;
  for (const auto& c : constraints) {
    size_t lo = c.u.size();
    size_t hi = lo + c.v.size();
    if (!auto_type_equal(p, prefix_of(y, hi), concat(c.u, c.v)))
      continue;  // already satisfies (3)
    y = break_slot_type(p, y, lo, hi, c.beta, v, bound);
  }
  return y;
}

// ---------------------------------------------------------------------------
// the main system

std::string MainState::id() const {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](uint64_t x) {
    h ^= x;
    h *= 1099511628211ULL;
  };
  for (size_t i = 0; i < p.size(); ++i) mix(static_cast<uint64_t>(p.ran_at(i)) + 1);
  for (const auto& [a, b] : pairs) {
    mix(0xabcdULL);
    for (Elem e : a) mix(static_cast<uint64_t>(e) + 1);
    mix(0x1234ULL);
    for (Elem e : b) mix(static_cast<uint64_t>(e) + 1);
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

namespace {

// per-prefix order pattern codes: the sequence of (insertion position,
// duplicate flag) as values are inserted left to right pins the order type
// of every prefix
std::vector<int> pattern_codes(const Presentation& p, const Tuple& t) {
  std::vector<int> codes;
  std::vector<Elem> sorted;
  codes.reserve(t.size());
  for (Elem e : t) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), e,
                               [&](Elem x, Elem y) { return p.less(x, y); });
    bool dup = it != sorted.end() && *it == e;
    codes.push_back(static_cast<int>(it - sorted.begin()) * 2 + (dup ? 1 : 0));
    if (!dup) sorted.insert(it, e);
  }
  return codes;
}

struct MainCtx {
  Presentation a;
  Ordinal eta;
  StageRelations rels;
  Leq0Variant v;
  SearchBound bound;
  // caches
  std::map<std::string, std::vector<int>> codes_by_state;
  std::map<std::string, bool> freeness_cache;

  const std::vector<int>& codes(const MainState& st) {
    auto key = st.id();
    auto it = codes_by_state.find(key);
    if (it != codes_by_state.end()) return it->second;
    return codes_by_state.emplace(key, pattern_codes(a, st.p.range_tuple()))
        .first->second;
  }

  bool pair_free(const Tuple& an, const Tuple& bn, const Ordinal& alpha) {
    std::ostringstream key;
    key << alpha.to_string() << "|" << tuple_to_string(an) << "|"
        << tuple_to_string(bn);
    auto it = freeness_cache.find(key.str());
    if (it != freeness_cache.end()) return it->second;
    bool free = alpha.is_zero() ||
                is_alpha_free(a, an, bn, alpha, v, bound).is_free();
    freeness_cache[key.str()] = free;
    return free;
  }

  Ordinal height_max(int upto) const {
    Ordinal m;
    for (int t = 0; t <= upto && t <= rels.budget; ++t)
      if (m < rels.heights[static_cast<size_t>(t)])
        m = rels.heights[static_cast<size_t>(t)];
    return m;
  }
};

const MainState* as_main(const StatePtr& s) {
  return dynamic_cast<const MainState*>(s.get());
}

}  // namespace

EtaSystem main_system(const Presentation& a, const Ordinal& eta,
                      const StageRelations& rels, Leq0Variant v,
                      const SearchBound& bound) {
  auto ctx = std::make_shared<MainCtx>();
  ctx->a = a;
  ctx->eta = eta;
  ctx->rels = rels;
  ctx->v = v;
  ctx->bound = bound;

  EtaSystem sys;
  sys.eta = eta;
  sys.name = "main[" + a.describe() + "]";

  sys.in_state_set = [ctx](const StatePtr& sp) {
    const MainState* st = as_main(sp);
    if (!st) return false;
    size_t r = st->pairs.size();
    if (r == 0) return false;
    // (L1) injective partial map on an initial segment of the constants
    for (size_t i = 0; i < st->p.size(); ++i)
      if (st->p.dom_at(i) != static_cast<int32_t>(i)) return false;
    // (L2)
    for (size_t n = 0; n + 1 < r; ++n)
      if (st->pairs[n + 1].first.size() !=
          st->pairs[n].first.size() + st->pairs[n].second.size())
        return false;
    // (L3)
    if (st->p.size() !=
        st->pairs.back().first.size() + st->pairs.back().second.size())
      return false;
    // (L4): dom and ran include the first r-1 constants/elements
    if (st->p.size() < r - 1) return false;
    for (Elem e = 0; e < static_cast<Elem>(r - 1); ++e)
      if (!st->p.contains_range(e)) return false;
    // (L5)
    for (size_t n = 0; n < r; ++n) {
      Ordinal alpha = ctx->height_max(static_cast<int>(n));
      if (!ctx->pair_free(st->pairs[n].first, st->pairs[n].second, alpha))
        return false;
    }
    return true;
  };

  sys.in_action_tree = [ctx](const RunSeq& seq) {
    for (size_t n = 0; n < seq.size(); ++n) {
      const MainState* st = as_main(seq[n]);
      if (!st) return false;
      if (st->pairs.size() != n + 1) return false;  // (P1) shape
      if (n > 0) {
        const MainState* prev = as_main(seq[n - 1]);
        for (size_t m = 0; m < n; ++m)
          if (st->pairs[m] != prev->pairs[m]) return false;  // (P1)
        if (prev->p.size() > st->p.size()) return false;     // dom grows
      }
      // (P2)
      for (size_t i = 0; i <= n; ++i) {
        size_t k = st->pairs[i].first.size() + st->pairs[i].second.size();
        if (k > st->p.size()) return false;
        Tuple ran_prefix = st->p.prefix(k).range_tuple();
        bool same = auto_type_equal(
            ctx->a, ran_prefix,
            concat(st->pairs[i].first, st->pairs[i].second));
        if (same != ctx->rels.trleq_all(static_cast<int>(i),
                                        static_cast<int>(n)))
          return false;
      }
      // (P3)
      for (size_t m = 0; m < n; ++m) {
        if (!ctx->rels.trleq_all(static_cast<int>(m), static_cast<int>(n)))
          continue;
        const MainState* sm = as_main(seq[m]);
        if (!sm->p.prefix_of(st->p)) return false;
      }
    }
    return true;
  };

  sys.restraint = [ctx](const Ordinal& xi, const StatePtr& lp,
                        const StatePtr& rp) {
    const MainState* l = as_main(lp);
    const MainState* r = as_main(rp);
    if (!l || !r) return false;
    size_t k = l->p.size();
    if (k > r->p.size()) return false;
    const auto& cl = ctx->codes(*l);
    const auto& cr = ctx->codes(*r);
    if (ctx->v == Leq0Variant::full_qf) {
      for (size_t i = 0; i < k; ++i)
        if (cl[i] != cr[i]) return false;  // leq0 = order-pattern equality
      if (xi.is_zero()) return true;
    }
    Tuple left = l->p.range_tuple();
    Tuple right = r->p.prefix(k).range_tuple();
    if (xi.is_zero()) return leq0(ctx->a, left, right, ctx->v);
    return leq_beta(ctx->a, left, right, xi, ctx->v, ctx->bound) == Tri::yes;
  };

  sys.trleq_state = [ctx, sysreps = rels.reps](const StatePtr& lp,
                                               const StatePtr& rp) {
    // conjunction over the representative levels; relations are constant
    // between them, so this decides "for all xi < eta"
    const MainState* l = as_main(lp);
    const MainState* r = as_main(rp);
    if (!l || !r) return false;
    if (l->p.size() > r->p.size()) return false;
    // fast sufficient test: literal map extension
    if (l->p.prefix_of(*&r->p)) return true;
    for (const auto& xi : sysreps) {
      Tuple left = l->p.range_tuple();
      Tuple right = r->p.prefix(l->p.size()).range_tuple();
      if (xi.is_zero()) {
        if (!leq0(ctx->a, left, right, ctx->v)) return false;
      } else if (leq_beta(ctx->a, left, right, xi, ctx->v, ctx->bound) !=
                 Tri::yes) {
        return false;
      }
    }
    return true;
  };

  sys.enumerate = [ctx](const StatePtr& sp) {
    const MainState* st = as_main(sp);
    if (!st) return std::vector<Fact>{};
    return coding_pullback(ctx->a, st->p, ctx->v);
  };

  sys.extension_witness = [ctx](const RunSeq& pi, const AssociatedStages& as) {
    int s = static_cast<int>(pi.size());
    auto st = std::make_shared<MainState>();
    if (s == 0) {
      Ordinal alpha = ctx->rels.heights[0];
      Tuple b0 =
          free_block_with_coverage(ctx->a, {}, alpha, {}, ctx->v, ctx->bound);
      for (size_t i = 0; i < b0.size(); ++i)
        st->p.add(static_cast<int32_t>(i), b0[i]);
      st->pairs.emplace_back(Tuple{}, b0);
      return std::static_pointer_cast<const EtaStateBase>(st);
    }
    const MainState* cur = as_main(pi.back());
    if (!cur) throw InvariantViolation("main witness: foreign state in run");
    // Claim 1: chain of back-and-forth extensions along the associated stages
    Tuple x = cur->p.range_tuple();
    for (int i = 0; i < as.k(); ++i) {
      const MainState* base_state =
          as_main(pi[static_cast<size_t>(as.stages[static_cast<size_t>(i) + 1])]);
      Tuple base = base_state->p.range_tuple();
      Tuple c = extend_match(ctx->a, x, base,
                             as.ordinals[static_cast<size_t>(i)], ctx->v,
                             ctx->bound);
      x = concat(base, c);
    }
    // Claim 2: break the automorphism types of the pairs past t*
    for (int n = as.t_star + 1; n <= s - 1; ++n) {
      const auto& [an, bn] = cur->pairs[static_cast<size_t>(n)];
      size_t lo = an.size();
      size_t hi = lo + bn.size();
      if (hi > x.size())
        throw InvariantViolation("main witness: pair block exceeds range");
      if (!auto_type_equal(ctx->a, prefix_of(x, hi), concat(an, bn)))
        continue;
      // beta_n = xi_j for the associated block with s_{j+1} < n <= s_j
      Ordinal beta;
      bool found = false;
      for (int j = 0; j < as.k(); ++j) {
        if (as.stages[static_cast<size_t>(j) + 1] < n &&
            n <= as.stages[static_cast<size_t>(j)]) {
          beta = as.ordinals[static_cast<size_t>(j)];
          found = true;
          break;
        }
      }
      if (!found)
        throw InvariantViolation("main witness: no associated block for pair " +
                                 std::to_string(n));
      if (bn.empty()) {
        // an empty block cannot change type; the state invariant (L5) only
        // allows this at height 0, where i !trleq n pairs keep k=0
        throw InvariantViolation(
            "main witness: cannot retype an empty block (pair " +
            std::to_string(n) + ")");
      }
      x = break_slot_type(ctx->a, x, lo, hi, beta, ctx->v, ctx->bound);
    }
    // fresh pair: a_s = ran(p*), b_s alpha-free over it and covering the
    // first s elements
    Ordinal alpha = ctx->height_max(s);
    Tuple coverage = missing_elements(x, s);
    Tuple bs = free_block_with_coverage(ctx->a, x, alpha, coverage, ctx->v,
                                        ctx->bound);
    for (size_t i = 0; i < x.size(); ++i)
      st->p.add(static_cast<int32_t>(i), x[i]);
    for (size_t i = 0; i < bs.size(); ++i)
      st->p.add(static_cast<int32_t>(x.size() + i), bs[i]);
    st->pairs = cur->pairs;
    st->pairs.emplace_back(x, bs);
    return std::static_pointer_cast<const EtaStateBase>(st);
  };

  return sys;
}

const MainState& MainBuildResult::state(int s) const {
  const MainState* st = as_main(run.states.at(static_cast<size_t>(s)));
  if (!st) throw std::logic_error("not a main-system state");
  return *st;
}

MainBuildResult build_main(const Presentation& a, const Ordinal& eta,
                           const ApproximationFamily& f, int budget,
                           Leq0Variant v, const SearchBound& bound) {
  MainBuildResult out;
  out.rels = derive_relations(f);
  out.sys = main_system(a, eta, out.rels, v, bound);
  out.run = run_metatheorem(out.sys, out.rels, budget);
  ZeroRunCheck zc = check_zero_run(out.sys, out.rels, out.run);
  if (!zc.ok)
    throw InvariantViolation("build_main: zero-run check failed: " +
                             zc.counterexample);
  out.diagram = enumeration_union(out.sys, out.run,
                                  f.has_truth ? &f : nullptr);
  return out;
}

std::vector<int> decode_true_path(const Presentation& a, const Run& run,
                                  const PartialMap& f, int budget) {
  // validate f against the final state's structure map
  const MainState* last = as_main(run.states.back());
  if (!last) throw std::invalid_argument("decode_true_path: not a main run");
  require_isomorphism_on_explored(a, last->p, f);
  std::vector<int> out;
  for (int j = 0; j <= budget && j < static_cast<int>(run.states.size()); ++j) {
    const MainState* st = as_main(run.states[static_cast<size_t>(j)]);
    size_t k = st->pairs.back().first.size() + st->pairs.back().second.size();
    if (k > f.size()) break;
    Tuple image;
    for (size_t i = 0; i < k; ++i) {
      auto e = f.apply(static_cast<int32_t>(i));
      if (!e) throw InvariantViolation("decode_true_path: f misses a constant");
      image.push_back(*e);
    }
    if (auto_type_equal(a, image,
                        concat(st->pairs.back().first,
                               st->pairs.back().second)))
      out.push_back(j);
  }
  return out;
}

PartialMap iso_from_true_path(const Run& run, const std::vector<int>& path) {
  PartialMap best;
  for (int j : path) {
    const MainState* st = as_main(run.states.at(static_cast<size_t>(j)));
    if (!st) throw std::invalid_argument("iso_from_true_path: not a main run");
    if (!best.prefix_of(st->p))
      throw InvariantViolation(
          "iso_from_true_path: non-nested maps along the path (stage " +
          std::to_string(j) + ")");
    best = st->p;
  }
  return best;
}

}  // namespace forge
