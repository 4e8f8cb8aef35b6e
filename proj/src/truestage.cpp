#include "forge/truestage.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "forge/backforth.hpp"  // InvariantViolation
#include "forge/rng.hpp"

namespace forge {

bool nstring_prefix(const NString& a, const NString& b) {
  if (a.size() > b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}

std::string nstring_to_string(const NString& s) {
  if (s.empty()) return "-";
  bool bits = std::all_of(s.begin(), s.end(), [](uint32_t x) { return x <= 1; });
  std::ostringstream os;
  if (bits) {
    for (uint32_t x : s) os << x;
  } else {
    os << "#";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  }
  return os.str();
}

NString nstring_parse(const std::string& text) {
  NString s;
  if (text == "-") return s;
  if (!text.empty() && text[0] == '#') {
    std::istringstream is(text.substr(1));
    std::string part;
    while (std::getline(is, part, ','))
      s.push_back(static_cast<uint32_t>(std::stoul(part)));
    return s;
  }
  for (char c : text) {
    if (c < '0' || c > '9')
      throw std::invalid_argument("bad nabla string: " + text);
    s.push_back(static_cast<uint32_t>(c - '0'));
  }
  return s;
}

int ApproximationFamily::level_index(const Ordinal& xi) const {
  auto it = support_index.find(xi.to_string());
  return it == support_index.end() ? -1 : it->second;
}

const NString& ApproximationFamily::row(const Ordinal& xi, int s) const {
  static const NString empty;
  int i = level_index(xi);
  if (i < 0) return empty;
  return rows[static_cast<size_t>(i)][static_cast<size_t>(s)];
}

std::vector<Ordinal> ApproximationFamily::stage_support(int s) const {
  std::vector<Ordinal> out;
  for (size_t i = 0; i < support.size(); ++i)
    if (!rows[i][static_cast<size_t>(s)].empty()) out.push_back(support[i]);
  return out;
}

// ---------------------------------------------------------------------------
// support construction and the disciplined renderer

namespace {

constexpr int kSuccessorLevels = 4;  // finite levels 1..K in the support

// Support: {0..K}, eta, every limit level reachable from eta by peeling
// successor steps, and for each limit level its attributed successor levels
// fs(lambda, j) + 1 for j < K.
std::vector<Ordinal> build_support(const Ordinal& eta) {
  std::vector<Ordinal> out;
  auto add = [&](const Ordinal& o) {
    for (const auto& x : out)
      if (x == o) return;
    out.push_back(o);
  };
  for (int i = 0; i <= kSuccessorLevels; ++i)
    add(Ordinal::nat(static_cast<uint64_t>(i)));
  std::vector<Ordinal> work{eta};
  while (!work.empty()) {
    Ordinal x = work.back();
    work.pop_back();
    if (x.as_nat()) {
      if (*x.as_nat() <= static_cast<uint64_t>(kSuccessorLevels)) continue;
      add(x);
      work.push_back(x.predecessor());
      continue;
    }
    add(x);
    if (x.is_successor()) {
      work.push_back(x.predecessor());
    } else {
      for (int j = 0; j < kSuccessorLevels; ++j) {
        Ordinal g = fundamental_sequence(x, static_cast<uint64_t>(j)).successor();
        if (g < x) work.push_back(g);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct Schedule {
  // allowed[i]: support level i may appear as the max-correct level
  std::vector<int> m_of_stage;  // index into support of max correct level
  std::vector<int> act;         // activation stage per support level
};

// levels forbidden as max-correct: the immediate support predecessor of a
// limit level (a stage correct through all of them would make the limit row
// look correct while it should track them), and level 0.
std::vector<bool> forbidden_m(const std::vector<Ordinal>& support) {
  std::vector<bool> f(support.size(), false);
  f[0] = true;  // max-correct is always at least level 1
  for (size_t i = 0; i < support.size(); ++i)
    if (support[i].is_limit() && i > 0) f[i - 1] = true;
  return f;
}

ApproximationFamily render_family(const Ordinal& eta, int budget,
                                  const std::vector<Ordinal>& support,
                                  const Schedule& sched,
                                  const std::vector<NString>& succ_truth,
                                  const NString& base_oracle) {
  ApproximationFamily f;
  f.eta = eta;
  f.budget = budget;
  f.support = support;
  for (size_t i = 0; i < support.size(); ++i)
    f.support_index[support[i].to_string()] = static_cast<int>(i);
  f.base_oracle = base_oracle;
  f.has_truth = true;
  size_t n = support.size();
  f.truth.assign(n, {});
  // successor-level truths as given; limit-level truths are derived from the
  // first bits of their attributed successor levels
  for (size_t i = 0; i < n; ++i) {
    if (support[i].is_zero()) continue;
    if (support[i].is_successor()) {
      f.truth[i] = succ_truth[i];
      continue;
    }
    NString t;
    for (int j = 0; j < kSuccessorLevels; ++j) {
      Ordinal g =
          fundamental_sequence(support[i], static_cast<uint64_t>(j)).successor();
      int gi = f.level_index(g);
      if (gi < 0 || f.truth[static_cast<size_t>(gi)].empty()) break;
      t.push_back(f.truth[static_cast<size_t>(gi)][0]);
    }
    f.truth[i] = t;
  }
  f.rows.assign(n, std::vector<NString>(static_cast<size_t>(budget) + 1));
  std::vector<size_t> len(n, 0);
  for (int s = 0; s <= budget; ++s) {
    for (size_t i = 0; i < n; ++i) {
      if (support[i].is_zero()) continue;  // level 0 stays empty
      if (s < sched.act[i]) continue;      // not yet activated
      bool correct = sched.m_of_stage[static_cast<size_t>(s)] >=
                     static_cast<int>(i);
      if (correct) {
        if (len[i] < f.truth[i].size()) ++len[i];
        NString row(f.truth[i].begin(),
                    f.truth[i].begin() + static_cast<long>(len[i]));
        f.rows[i][static_cast<size_t>(s)] = std::move(row);
      } else {
        f.rows[i][static_cast<size_t>(s)] = {2 + static_cast<uint32_t>(s)};
      }
    }
  }
  return f;
}

uint64_t machine_delay(const NString& oracle, size_t level, int machine,
                       Rng& rng) {
  // step-bounded run: walk oracle bits from a seeded start; the delay is the
  // distance to the first 1 plus a seeded jitter
  uint64_t start = (level * 31 + static_cast<uint64_t>(machine) * 7) %
                   std::max<size_t>(1, oracle.size());
  uint64_t d = 0;
  for (size_t i = 0; i < oracle.size(); ++i) {
    if (oracle[(start + i) % oracle.size()] == 1) break;
    ++d;
  }
  return d + rng.below(4);
}

ApproximationFamily generate(const Ordinal& eta, int budget,
                             FamilySource source, uint64_t seed) {
  std::vector<Ordinal> support = build_support(eta);
  size_t n = support.size();
  std::vector<bool> forb = forbidden_m(support);
  std::vector<int> allowed;
  for (size_t i = 0; i < n; ++i)
    if (!forb[i]) allowed.push_back(static_cast<int>(i));
  int top = static_cast<int>(n) - 1;

  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  NString base_oracle;
  for (int i = 0; i < 32; ++i)
    base_oracle.push_back(static_cast<uint32_t>(rng.below(2)));

  Schedule sched;
  sched.act.assign(n, 1);
  for (size_t i = 0; i < n; ++i) sched.act[i] = static_cast<int>(i);
  if (!sched.act.empty()) sched.act[0] = 1;
  // the eta row itself is live from stage 1: a dormant top row would count
  // pre-activation stages as true while lower guesses are already wrong
  sched.act[n - 1] = 1;

  std::vector<NString> succ_truth(n);
  for (size_t i = 0; i < n; ++i) {
    if (!support[i].is_successor()) continue;
    for (int j = 0; j < budget + 8; ++j)
      succ_truth[i].push_back(static_cast<uint32_t>(rng.below(2)));
  }

  // machine pool: settle times per (level, machine), monotone in level
  std::vector<std::vector<int>> settle;
  if (source == FamilySource::machine_pool) {
    settle.assign(n, {});
    int machines = budget + 4;
    for (size_t i = 0; i < n; ++i) {
      settle[i].assign(static_cast<size_t>(machines), 0);
      for (int j = 0; j < machines; ++j) {
        int lower = i > 0 && !settle[i - 1].empty()
                        ? settle[i - 1][static_cast<size_t>(j)]
                        : 0;
        uint64_t odist = machine_delay(base_oracle, i, j, rng);
        settle[i][static_cast<size_t>(j)] =
            std::max(lower, sched.act[i] + 2 * j) +
            static_cast<int>(odist);
      }
    }
  }

  // When a stage goes wrong below a limit level, some active successor level
  // below that limit must be wrong too (the stage-tagged rows back the
  // gamma_{lambda,v} extraction), so those max-correct choices are capped by
  // the active successor levels.
  auto sanitize_lower = [&](int m, int s) {
    if (m == top) return top;
    bool limit_above = false;
    for (size_t i = static_cast<size_t>(m) + 1; i < n; ++i)
      if (support[i].is_limit()) limit_above = true;
    if (limit_above) {
      int max_lower = -1;
      for (size_t i = 1; i + 1 < n; ++i) {
        if (!support[i].is_successor()) break;
        if (sched.act[i + 1] <= s && support[i + 1].is_successor() && !forb[i])
          max_lower = static_cast<int>(i);
      }
      if (max_lower < 1) return top;  // no valid lower choice yet
      m = std::min(m, max_lower);
    }
    while (m > 0 && forb[static_cast<size_t>(m)]) --m;
    return m >= 1 ? m : top;
  };

  sched.m_of_stage.assign(static_cast<size_t>(budget) + 1, top);
  for (int s = 1; s <= budget; ++s) {
    int m;
    if (source == FamilySource::injected_truth) {
      if (rng.chance(45, 100)) {
        m = top;
      } else {
        m = allowed[static_cast<size_t>(
            rng.below(static_cast<uint64_t>(allowed.size())))];
        m = sanitize_lower(m, s);
      }
    } else {
      // max hierarchical level whose arrived machines have all settled
      m = top;
      for (size_t i = 1; i < n; ++i) {
        int arrived = std::max(0, (s - sched.act[i]) / 2 + 1);
        bool ok = true;
        for (int j = 0; j < arrived && j < static_cast<int>(settle[i].size());
             ++j)
          if (settle[i][static_cast<size_t>(j)] > s) ok = false;
        if (!ok) {
          m = static_cast<int>(i) - 1;
          break;
        }
      }
      m = sanitize_lower(m, s);
    }
    sched.m_of_stage[static_cast<size_t>(s)] = m;
  }
  return render_family(eta, budget, support, sched, succ_truth, base_oracle);
}

}  // namespace

ApproximationFamily simulate_family(const Ordinal& eta, int budget,
                                    FamilySource source, uint64_t seed) {
  for (uint64_t attempt = 0; attempt < 64; ++attempt) {
    ApproximationFamily f =
        generate(eta, budget, source, seed + attempt * 1000003ULL);
    if (check_N_properties(f).all_pass()) return f;
  }
  throw InvariantViolation("simulate_family: no N-valid family found for seed");
}

ApproximationFamily make_family(
    const Ordinal& eta, int budget, const std::vector<Ordinal>& support,
    const std::map<std::string, std::vector<NString>>& rows,
    const std::map<std::string, NString>& truth) {
  ApproximationFamily f;
  f.eta = eta;
  f.budget = budget;
  f.support = support;
  std::sort(f.support.begin(), f.support.end());
  for (size_t i = 0; i < f.support.size(); ++i)
    f.support_index[f.support[i].to_string()] = static_cast<int>(i);
  f.rows.assign(f.support.size(),
                std::vector<NString>(static_cast<size_t>(budget) + 1));
  for (const auto& [name, stages] : rows) {
    int i = f.level_index(Ordinal::parse(name));
    if (i < 0) throw std::invalid_argument("make_family: level not in support");
    for (size_t s = 0; s < stages.size() && s <= static_cast<size_t>(budget);
         ++s)
      f.rows[static_cast<size_t>(i)][s] = stages[s];
  }
  f.has_truth = !truth.empty();
  f.truth.assign(f.support.size(), {});
  for (const auto& [name, t] : truth) {
    int i = f.level_index(Ordinal::parse(name));
    if (i < 0) throw std::invalid_argument("make_family: truth level unknown");
    f.truth[static_cast<size_t>(i)] = t;
  }
  return f;
}

// ---------------------------------------------------------------------------
// file format

std::string ApproximationFamily::to_text() const {
  std::ostringstream os;
  os << "eta " << eta.to_string() << " budget " << budget << "\n";
  os << "support";
  for (const auto& l : support) os << " " << l.to_string();
  os << "\n";
  os << "oracle " << nstring_to_string(base_oracle) << "\n";
  if (has_truth)
    for (size_t i = 0; i < support.size(); ++i)
      os << "truth " << support[i].to_string() << " "
         << nstring_to_string(truth[i]) << "\n";
  for (int s = 0; s <= budget; ++s)
    for (size_t i = 0; i < support.size(); ++i)
      if (!rows[i][static_cast<size_t>(s)].empty())
        os << "nabla " << s << " " << support[i].to_string() << " "
           << nstring_to_string(rows[i][static_cast<size_t>(s)]) << "\n";
  return os.str();
}

ApproximationFamily ApproximationFamily::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  ApproximationFamily f;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "eta") {
      std::string e, bkw;
      int b;
      if (!(ls >> e >> bkw >> b) || bkw != "budget")
        throw std::invalid_argument("bad family header: " + line);
      f.eta = Ordinal::parse(e);
      f.budget = b;
      have_header = true;
    } else if (kw == "support") {
      std::string l;
      while (ls >> l) f.support.push_back(Ordinal::parse(l));
      std::sort(f.support.begin(), f.support.end());
      for (size_t i = 0; i < f.support.size(); ++i)
        f.support_index[f.support[i].to_string()] = static_cast<int>(i);
      f.rows.assign(f.support.size(),
                    std::vector<NString>(static_cast<size_t>(f.budget) + 1));
      f.truth.assign(f.support.size(), {});
    } else if (kw == "oracle") {
      std::string v;
      ls >> v;
      f.base_oracle = nstring_parse(v);
    } else if (kw == "truth") {
      std::string l, v;
      ls >> l >> v;
      int i = f.level_index(Ordinal::parse(l));
      if (i < 0) throw std::invalid_argument("truth level not in support");
      f.truth[static_cast<size_t>(i)] = nstring_parse(v);
      f.has_truth = true;
    } else if (kw == "nabla") {
      int s;
      std::string l, v;
      if (!(ls >> s >> l >> v))
        throw std::invalid_argument("bad nabla line: " + line);
      int i = f.level_index(Ordinal::parse(l));
      if (i < 0) throw std::invalid_argument("nabla level not in support");
      if (s < 0 || s > f.budget)
        throw std::invalid_argument("nabla stage out of range: " + line);
      f.rows[static_cast<size_t>(i)][static_cast<size_t>(s)] = nstring_parse(v);
    } else {
      throw std::invalid_argument("unknown family line: " + line);
    }
  }
  if (!have_header) throw std::invalid_argument("family file missing header");
  return f;
}

// ---------------------------------------------------------------------------
// N-checks

bool CheckReport::all_pass() const {
  for (const auto& i : items)
    if (i.checkable && !i.pass) return false;
  return true;
}

std::string CheckReport::summary() const {
  std::ostringstream os;
  for (const auto& i : items) {
    os << i.property << ": "
       << (!i.checkable ? "not-checkable" : (i.pass ? "pass" : "FAIL"));
    if (!i.pass && !i.counterexample.empty()) os << " [" << i.counterexample << "]";
    os << "\n";
  }
  return os.str();
}

CheckReport check_N_properties(const ApproximationFamily& f) {
  CheckReport rep;
  size_t n = f.support.size();
  // (N1)
  {
    CheckReport::Item item{"N1", true, f.has_truth, ""};
    if (f.has_truth) {
      for (size_t i = 0; i < n && item.pass; ++i) {
        if (f.support[i].is_zero()) continue;
        std::vector<int> correct;
        for (int s = 0; s <= f.budget; ++s)
          if (nstring_prefix(f.rows[i][static_cast<size_t>(s)], f.truth[i]))
            correct.push_back(s);
        // nested along the correct stages, union covers explored truth
        size_t maxlen = 0;
        for (size_t j = 0; j + 1 < correct.size(); ++j) {
          const NString& a = f.rows[i][static_cast<size_t>(correct[j])];
          const NString& b = f.rows[i][static_cast<size_t>(correct[j + 1])];
          if (!nstring_prefix(a, b)) {
            item.pass = false;
            item.counterexample = "level " + f.support[i].to_string() +
                                  " stages " + std::to_string(correct[j]) +
                                  "," + std::to_string(correct[j + 1]);
            break;
          }
        }
        for (int s : correct)
          maxlen = std::max(maxlen, f.rows[i][static_cast<size_t>(s)].size());
        // desk reading of "infinitely many": at least budget/4 correct stages
        // and one in the last quarter
        if (item.pass && f.budget >= 8) {
          int quarter = f.budget / 4;
          bool late = false;
          for (int s : correct)
            if (s >= f.budget - quarter) late = true;
          if (static_cast<int>(correct.size()) < quarter || !late) {
            item.pass = false;
            item.counterexample =
                "level " + f.support[i].to_string() + ": only " +
                std::to_string(correct.size()) + " correct stages";
          }
        }
      }
    }
    rep.items.push_back(item);
  }
  // (N2): finite support, listed
  {
    CheckReport::Item item{"N2", true, true, ""};
    for (int s = 0; s <= f.budget && item.pass; ++s) {
      // every nonempty row's level is in the support list by construction;
      // check the per-stage support is finite (trivially) and listed
      auto sup = f.stage_support(s);
      if (sup.size() > f.support.size()) {
        item.pass = false;
        item.counterexample = "stage " + std::to_string(s);
      }
    }
    rep.items.push_back(item);
  }
  // (N3)
  {
    CheckReport::Item item{"N3", true, true, ""};
    for (size_t xi = 0; xi < n && item.pass; ++xi)
      for (int s = 0; s <= f.budget && item.pass; ++s) {
        const NString& rs = f.rows[xi][static_cast<size_t>(s)];
        if (rs.empty()) continue;
        for (int t = s; t <= f.budget && item.pass; ++t) {
          if (!nstring_prefix(rs, f.rows[xi][static_cast<size_t>(t)])) continue;
          for (size_t g = 0; g <= xi; ++g) {
            if (!nstring_prefix(f.rows[g][static_cast<size_t>(s)],
                                f.rows[g][static_cast<size_t>(t)])) {
              item.pass = false;
              item.counterexample =
                  "xi=" + f.support[xi].to_string() + " gamma=" +
                  f.support[g].to_string() + " s=" + std::to_string(s) +
                  " t=" + std::to_string(t);
              break;
            }
          }
        }
      }
    rep.items.push_back(item);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// relations

Ordinal height_of(const ApproximationFamily& f, int s) {
  Ordinal h;  // 0 on empty support
  for (size_t i = 0; i < f.support.size(); ++i) {
    if (!(f.support[i] < f.eta)) continue;
    if (!f.rows[i][static_cast<size_t>(s)].empty()) h = f.support[i];
  }
  return h;
}

namespace {

// gamma_{lambda,v}: least support level gamma < lambda whose row at v is
// nonempty and starts with the last entry of the lambda row at v.
std::optional<Ordinal> extract_gamma(const ApproximationFamily& f,
                                     const Ordinal& lambda, int v) {
  const NString& lrow = f.row(lambda, v);
  if (lrow.empty()) return std::nullopt;
  uint32_t last = lrow.back();
  for (const auto& g : f.support) {
    if (!(g < lambda)) break;
    const NString& grow = f.row(g, v);
    if (!grow.empty() && grow[0] == last) return g;
  }
  return std::nullopt;
}

bool trleq_xi_raw(const ApproximationFamily& f, const Ordinal& xi, int s,
                  int t) {
  Ordinal cap = xi.successor();
  for (const auto& g : f.support) {
    if (g > cap) break;
    if (!nstring_prefix(f.row(g, s), f.row(g, t))) return false;
  }
  return true;
}

bool trleq_raw(const ApproximationFamily& f, int s, int t) {
  // for all xi < eta: nabla^{xi+1}_s <= nabla^{xi+1}_t; the relevant levels
  // are the successor support levels <= eta
  for (const auto& g : f.support) {
    if (!g.is_successor() || g > f.eta) continue;
    if (!nstring_prefix(f.row(g, s), f.row(g, t))) return false;
  }
  return true;
}

}  // namespace

StageRelations derive_relations(const ApproximationFamily& f) {
  StageRelations r;
  r.eta = f.eta;
  r.budget = f.budget;
  int n = f.budget + 1;

  // C-set first (its gammas contribute representative levels)
  for (const auto& lambda : f.support) {
    if (!lambda.is_limit() || !(lambda < f.eta)) continue;
    Ordinal lp1 = lambda.successor();
    for (int u = 0; u <= f.budget; ++u) {
      const NString& lu = f.row(lambda, u);
      for (int v = 0; v <= f.budget; ++v) {
        if (u == v) continue;
        const NString& lv = f.row(lambda, v);
        if (!(nstring_prefix(lu, lv) && lu.size() < lv.size())) continue;
        if (nstring_prefix(f.row(lp1, u), f.row(lp1, v))) continue;
        // minimality clause
        bool minimal = true;
        for (int q = 0; q <= f.budget && minimal; ++q) {
          const NString& lq = f.row(lambda, q);
          if (nstring_prefix(lu, lq) && lu.size() < lq.size() &&
              nstring_prefix(lq, lv) && lq.size() < lv.size()) {
            if (!nstring_prefix(f.row(lp1, u), f.row(lp1, q))) minimal = false;
          }
        }
        if (!minimal) continue;
        auto gamma = extract_gamma(f, lambda, v);
        if (!gamma)
          throw InvariantViolation(
              "derive_relations: gamma_{lambda,v} extraction failed at v=" +
              std::to_string(v));
        r.c_set.push_back({lambda, u, v, *gamma});
      }
    }
  }

  // representative levels
  auto add_rep = [&](const Ordinal& o) {
    if (!(o < f.eta)) return;
    for (const auto& x : r.reps)
      if (x == o) return;
    r.reps.push_back(o);
  };
  add_rep(Ordinal());
  for (const auto& g : f.support) {
    add_rep(g);
    if (g.is_successor()) add_rep(g.predecessor());
  }
  for (const auto& w : r.c_set) add_rep(w.gamma.successor());
  std::sort(r.reps.begin(), r.reps.end());

  // trleq_xi tables
  size_t nr = r.reps.size();
  r.trleq_xi.assign(nr, std::vector<std::vector<bool>>(
                            static_cast<size_t>(n),
                            std::vector<bool>(static_cast<size_t>(n), false)));
  for (size_t ri = 0; ri < nr; ++ri)
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t)
        r.trleq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(t)] =
            trleq_xi_raw(f, r.reps[ri], s, t);
  r.trleq.assign(static_cast<size_t>(n),
                 std::vector<bool>(static_cast<size_t>(n), false));
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t)
      r.trleq[static_cast<size_t>(s)][static_cast<size_t>(t)] =
          trleq_raw(f, s, t);

  // leq_xi = trleq_xi minus C-blocked pairs
  r.leq_xi = r.trleq_xi;
  for (size_t ri = 0; ri < nr; ++ri) {
    const Ordinal& xi = r.reps[ri];
    for (const auto& w : r.c_set) {
      if (!(w.gamma < xi)) continue;
      int gi = r.rep_index(w.gamma);
      for (int s = w.u; s < w.v && s < n; ++s) {
        if (s < 0) continue;
        for (int t = 0; t < n; ++t) {
          if (r.trleq_xi[static_cast<size_t>(gi)][static_cast<size_t>(w.v)]
                        [static_cast<size_t>(t)])
            r.leq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(t)] =
                false;
        }
      }
    }
  }

  r.heights.resize(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s)
    r.heights[static_cast<size_t>(s)] = height_of(f, s);
  return r;
}

int StageRelations::rep_index(const Ordinal& xi) const {
  int best = -1;
  for (size_t i = 0; i < reps.size(); ++i)
    if (reps[i] <= xi) best = static_cast<int>(i);
  if (best < 0) throw std::invalid_argument("rep_index: below all reps");
  return best;
}

bool StageRelations::leq(const Ordinal& xi, int s, int t) const {
  int ri = rep_index(xi);
  return leq_xi[static_cast<size_t>(ri)][static_cast<size_t>(s)]
               [static_cast<size_t>(t)];
}

bool StageRelations::trleq_at(const Ordinal& xi, int s, int t) const {
  int ri = rep_index(xi);
  return trleq_xi[static_cast<size_t>(ri)][static_cast<size_t>(s)]
                 [static_cast<size_t>(t)];
}

// ---------------------------------------------------------------------------

std::vector<int> true_path(const ApproximationFamily& f) {
  if (!f.has_truth)
    throw std::invalid_argument("true_path: family has no ground truth");
  int ei = f.level_index(f.eta);
  if (ei < 0) throw std::invalid_argument("true_path: eta row missing");
  std::vector<int> path;
  for (int s = 0; s <= f.budget; ++s)
    if (nstring_prefix(f.rows[static_cast<size_t>(ei)][static_cast<size_t>(s)],
                       f.truth[static_cast<size_t>(ei)]))
      path.push_back(s);
  for (size_t i = 0; i + 1 < path.size(); ++i)
    if (!trleq_raw(f, path[i], path[i + 1]))
      throw InvariantViolation(
          "true_path: stages not trleq-increasing (corrupted truth?) at " +
          std::to_string(path[i]) + " -> " + std::to_string(path[i + 1]));
  if (f.budget >= 8) {
    int quarter = f.budget / 4;
    if (path.empty() || path.back() < f.budget - quarter)
      throw InvariantViolation(
          "true_path: no true stage in the last quarter (corrupted truth?)");
  }
  return path;
}

// ---------------------------------------------------------------------------
// B-checks

namespace {
std::string pair_str(int s, int t) {
  return "(" + std::to_string(s) + "," + std::to_string(t) + ")";
}
}  // namespace

CheckReport check_B_properties(const StageRelations& r,
                               const ApproximationFamily& f) {
  CheckReport rep;
  int n = r.budget + 1;
  auto item = [&](const std::string& name, bool checkable = true) {
    rep.items.push_back({name, true, checkable, ""});
    return rep.items.size() - 1;
  };
  auto fail = [&](size_t idx, const std::string& ce) {
    if (rep.items[idx].pass) {
      rep.items[idx].pass = false;
      rep.items[idx].counterexample = ce;
    }
  };

  // B0: leq_0 is the standard ordering
  {
    size_t i0 = item("B0");
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t)
        if (r.leq(Ordinal(), s, t) != (s <= t)) fail(i0, pair_str(s, t));
  }
  // B1: uniformly computable -- witnessed by the tables themselves
  item("B1");
  // B2: preorders
  {
    size_t i2 = item("B2");
    for (size_t ri = 0; ri < r.reps.size(); ++ri) {
      for (int s = 0; s < n; ++s)
        if (!r.leq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(s)])
          fail(i2, "not reflexive at xi=" + r.reps[ri].to_string() + " s=" +
                       std::to_string(s));
      for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
          if (!r.leq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(t)])
            continue;
          for (int u = 0; u < n; ++u)
            if (r.leq_xi[ri][static_cast<size_t>(t)][static_cast<size_t>(u)] &&
                !r.leq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(u)])
              fail(i2, "xi=" + r.reps[ri].to_string() + " " +
                           std::to_string(s) + "," + std::to_string(t) + "," +
                           std::to_string(u));
        }
    }
  }
  // B3: nested
  {
    size_t i3 = item("B3");
    for (size_t ri = 0; ri + 1 < r.reps.size(); ++ri)
      for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
          if (r.leq_xi[ri + 1][static_cast<size_t>(s)]
                      [static_cast<size_t>(t)] &&
              !r.leq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(t)])
            fail(i3, "reps " + r.reps[ri].to_string() + "<=" +
                         r.reps[ri + 1].to_string() + " at " + pair_str(s, t));
  }
  // B4: continuity at limit reps
  {
    size_t i4 = item("B4");
    for (size_t ri = 0; ri < r.reps.size(); ++ri) {
      if (!r.reps[ri].is_limit()) continue;
      for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
          bool inter = true;
          for (size_t rj = 0; rj < ri; ++rj)
            if (!r.leq_xi[rj][static_cast<size_t>(s)][static_cast<size_t>(t)])
              inter = false;
          if (inter !=
              r.leq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(t)])
            fail(i4, "lambda=" + r.reps[ri].to_string() + " at " +
                         pair_str(s, t));
        }
    }
  }
  // B5: s leq_xi t implies nabla^{xi+1} nests
  {
    size_t i5 = item("B5");
    for (size_t ri = 0; ri < r.reps.size(); ++ri) {
      Ordinal xi1 = r.reps[ri].successor();
      for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
          if (r.leq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(t)] &&
              !nstring_prefix(f.row(xi1, s), f.row(xi1, t)))
            fail(i5, "xi=" + r.reps[ri].to_string() + " at " + pair_str(s, t));
    }
  }
  // B6: true path trleq-increasing with union = explored truth
  {
    size_t i6 = item("B6", f.has_truth);
    if (f.has_truth) {
      std::vector<int> path = true_path(f);
      for (size_t i = 0; i + 1 < path.size(); ++i)
        if (!r.trleq_all(path[i], path[i + 1]))
          fail(i6, pair_str(path[i], path[i + 1]));
      int ei = f.level_index(f.eta);
      size_t maxlen = 0;
      for (int s : path)
        maxlen = std::max(
            maxlen, f.rows[static_cast<size_t>(ei)][static_cast<size_t>(s)].size());
      size_t explored = 0;
      for (int s = 0; s <= f.budget; ++s)
        if (nstring_prefix(
                f.rows[static_cast<size_t>(ei)][static_cast<size_t>(s)],
                f.truth[static_cast<size_t>(ei)]))
          explored = std::max(
              explored,
              f.rows[static_cast<size_t>(ei)][static_cast<size_t>(s)].size());
      if (maxlen != explored) fail(i6, "union does not cover explored truth");
    }
  }
  // B7: height
  {
    size_t i7 = item("B7");
    for (int s = 0; s < n; ++s)
      for (int t = s + 1; t < n; ++t) {
        if (r.trleq_all(s, t)) continue;
        if (r.leq(r.heights[static_cast<size_t>(s)], s, t))
          fail(i7, "H(" + std::to_string(s) + ")=" +
                       r.heights[static_cast<size_t>(s)].to_string() + " at " +
                       pair_str(s, t));
      }
  }
  // B8
  {
    size_t i8 = item("B8");
    for (size_t ri = 0; ri < r.reps.size(); ++ri)
      for (int t = 0; t < n; ++t)
        for (int s = 0; s < t; ++s) {
          if (!r.leq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(t)])
            continue;
          for (int q = 0; q < s; ++q)
            if (r.leq_xi[ri][static_cast<size_t>(q)][static_cast<size_t>(t)] &&
                !r.leq_xi[ri][static_cast<size_t>(q)][static_cast<size_t>(s)])
              fail(i8, "xi=" + r.reps[ri].to_string() + " r,s,t=" +
                           std::to_string(q) + "," + std::to_string(s) + "," +
                           std::to_string(t));
          // successor form: s <=_{xi-1} t suffices
          if (r.reps[ri].is_successor()) {
            Ordinal pred = r.reps[ri].predecessor();
            for (int q = 0; q < s; ++q)
              if (r.leq_xi[ri][static_cast<size_t>(q)]
                          [static_cast<size_t>(t)] &&
                  r.leq(pred, s, t) &&
                  !r.leq_xi[ri][static_cast<size_t>(q)][static_cast<size_t>(s)])
                fail(i8, "successor form xi=" + r.reps[ri].to_string() +
                             " r,s,t=" + std::to_string(q) + "," +
                             std::to_string(s) + "," + std::to_string(t));
          }
        }
  }
  // B9: trleq iff leq_xi for all xi
  {
    size_t i9 = item("B9");
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        bool all = true;
        for (size_t ri = 0; ri < r.reps.size(); ++ri)
          if (!r.leq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(t)])
            all = false;
        if (all != r.trleq_all(s, t)) fail(i9, pair_str(s, t));
      }
  }
  // B10: trleq below a true stage is true
  {
    size_t i10 = item("B10", f.has_truth);
    if (f.has_truth) {
      std::vector<int> path = true_path(f);
      std::vector<bool> is_true(static_cast<size_t>(n), false);
      for (int s : path) is_true[static_cast<size_t>(s)] = true;
      for (int t : path)
        for (int s = 0; s < n; ++s)
          if (r.trleq_all(s, t) && !is_true[static_cast<size_t>(s)])
            fail(i10, pair_str(s, t));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

AssociatedStages associated_stages(const StageRelations& r, int s) {
  if (s < 1 || s > r.budget)
    throw std::invalid_argument("associated_stages: stage out of range");
  AssociatedStages as;
  as.stages.push_back(s - 1);
  while (true) {
    int si = as.stages.back();
    if (r.trleq_all(si, s)) break;
    // greatest xi with si <=_xi s but not <=_{xi+1} s: scan reps upward for
    // the least failing one; by continuity (B4) it is a successor
    int fail_idx = -1;
    for (size_t ri = 0; ri < r.reps.size(); ++ri)
      if (!r.leq_xi[ri][static_cast<size_t>(si)][static_cast<size_t>(s)]) {
        fail_idx = static_cast<int>(ri);
        break;
      }
    if (fail_idx < 0)
      throw InvariantViolation(
          "associated_stages: trleq fails but every leq_xi holds (B9 broken?)");
    if (fail_idx == 0)
      throw InvariantViolation(
          "associated_stages: relation fails at level 0 (B0 broken?)");
    const Ordinal& failing = r.reps[static_cast<size_t>(fail_idx)];
    if (!failing.is_successor())
      throw InvariantViolation(
          "associated_stages: least failing level is a limit (B4 broken?)");
    Ordinal xi = failing.predecessor();
    // s_{i+1} = largest t < s with t <=_{xi+1} s
    int next = -1;
    for (int t = s - 1; t >= 0; --t)
      if (r.leq_xi[static_cast<size_t>(fail_idx)][static_cast<size_t>(t)]
                  [static_cast<size_t>(s)]) {
        next = t;
        break;
      }
    if (next < 0)
      throw InvariantViolation("associated_stages: no stage t <=_{xi+1} s");
    if (next >= si)
      throw InvariantViolation("associated_stages: stages not decreasing");
    as.ordinals.push_back(xi);
    as.stages.push_back(next);
  }
  as.t_star = as.stages.back();
  return as;
}

std::string relations_to_jsonl(const StageRelations& r) {
  std::ostringstream os;
  int n = r.budget + 1;
  for (size_t ri = 0; ri < r.reps.size(); ++ri)
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t)
        os << "{\"s\":" << s << ",\"t\":" << t << ",\"rel\":\"leq\",\"xi\":\""
           << r.reps[ri].to_string() << "\",\"holds\":"
           << (r.leq_xi[ri][static_cast<size_t>(s)][static_cast<size_t>(t)]
                   ? "true"
                   : "false")
           << "}\n";
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t)
      os << "{\"s\":" << s << ",\"t\":" << t
         << ",\"rel\":\"tr\",\"xi\":\"\",\"holds\":"
         << (r.trleq[static_cast<size_t>(s)][static_cast<size_t>(t)] ? "true"
                                                                     : "false")
         << "}\n";
  return os.str();
}

}  // namespace forge
