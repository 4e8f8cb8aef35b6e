#include "forge/qformula.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace forge {

namespace {

constexpr int kNegCost = 50;
constexpr int kBinCost = 100;

// token ids for lex comparison: (class, index)
struct Token {
  int cls;  // 0 rel, 1 eq, 2 neg, 3 and, 4 or, 5 var
  int idx;
  auto operator<=>(const Token&) const = default;
};

void tokens_of(const QFormula& f, std::vector<Token>& out) {
  switch (f.kind) {
    case QFormula::Kind::atom:
      out.push_back({0, f.symbol});
      for (int v : f.vars) out.push_back({5, v});
      return;
    case QFormula::Kind::eq:
      out.push_back({1, 0});
      for (int v : f.vars) out.push_back({5, v});
      return;
    case QFormula::Kind::neg:
      out.push_back({2, 0});
      tokens_of(f.sub[0], out);
      return;
    case QFormula::Kind::conj:
      out.push_back({3, 0});
      tokens_of(f.sub[0], out);
      tokens_of(f.sub[1], out);
      return;
    case QFormula::Kind::disj:
      out.push_back({4, 0});
      tokens_of(f.sub[0], out);
      tokens_of(f.sub[1], out);
      return;
  }
}

bool lex_less(const QFormula& a, const QFormula& b) {
  std::vector<Token> ta, tb;
  tokens_of(a, ta);
  tokens_of(b, tb);
  return ta < tb;
}

// enumerate variable tuples of given arity with cost sum(v_i + 1) == budget
void var_tuples(int arity, int budget, std::vector<int>& cur,
                std::vector<std::vector<int>>& out) {
  if (arity == 0) {
    if (budget == 0) out.push_back(cur);
    return;
  }
  for (int v = 0; v + 1 <= budget - (arity - 1); ++v) {
    cur.push_back(v);
    var_tuples(arity - 1, budget - v - 1, cur, out);
    cur.pop_back();
  }
}

// all formulas with symbol length exactly `cost`
void formulas_of_cost(const Signature& sig, int cost,
                      const std::vector<std::vector<QFormula>>& lower,
                      std::vector<QFormula>& out) {
  // atoms: R_k args, head cost k+1
  size_t max_sym = sig.infinite() ? static_cast<size_t>(cost) : sig.count();
  for (size_t k = 0; k < max_sym; ++k) {
    int head = static_cast<int>(k) + 1;
    int arity = sig.arity(k);
    int rest = cost - head;
    if (rest < arity) continue;
    std::vector<int> cur;
    std::vector<std::vector<int>> tuples;
    var_tuples(arity, rest, cur, tuples);
    for (auto& vs : tuples) {
      QFormula f;
      f.kind = QFormula::Kind::atom;
      f.symbol = static_cast<int32_t>(k);
      f.vars = vs;
      out.push_back(std::move(f));
    }
  }
  // equality: head cost 1, arity 2
  {
    int rest = cost - 1;
    if (rest >= 2) {
      std::vector<int> cur;
      std::vector<std::vector<int>> tuples;
      var_tuples(2, rest, cur, tuples);
      for (auto& vs : tuples) {
        QFormula f;
        f.kind = QFormula::Kind::eq;
        f.vars = vs;
        out.push_back(std::move(f));
      }
    }
  }
  // negation
  if (cost > kNegCost) {
    for (const auto& g : lower[static_cast<size_t>(cost - kNegCost)]) {
      QFormula f;
      f.kind = QFormula::Kind::neg;
      f.sub.push_back(g);
      out.push_back(std::move(f));
    }
  }
  // binary connectives
  if (cost > kBinCost) {
    int rest = cost - kBinCost;
    for (int c1 = 3; c1 <= rest - 3; ++c1) {
      for (const auto& g1 : lower[static_cast<size_t>(c1)])
        for (const auto& g2 : lower[static_cast<size_t>(rest - c1)]) {
          QFormula f;
          f.kind = QFormula::Kind::conj;
          f.sub = {g1, g2};
          out.push_back(f);
          f.kind = QFormula::Kind::disj;
          out.push_back(std::move(f));
        }
    }
  }
}

struct GodelCache {
  std::vector<QFormula> list;
  std::vector<std::vector<QFormula>> by_cost;  // by_cost[c] = formulas of cost c
  int next_cost = 3;
};

}  // namespace

int QFormula::max_var() const {
  int m = -1;
  for (int v : vars) m = std::max(m, v);
  for (const auto& s : sub) m = std::max(m, s.max_var());
  return m;
}

std::string QFormula::to_string(const Signature& sig) const {
  std::ostringstream os;
  switch (kind) {
    case Kind::atom:
      os << sig.name(static_cast<size_t>(symbol)) << "(";
      for (size_t i = 0; i < vars.size(); ++i)
        os << (i ? "," : "") << "x" << vars[i];
      os << ")";
      break;
    case Kind::eq:
      os << "x" << vars[0] << "=x" << vars[1];
      break;
    case Kind::neg:
      os << "~" << sub[0].to_string(sig);
      break;
    case Kind::conj:
      os << "(" << sub[0].to_string(sig) << " & " << sub[1].to_string(sig) << ")";
      break;
    case Kind::disj:
      os << "(" << sub[0].to_string(sig) << " | " << sub[1].to_string(sig) << ")";
      break;
  }
  return os.str();
}

bool QFormula::eval(const Presentation& p, const Tuple& t) const {
  switch (kind) {
    case Kind::atom: {
      Tuple args;
      args.reserve(vars.size());
      for (int v : vars) args.push_back(t.at(static_cast<size_t>(v)));
      return p.eval_atom(static_cast<size_t>(symbol), args);
    }
    case Kind::eq:
      return t.at(static_cast<size_t>(vars[0])) ==
             t.at(static_cast<size_t>(vars[1]));
    case Kind::neg:
      return !sub[0].eval(p, t);
    case Kind::conj:
      return sub[0].eval(p, t) && sub[1].eval(p, t);
    case Kind::disj:
      return sub[0].eval(p, t) || sub[1].eval(p, t);
  }
  return false;
}

const std::vector<QFormula>& godel_v1(const Signature& sig, size_t count) {
  static std::mutex mu;
  static std::map<bool, GodelCache> caches;  // keyed by signature kind
  std::lock_guard<std::mutex> lock(mu);
  GodelCache& cache = caches[sig.infinite()];
  if (cache.by_cost.empty()) cache.by_cost.resize(3);
  while (cache.list.size() < count) {
    int c = cache.next_cost++;
    cache.by_cost.resize(static_cast<size_t>(c) + 1);
    std::vector<QFormula> level;
    formulas_of_cost(sig, c, cache.by_cost, level);
    std::stable_sort(level.begin(), level.end(), lex_less);
    cache.by_cost[static_cast<size_t>(c)] = level;
    for (auto& f : level) cache.list.push_back(std::move(f));
    if (c > 400) throw std::runtime_error("godel_v1: cost overflow");
  }
  return cache.list;
}

}  // namespace forge
