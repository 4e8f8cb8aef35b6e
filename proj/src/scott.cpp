#include "forge/scott.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "forge/backforth.hpp"

namespace forge {

namespace {

uint64_t position_of(const Presentation& p, Elem e) {
  Ordinal o = p.element_ordinal(e);
  auto n = o.as_nat();
  if (!n)
    throw std::invalid_argument(
        "scott family: element position is not finite (order type beyond "
        "omega on the explored part)");
  return *n;
}

std::string pattern_code(const Presentation& p, const Tuple& t) {
  std::ostringstream os;
  for (size_t i = 0; i < t.size(); ++i)
    for (size_t j = 0; j < t.size(); ++j) {
      if (p.less(t[i], t[j])) os << "<";
      else if (t[i] == t[j]) os << "=";
      else os << ">";
    }
  return os.str();
}

std::string kernel_code(const Presentation& p, const Tuple& t) {
  std::vector<VecQ> vs;
  for (Elem e : t) vs.push_back(p.element_vector(e));
  auto kernel = relation_kernel(vs);
  std::ostringstream os;
  os << kernel.size();
  for (const auto& row : kernel) {
    os << ";";
    for (const auto& q : row) os << q.get_str() << ",";
  }
  return os.str();
}

// greedy basis positions inside the tuple
std::vector<size_t> greedy_basis_positions(const Presentation& p,
                                           const Tuple& t) {
  std::vector<size_t> pos;
  std::vector<VecQ> acc;
  for (size_t i = 0; i < t.size(); ++i) {
    VecQ v = p.element_vector(t[i]);
    if (v.empty()) continue;
    acc.push_back(v);
    if (rank_of(acc) == static_cast<int>(acc.size()))
      pos.push_back(i);
    else
      acc.pop_back();
  }
  return pos;
}

bool in_span(const VecQ& v, const std::vector<VecQ>& basis) {
  std::vector<VecQ> with = basis;
  with.push_back(v);
  return rank_of(with) == rank_of(basis);
}

}  // namespace

ScottFamily ScottFamily::for_family(StructureFamily f) {
  if (f == StructureFamily::finite_order)
    throw std::invalid_argument(
        "scott family: finite orders are handled as explored omega-prefixes");
  ScottFamily fam;
  fam.family_ = f;
  return fam;
}

std::string ScottFamily::index_of(const Presentation& p, const Tuple& t,
                                  int budget) const {
  switch (family_) {
    case StructureFamily::ordinal_order: {
      std::ostringstream os;
      os << "pos:";
      for (size_t i = 0; i < t.size(); ++i) {
        uint64_t pos = position_of(p, t[i]);
        if (pos >= static_cast<uint64_t>(budget))
          throw SearchExhausted("scott family: witness beyond budget");
        os << (i ? "," : "") << pos;
      }
      return os.str();
    }
    case StructureFamily::rational_order:
      return "pat:" + pattern_code(p, t);
    case StructureFamily::rational_vector_space:
      return "dep:" + kernel_code(p, t);
    default:
      throw std::invalid_argument("scott family: unsupported family");
  }
}

bool ScottFamily::satisfies(const Presentation& p, const Tuple& t,
                            const std::string& descriptor, int budget) const {
  return index_of(p, t, budget) == descriptor;
}

Tuple ScottFamily::canonical_witness(const Presentation& p, const Tuple& t,
                                     int budget) const {
  switch (family_) {
    case StructureFamily::ordinal_order: {
      uint64_t top = 0;
      for (Elem e : t) top = std::max(top, position_of(p, e));
      Tuple w;
      for (uint64_t k = 0; k < top; ++k) {
        auto e = p.element_for_ordinal(Ordinal::nat(k));
        if (!e || static_cast<uint64_t>(*e) >= static_cast<uint64_t>(budget))
          throw SearchExhausted("scott family: witness beyond budget");
        w.push_back(*e);
      }
      return w;
    }
    case StructureFamily::rational_order:
      return {};
    case StructureFamily::rational_vector_space: {
      Tuple w;
      for (size_t i : greedy_basis_positions(p, t)) w.push_back(t[i]);
      return w;
    }
    default:
      throw std::invalid_argument("scott family: unsupported family");
  }
}

bool ScottFamily::eval_kernel(const Presentation& p, const Tuple& t,
                              const Tuple& witness,
                              const std::string& descriptor,
                              int budget) const {
  switch (family_) {
    case StructureFamily::ordinal_order: {
      // witness enumerates, strictly increasing, the full initial segment
      // below the top of t, and each coordinate sits at its stated position
      if (index_of(p, t, budget) != descriptor) return false;
      uint64_t top = 0;
      for (Elem e : t) top = std::max(top, position_of(p, e));
      if (witness.size() != top) return false;
      for (size_t i = 0; i < witness.size(); ++i)
        if (position_of(p, witness[i]) != i) return false;
      return true;
    }
    case StructureFamily::rational_order:
      return witness.empty() && index_of(p, t, budget) == descriptor;
    case StructureFamily::rational_vector_space: {
      if (index_of(p, t, budget) != descriptor) return false;
      std::vector<VecQ> basis;
      for (Elem e : witness) basis.push_back(p.element_vector(e));
      if (rank_of(basis) != static_cast<int>(basis.size())) return false;
      std::vector<VecQ> tvecs;
      for (Elem e : t) tvecs.push_back(p.element_vector(e));
      for (const auto& v : tvecs)
        if (!in_span(v, basis)) return false;
      for (const auto& b : basis)
        if (!in_span(b, tvecs)) return false;
      return true;
    }
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------

bool InvariantSet::t_contains(const Tuple& a, const Tuple& b,
                              const std::string& formula) const {
  for (const auto& e : entries) {
    if (e.a != a || e.formula != formula) continue;
    if (e.witness.size() != b.size()) continue;
    if (!tuple_canonical_less(b, e.witness)) return true;  // witness <= b
  }
  return false;
}

const InvariantSet::Entry* InvariantSet::find(const Tuple& a) const {
  for (const auto& e : entries)
    if (e.a == a) return &e;
  return nullptr;
}

InvariantSet compute_S(const Presentation& p, const ScottFamily& fam,
                       int bound, int max_len) {
  InvariantSet s;
  s.kind = InvariantSet::Kind::S;
  s.bound = bound;
  for (const Tuple& t : canonical_tuples(p, max_len, bound))
    s.entries.push_back({t, {}, fam.index_of(p, t, bound)});
  return s;
}

InvariantSet compute_T(const Presentation& p, const ScottFamily& fam,
                       int bound, int max_len) {
  InvariantSet t;
  t.kind = InvariantSet::Kind::T;
  t.bound = bound;
  for (const Tuple& a : canonical_tuples(p, max_len, bound)) {
    std::string idx = fam.index_of(p, a, bound);
    Tuple w = fam.canonical_witness(p, a, bound);
    if (!fam.eval_kernel(p, a, w, idx, bound))
      throw InvariantViolation("compute_T: canonical witness fails kernel");
    t.entries.push_back({a, w, idx});
  }
  return t;
}

InvariantSet S_from_T(const InvariantSet& t) {
  InvariantSet s;
  s.kind = InvariantSet::Kind::S;
  s.bound = t.bound;
  for (const auto& e : t.entries) s.entries.push_back({e.a, {}, e.formula});
  return s;
}

InvariantSet T_from_S(const InvariantSet& s, const Presentation& b,
                      const Presentation& a, const ScottFamily& fam,
                      int bound) {
  // per the proof: an isomorphism f : B -> A computed from the S-sets lets
  // the A-side engine decide the kernels; here that amounts to evaluating
  // the kernel of f(a-bar) on the A side and pulling the witness back
  PartialMap f = iso_from_S(b, a, fam, bound, bound);
  InvariantSet t;
  t.kind = InvariantSet::Kind::T;
  t.bound = bound;
  for (const auto& e : s.entries) {
    Tuple image;
    for (Elem x : e.a) {
      auto y = f.apply(x);
      if (!y)
        throw SearchExhausted("T_from_S: exploration insufficient for " +
                              tuple_to_string(e.a));
      image.push_back(*y);
    }
    Tuple wa = fam.canonical_witness(a, image, bound);
    Tuple wb;
    for (Elem y : wa) {
      // pull the witness back through f
      bool found = false;
      for (size_t i = 0; i < f.size(); ++i)
        if (f.ran_at(i) == y) {
          wb.push_back(f.dom_at(i));
          found = true;
          break;
        }
      if (!found)
        throw SearchExhausted("T_from_S: witness outside the explored part");
    }
    if (!fam.eval_kernel(b, e.a, wb, e.formula, bound))
      throw InvariantViolation("T_from_S: pulled-back witness fails kernel");
    t.entries.push_back({e.a, wb, e.formula});
  }
  return t;
}

PartialMap iso_from_S(const Presentation& a, const Presentation& b,
                      const ScottFamily& fam, int count, int window) {
  PartialMap m;
  Tuple a_side, b_side;
  for (Elem x = 0; x < count; ++x) {
    Tuple a_ext = a_side;
    a_ext.push_back(x);
    std::string want = fam.index_of(a, a_ext, std::max(count, window) + 1);
    bool placed = false;
    for (Elem y = 0; y < window && !placed; ++y) {
      if (std::find(b_side.begin(), b_side.end(), y) != b_side.end()) continue;
      Tuple b_ext = b_side;
      b_ext.push_back(y);
      if (fam.index_of(b, b_ext, std::max(count, window) + 1) == want) {
        m.add(x, y);
        a_side = a_ext;
        b_side = b_ext;
        placed = true;
      }
    }
    if (!placed)
      throw SearchExhausted(
          "iso_from_S: formula index mismatch at element " +
          std::to_string(x) +
          " (presentations not isomorphic on the explored part?)");
  }
  return m;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<Elem, Elem>> succ_relation(const Presentation& p,
                                                 int bound) {
  std::vector<std::pair<Elem, Elem>> out;
  for (Elem x = 0; x < bound; ++x)
    for (Elem y = 0; y < bound; ++y)
      if (position_of(p, y) == position_of(p, x) + 1) out.emplace_back(x, y);
  return out;
}

PartialMap iso_from_succ(const Presentation& p,
                         const std::vector<std::pair<Elem, Elem>>& succ) {
  // walk successors from the minimum; the image of the k-th link is k
  std::set<Elem> elems, successors;
  for (const auto& [x, y] : succ) {
    elems.insert(x);
    elems.insert(y);
    successors.insert(y);
  }
  PartialMap m;
  if (elems.empty()) {
    return m;
  }
  std::optional<Elem> start;
  for (Elem e : elems)
    if (!successors.count(e)) {
      if (start)
        throw InvariantViolation("iso_from_succ: several minimal elements");
      start = e;
    }
  if (!start)
    throw InvariantViolation("iso_from_succ: explored part lacks a minimum");
  std::map<Elem, Elem> next;
  for (const auto& [x, y] : succ) next[x] = y;
  Elem cur = *start;
  Elem k = 0;
  while (true) {
    m.add(cur, k++);
    auto it = next.find(cur);
    if (it == next.end()) break;
    cur = it->second;
  }
  return m;
}

std::vector<Tuple> indep_relation(const Presentation& w, int bound,
                                  int max_len) {
  std::vector<Tuple> out;
  // increasing tuples of explored elements with rank == length
  std::vector<Tuple> stack{{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Tuple> next;
    for (const auto& t : stack) {
      Elem from = t.empty() ? 0 : t.back() + 1;
      for (Elem e = from; e < bound; ++e) {
        Tuple ext = t;
        ext.push_back(e);
        std::vector<VecQ> vs;
        for (Elem x : ext) vs.push_back(w.element_vector(x));
        if (rank_of(vs) == static_cast<int>(ext.size())) {
          out.push_back(ext);
          next.push_back(ext);
        }
      }
    }
    stack = std::move(next);
  }
  return out;
}

std::vector<Elem> basis_from_indep(const Presentation& w,
                                   const std::vector<Tuple>& indep,
                                   int bound) {
  std::set<Tuple> ok(indep.begin(), indep.end());
  std::vector<Elem> basis;
  for (Elem e = 0; e < bound; ++e) {
    Tuple cand = basis.empty() ? Tuple{} : Tuple(basis.begin(), basis.end());
    cand.push_back(e);
    std::sort(cand.begin(), cand.end());
    if (ok.count(cand)) basis.push_back(e);
  }
  if (basis.empty())
    throw SearchExhausted("basis_from_indep: degenerate explored span");
  return basis;
}

PartialMap iso_from_basis(const Presentation& v, const Presentation& w,
                          const std::vector<Elem>& basis_v,
                          const std::vector<Elem>& basis_w, int window) {
  if (basis_v.size() > basis_w.size())
    throw std::invalid_argument("iso_from_basis: range basis too small");
  // exact coordinates of x in basis_v, mapped onto basis_w
  std::vector<VecQ> bv, bw;
  for (Elem e : basis_v) bv.push_back(v.element_vector(e));
  for (size_t i = 0; i < basis_v.size(); ++i)
    bw.push_back(w.element_vector(basis_w[i]));
  PartialMap m;
  for (Elem x = 0; x < window; ++x) {
    VecQ vx = v.element_vector(x);
    if (!in_span(vx, bv)) continue;  // outside the explored span
    // solve vx = sum c_i bv[i] by rref on the augmented system
    size_t n = bv.size();
    size_t dim = vx.size();
    for (const auto& b : bv) dim = std::max(dim, b.size());
    std::vector<std::vector<mpq_class>> mrows(
        dim, std::vector<mpq_class>(n + 1, mpq_class(0)));
    for (size_t j = 0; j < n; ++j)
      for (size_t i = 0; i < bv[j].size(); ++i) mrows[i][j] = bv[j][i];
    for (size_t i = 0; i < vx.size(); ++i) mrows[i][n] = vx[i];
    // gaussian elimination
    size_t r = 0;
    std::vector<int> pivot(n, -1);
    for (size_t c = 0; c < n && r < dim; ++c) {
      size_t piv = r;
      while (piv < dim && mrows[piv][c] == 0) ++piv;
      if (piv == dim) continue;
      std::swap(mrows[r], mrows[piv]);
      mpq_class inv = 1 / mrows[r][c];
      for (auto& xq : mrows[r]) xq *= inv;
      for (size_t i = 0; i < dim; ++i) {
        if (i == r || mrows[i][c] == 0) continue;
        mpq_class fq = mrows[i][c];
        for (size_t j = 0; j <= n; ++j) mrows[i][j] -= fq * mrows[r][j];
      }
      pivot[c] = static_cast<int>(r);
      ++r;
    }
    VecQ image;
    for (size_t j = 0; j < n; ++j) {
      mpq_class cj = pivot[j] >= 0 ? mrows[static_cast<size_t>(pivot[j])][n]
                                   : mpq_class(0);
      image = vec_add(image, vec_scale(cj, bw[j]));
    }
    auto y = w.find_vector(image, window);
    if (!y) continue;  // image not explored yet
    m.add(x, *y);
  }
  return m;
}

}  // namespace forge
