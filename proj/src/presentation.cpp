#include "forge/presentation.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

#include "forge/rng.hpp"

namespace forge {

std::string family_name(StructureFamily f) {
  switch (f) {
    case StructureFamily::finite_order: return "finite-order";
    case StructureFamily::ordinal_order: return "ordinal-order";
    case StructureFamily::rational_order: return "rational-order";
    case StructureFamily::rational_vector_space: return "rational-vector-space";
  }
  return "?";
}

Signature Signature::for_family(StructureFamily f) {
  Signature s;
  s.family_ = f;
  s.infinite_ = (f == StructureFamily::rational_vector_space);
  return s;
}

size_t Signature::count() const {
  return infinite_ ? static_cast<size_t>(1) << 20 : 1;
}

int Signature::arity(size_t symbol) const {
  if (!infinite_) {
    if (symbol != 0) throw std::out_of_range("signature symbol");
    return 2;  // <
  }
  if (symbol == 0) return 1;  // zero
  if (symbol == 1) return 3;  // add
  return 2;                   // smul[q]
}

std::string Signature::name(size_t symbol) const {
  if (!infinite_) return "<";
  if (symbol == 0) return "zero";
  if (symbol == 1) return "add";
  mpq_class q = rational_at(symbol - 2);
  return "smul[" + q.get_str() + "]";
}

std::string Fact::to_string(const Signature& sig) const {
  std::ostringstream os;
  os << "fact " << sig.name(symbol) << "/" << sig.arity(symbol);
  for (auto a : args) os << " " << a;
  os << " " << (positive ? 1 : 0);
  return os.str();
}

Fact Fact::parse(const std::string& line, const Signature& sig) {
  std::istringstream is(line);
  std::string kw, symar;
  if (!(is >> kw >> symar) || kw != "fact")
    throw std::invalid_argument("bad fact line: " + line);
  auto slash = symar.rfind('/');
  if (slash == std::string::npos)
    throw std::invalid_argument("bad fact symbol: " + line);
  std::string name = symar.substr(0, slash);
  int arity = std::stoi(symar.substr(slash + 1));
  Fact f;
  // resolve symbol index by name against the signature
  bool found = false;
  size_t limit = sig.infinite() ? 64 : sig.count();
  for (size_t k = 0; k < limit; ++k) {
    if (sig.name(k) == name) {
      f.symbol = static_cast<int32_t>(k);
      found = true;
      break;
    }
  }
  if (!found) throw std::invalid_argument("unknown symbol in fact: " + line);
  std::vector<int32_t> nums;
  int32_t x;
  while (is >> x) nums.push_back(x);
  if (static_cast<int>(nums.size()) != arity + 1)
    throw std::invalid_argument("bad fact arity: " + line);
  f.args.assign(nums.begin(), nums.end() - 1);
  f.positive = nums.back() != 0;
  return f;
}

// ---------------------------------------------------------------------------
// Rational enumeration: 0, then Stern-Brocot positives alternating with
// their negatives: 0, 1, -1, 1/2, -1/2, 2, -2, 1/3, -1/3, ...
namespace {
mpq_class stern_brocot(size_t n) {  // n >= 1, heap order
  // walk the bits of n below the leading one
  mpz_class la = 0, lb = 1, ha = 1, hb = 0;  // lo = 0/1, hi = 1/0
  mpz_class ma = 1, mb = 1;
  int top = 63;
  while (top > 0 && !((n >> top) & 1)) --top;
  for (int i = top - 1; i >= 0; --i) {
    if ((n >> i) & 1) {  // right: lo = mid
      la = ma; lb = mb;
    } else {  // left: hi = mid
      ha = ma; hb = mb;
    }
    ma = la + ha;
    mb = lb + hb;
  }
  return mpq_class(ma, mb);
}
}  // namespace

mpq_class rational_at(size_t index) {
  if (index == 0) return mpq_class(0);
  size_t k = (index - 1) / 2 + 1;
  mpq_class q = stern_brocot(k);
  if (index % 2 == 0) q = -q;
  return q;
}

// ---------------------------------------------------------------------------
// Ordinal-order engine. Ordinals below alpha < w^w are coefficient vectors
// (a_{d-1},...,a_0) lexicographically below alpha's vector; elements
// enumerate these vectors graded by height(a) = sum a_i * (i+1), ties in
// ordinal order.
struct Presentation::OrdEngine {
  int degree = 0;                     // number of coefficient positions
  std::vector<uint64_t> alpha_vec;    // alpha as coefficient vector (may be all ~0 for w^w itself -- not allowed)
  std::vector<std::vector<uint64_t>> elems;  // enumeration prefix
  std::map<std::vector<uint64_t>, Elem> index;

  static std::vector<uint64_t> to_vec(const Ordinal& o, int degree) {
    std::vector<uint64_t> v(degree, 0);
    for (const auto& t : o.terms()) {
      auto e = t.exponent.as_nat();
      if (!e || *e >= static_cast<uint64_t>(degree))
        throw std::invalid_argument("ordinal too large for engine degree");
      v[degree - 1 - static_cast<int>(*e)] = t.coeff;
    }
    return v;
  }

  static Ordinal to_ordinal(const std::vector<uint64_t>& v) {
    Ordinal o;
    int d = static_cast<int>(v.size());
    for (int i = 0; i < d; ++i) {
      if (v[i] == 0) continue;
      o = o.append_term(Ordinal::nat(d - 1 - i), v[i]);
    }
    return o;
  }

  static uint64_t height(const std::vector<uint64_t>& v) {
    uint64_t h = 0;
    int d = static_cast<int>(v.size());
    for (int i = 0; i < d; ++i) h += v[i] * static_cast<uint64_t>(d - i);
    return h;
  }

  // Whole height levels are generated at a time, so the enumeration prefix
  // is always complete up to next_height.
  void grow_to(size_t n) {
    while (elems.size() < n) {
      std::vector<std::vector<uint64_t>> level;
      gen_level(next_height, level);
      std::sort(level.begin(), level.end());  // lex on vectors == ordinal order
      for (auto& v : level) {
        index.emplace(v, static_cast<Elem>(elems.size()));
        elems.push_back(v);
      }
      ++next_height;
      if (next_height > 100000)
        throw std::runtime_error("ordinal enumeration exhausted");
    }
  }

  uint64_t next_height = 0;

  // all vectors lex-below alpha_vec with height exactly h
  void gen_level(uint64_t h, std::vector<std::vector<uint64_t>>& out) {
    std::vector<uint64_t> cur(degree, 0);
    rec(0, h, cur, out);
  }

  void rec(int pos, uint64_t rem, std::vector<uint64_t>& cur,
           std::vector<std::vector<uint64_t>>& out) {
    int d = degree;
    if (pos == d) {
      if (rem == 0 && std::lexicographical_compare(cur.begin(), cur.end(),
                                                   alpha_vec.begin(),
                                                   alpha_vec.end()))
        out.push_back(cur);
      return;
    }
    uint64_t w = static_cast<uint64_t>(d - pos);
    for (uint64_t a = 0; a * w <= rem; ++a) {
      cur[pos] = a;
      rec(pos + 1, rem - a * w, cur, out);
    }
    cur[pos] = 0;
  }
};

// ---------------------------------------------------------------------------
// Vector-space engine. Elements enumerate finitely supported sequences of
// rational indices (k_0..k_{m-1}), last index nonzero, graded by
// weight = m + sum k_i, ties by (length, lex).
struct Presentation::VecEngine {
  std::vector<std::vector<size_t>> elems;  // index sequences

  void grow_to(size_t n) {
    while (elems.size() < n) {
      std::vector<std::vector<size_t>> level;
      gen_weight(next_weight, level);
      std::sort(level.begin(), level.end(),
                [](const std::vector<size_t>& a, const std::vector<size_t>& b) {
                  if (a.size() != b.size()) return a.size() < b.size();
                  return a < b;
                });
      for (auto& v : level) elems.push_back(v);
      ++next_weight;
      if (next_weight > 10000)
        throw std::runtime_error("vector enumeration exhausted");
    }
  }

  size_t next_weight = 0;

  void gen_weight(size_t w, std::vector<std::vector<size_t>>& out) {
    if (w == 0) {
      out.push_back({});  // the zero vector
      return;
    }
    std::vector<size_t> cur;
    rec(w, cur, out);
  }

  void rec(size_t rem, std::vector<size_t>& cur,
           std::vector<std::vector<size_t>>& out) {
    // each position costs 1 + k_i
    if (rem == 0) {
      if (!cur.empty() && cur.back() != 0) out.push_back(cur);
      return;
    }
    if (rem < 1) return;
    for (size_t k = 0; k + 1 <= rem; ++k) {
      cur.push_back(k);
      rec(rem - 1 - k, cur, out);
      cur.pop_back();
    }
  }

  static VecQ to_vector(const std::vector<size_t>& idx) {
    VecQ v;
    v.reserve(idx.size());
    for (size_t k : idx) v.push_back(rational_at(k));
    while (!v.empty() && v.back() == 0) v.pop_back();
    return v;
  }
};

// ---------------------------------------------------------------------------

Presentation Presentation::finite_order(int n) {
  if (n < 0) throw std::invalid_argument("finite_order: negative size");
  Presentation p;
  p.family_ = StructureFamily::finite_order;
  p.sig_ = Signature::for_family(p.family_);
  p.finite_n_ = n;
  p.alpha_ = Ordinal::nat(static_cast<uint64_t>(n));
  return p;
}

Presentation Presentation::ordinal_order(const Ordinal& alpha) {
  auto n = alpha.as_nat();
  if (n) return finite_order(static_cast<int>(*n));
  Presentation p;
  p.family_ = StructureFamily::ordinal_order;
  p.sig_ = Signature::for_family(p.family_);
  p.alpha_ = alpha;
  p.ord_ = std::make_shared<OrdEngine>();
  uint64_t deg = 0;
  for (const auto& t : alpha.terms()) {
    auto e = t.exponent.as_nat();
    if (!e) throw std::invalid_argument("ordinal order type must be below w^w");
    deg = std::max(deg, *e + 1);
  }
  p.ord_->degree = static_cast<int>(deg);
  p.ord_->alpha_vec = OrdEngine::to_vec(alpha, p.ord_->degree);
  return p;
}

Presentation Presentation::rational_order() {
  Presentation p;
  p.family_ = StructureFamily::rational_order;
  p.sig_ = Signature::for_family(p.family_);
  return p;
}

Presentation Presentation::rational_vector_space() {
  Presentation p;
  p.family_ = StructureFamily::rational_vector_space;
  p.sig_ = Signature::for_family(p.family_);
  p.vec_ = std::make_shared<VecEngine>();
  return p;
}

Presentation Presentation::permuted(uint64_t seed, int window) const {
  Presentation p = *this;
  if (size() && window > *size()) window = *size();
  std::vector<Elem> perm(window);
  for (int i = 0; i < window; ++i) perm[i] = i;
  Rng rng(seed);
  for (int i = window - 1; i > 0; --i) {
    int j = static_cast<int>(rng.below(static_cast<uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  // compose with any existing permutation
  if (!perm_.empty()) {
    std::vector<Elem> comp(window);
    for (int i = 0; i < window; ++i) {
      Elem mid = perm[i];
      comp[i] = mid < static_cast<Elem>(perm_.size()) ? perm_[mid] : mid;
    }
    perm = std::move(comp);
  }
  p.perm_ = std::move(perm);
  return p;
}

Elem Presentation::image(Elem e) const {
  if (e >= 0 && static_cast<size_t>(e) < perm_.size()) return perm_[e];
  return e;
}

std::optional<int> Presentation::size() const {
  if (family_ == StructureFamily::finite_order) return finite_n_;
  return std::nullopt;
}

bool Presentation::rigid() const {
  return family_ == StructureFamily::finite_order ||
         family_ == StructureFamily::ordinal_order;
}

std::string Presentation::describe() const {
  std::string s = family_name(family_);
  if (family_ == StructureFamily::finite_order)
    s += "(" + std::to_string(finite_n_) + ")";
  if (family_ == StructureFamily::ordinal_order)
    s += "(" + alpha_.to_string() + ")";
  if (!perm_.empty()) s += " permuted";
  return s;
}

Ordinal Presentation::element_ordinal(Elem e) const {
  Elem x = image(e);
  if (family_ == StructureFamily::finite_order) {
    if (x < 0 || x >= finite_n_) throw std::out_of_range("element");
    return Ordinal::nat(static_cast<uint64_t>(x));
  }
  if (family_ != StructureFamily::ordinal_order)
    throw std::logic_error("element_ordinal: not an ordinal order");
  ord_->grow_to(static_cast<size_t>(x) + 1);
  return OrdEngine::to_ordinal(ord_->elems[static_cast<size_t>(x)]);
}

mpq_class Presentation::element_rational(Elem e) const {
  if (family_ != StructureFamily::rational_order)
    throw std::logic_error("element_rational: not the rational order");
  return rational_at(static_cast<size_t>(image(e)));
}

VecQ Presentation::element_vector(Elem e) const {
  if (family_ != StructureFamily::rational_vector_space)
    throw std::logic_error("element_vector: not a vector space");
  Elem x = image(e);
  vec_->grow_to(static_cast<size_t>(x) + 1);
  return VecEngine::to_vector(vec_->elems[static_cast<size_t>(x)]);
}

std::optional<Elem> Presentation::find_vector(const VecQ& v, int window) const {
  for (Elem e = 0; e < window; ++e)
    if (vectors_equal(element_vector(e), v)) return e;
  return std::nullopt;
}

std::optional<Elem> Presentation::element_for_ordinal(const Ordinal& o) const {
  if (family_ == StructureFamily::finite_order) {
    auto n = o.as_nat();
    if (!n || *n >= static_cast<uint64_t>(finite_n_)) return std::nullopt;
    Elem canonical = static_cast<Elem>(*n);
    // invert any presentation permutation
    for (Elem e = 0; e < finite_n_; ++e)
      if (image(e) == canonical) return e;
    return std::nullopt;
  }
  if (family_ != StructureFamily::ordinal_order)
    throw std::logic_error("element_for_ordinal: not an ordinal order");
  if (!(o < alpha_)) return std::nullopt;
  auto vec = OrdEngine::to_vec(o, ord_->degree);
  uint64_t h = OrdEngine::height(vec);
  while (ord_->next_height <= h) ord_->grow_to(ord_->elems.size() + 1);
  auto it = ord_->index.find(vec);
  if (it == ord_->index.end())
    throw std::logic_error("ordinal enumeration missed a value");
  Elem canonical = it->second;
  if (perm_.empty()) return canonical;
  if (static_cast<size_t>(canonical) >= perm_.size()) return canonical;
  for (Elem e = 0; e < static_cast<Elem>(perm_.size()); ++e)
    if (perm_[e] == canonical) return e;
  return canonical;
}

Elem Presentation::element_for_rational(const mpq_class& q) const {
  if (family_ != StructureFamily::rational_order)
    throw std::logic_error("element_for_rational: not the rational order");
  constexpr size_t kScanLimit = 1 << 22;
  for (size_t k = 0; k < kScanLimit; ++k) {
    if (rational_at(k) == q) {
      Elem canonical = static_cast<Elem>(k);
      if (perm_.empty() || static_cast<size_t>(canonical) >= perm_.size())
        return canonical;
      for (Elem e = 0; e < static_cast<Elem>(perm_.size()); ++e)
        if (perm_[e] == canonical) return e;
      return canonical;
    }
  }
  throw std::runtime_error("rational not found in enumeration prefix: " +
                           q.get_str());
}

bool Presentation::less(Elem a, Elem b) const {
  switch (family_) {
    case StructureFamily::finite_order: {
      Elem x = image(a), y = image(b);
      if (x < 0 || x >= finite_n_ || y < 0 || y >= finite_n_)
        throw std::out_of_range("element");
      return x < y;
    }
    case StructureFamily::ordinal_order: {
      Elem x = image(a), y = image(b);
      ord_->grow_to(static_cast<size_t>(std::max(x, y)) + 1);
      return ord_->elems[static_cast<size_t>(x)] <
             ord_->elems[static_cast<size_t>(y)];
    }
    case StructureFamily::rational_order:
      return element_rational(a) < element_rational(b);
    default:
      throw std::logic_error("less: not an order family");
  }
}

bool Presentation::eval_atom(size_t symbol, const Tuple& args) const {
  if (is_order()) {
    if (symbol != 0 || args.size() != 2)
      throw std::invalid_argument("bad atom");
    return less(args[0], args[1]);
  }
  switch (symbol) {
    case 0:
      return element_vector(args.at(0)).empty();
    case 1:
      return vectors_equal(vec_add(element_vector(args.at(0)),
                                   element_vector(args.at(1))),
                           element_vector(args.at(2)));
    default: {
      mpq_class q = rational_at(symbol - 2);
      return vectors_equal(vec_scale(q, element_vector(args.at(0))),
                           element_vector(args.at(1)));
    }
  }
}

// ---------------------------------------------------------------------------

void PartialMap::add(int32_t from, Elem to) {
  for (const auto& [f, t] : pairs_) {
    if (f == from) throw std::invalid_argument("partial map: duplicate domain");
    if (t == to) throw std::invalid_argument("partial map: not injective");
  }
  pairs_.emplace_back(from, to);
}

std::optional<Elem> PartialMap::apply(int32_t from) const {
  for (const auto& [f, t] : pairs_)
    if (f == from) return t;
  return std::nullopt;
}

PartialMap PartialMap::prefix(size_t k) const {
  PartialMap m;
  for (size_t i = 0; i < k && i < pairs_.size(); ++i)
    m.pairs_.push_back(pairs_[i]);
  return m;
}

Tuple PartialMap::range_tuple() const {
  Tuple t;
  t.reserve(pairs_.size());
  for (const auto& [f, x] : pairs_) t.push_back(x);
  return t;
}

std::vector<int32_t> PartialMap::domain_tuple() const {
  std::vector<int32_t> t;
  t.reserve(pairs_.size());
  for (const auto& [f, x] : pairs_) t.push_back(f);
  return t;
}

bool PartialMap::contains_range(Elem e) const {
  for (const auto& [f, t] : pairs_)
    if (t == e) return true;
  return false;
}

bool PartialMap::prefix_of(const PartialMap& other) const {
  if (size() > other.size()) return false;
  for (size_t i = 0; i < size(); ++i)
    if (pairs_[i] != other.pairs_[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------

namespace {
void all_arg_tuples(int arity, int n_elems, std::vector<Tuple>& out) {
  Tuple cur(static_cast<size_t>(arity), 0);
  size_t total = 1;
  for (int i = 0; i < arity; ++i) total *= static_cast<size_t>(n_elems);
  out.reserve(out.size() + total);
  for (size_t code = 0; code < total; ++code) {
    size_t c = code;
    for (int i = arity - 1; i >= 0; --i) {
      cur[static_cast<size_t>(i)] = static_cast<Elem>(c % n_elems);
      c /= static_cast<size_t>(n_elems);
    }
    out.push_back(cur);
  }
}
}  // namespace

std::vector<Fact> diagram_at(const Presentation& p, int s) {
  std::vector<Fact> out;
  if (s <= 0) return out;
  int n_elems = s;
  if (p.size()) n_elems = std::min(n_elems, *p.size());
  size_t n_sym = std::min<size_t>(static_cast<size_t>(s), p.signature().count());
  for (size_t k = 0; k < n_sym; ++k) {
    std::vector<Tuple> tuples;
    all_arg_tuples(p.signature().arity(k), n_elems, tuples);
    for (auto& t : tuples) {
      Fact f;
      f.symbol = static_cast<int32_t>(k);
      f.args.assign(t.begin(), t.end());
      f.positive = p.eval_atom(k, t);
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<Fact> pullback(const Presentation& p, const PartialMap& map,
                           size_t n_symbols) {
  std::vector<Fact> out;
  size_t n_sym = std::min(n_symbols, p.signature().count());
  int n = static_cast<int>(map.size());
  for (size_t k = 0; k < n_sym; ++k) {
    std::vector<Tuple> positions;
    all_arg_tuples(p.signature().arity(k), n, positions);
    for (auto& pos : positions) {
      Tuple imgs;
      std::vector<int32_t> doms;
      imgs.reserve(pos.size());
      for (Elem i : pos) {
        doms.push_back(map.dom_at(static_cast<size_t>(i)));
        imgs.push_back(map.ran_at(static_cast<size_t>(i)));
      }
      Fact f;
      f.symbol = static_cast<int32_t>(k);
      f.args = std::move(doms);
      f.positive = p.eval_atom(k, imgs);
      out.push_back(std::move(f));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {
// order/equality pattern equality
bool same_order_pattern(const Presentation& p, const Tuple& a, const Tuple& b) {
  size_t n = a.size();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (p.less(a[i], a[j]) != p.less(b[i], b[j])) return false;
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  return true;
}

std::vector<VecQ> tuple_vectors(const Presentation& p, const Tuple& t) {
  std::vector<VecQ> vs;
  vs.reserve(t.size());
  for (Elem e : t) vs.push_back(p.element_vector(e));
  return vs;
}

bool kernels_equal(const std::vector<std::vector<mpq_class>>& ka,
                   const std::vector<std::vector<mpq_class>>& kb) {
  return ka == kb;  // both in RREF with identical pivot structure
}
}  // namespace

bool auto_type_equal(const Presentation& p, const Tuple& a, const Tuple& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("auto_type_equal: length mismatch");
  switch (p.family()) {
    case StructureFamily::finite_order:
    case StructureFamily::ordinal_order:
      // well-orders are rigid: the only automorphism is the identity
      return a == b;
    case StructureFamily::rational_order:
      return same_order_pattern(p, a, b);
    case StructureFamily::rational_vector_space:
      return kernels_equal(relation_kernel(tuple_vectors(p, a)),
                           relation_kernel(tuple_vectors(p, b)));
  }
  return false;
}

std::vector<Tuple> canonical_tuples(const Presentation& p, int max_len,
                                    int max_elem) {
  if (p.size()) max_elem = std::min(max_elem, *p.size());
  std::vector<Tuple> out;
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Tuple> level;
    all_arg_tuples(len, max_elem, level);
    for (auto& t : level) out.push_back(std::move(t));
  }
  return out;
}

bool tuple_canonical_less(const Tuple& a, const Tuple& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

Tuple concat(const Tuple& a, const Tuple& b) {
  Tuple t = a;
  t.insert(t.end(), b.begin(), b.end());
  return t;
}

std::string tuple_to_string(const Tuple& t) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) os << ",";
    os << t[i];
  }
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// exact rational linear algebra

bool vectors_equal(const VecQ& a, const VecQ& b) {
  size_t n = std::max(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    mpq_class x = i < a.size() ? a[i] : mpq_class(0);
    mpq_class y = i < b.size() ? b[i] : mpq_class(0);
    if (x != y) return false;
  }
  return true;
}

VecQ vec_add(const VecQ& a, const VecQ& b) {
  VecQ r(std::max(a.size(), b.size()), mpq_class(0));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  while (!r.empty() && r.back() == 0) r.pop_back();
  return r;
}

VecQ vec_scale(const mpq_class& c, const VecQ& a) {
  if (c == 0) return {};
  VecQ r = a;
  for (auto& x : r) x *= c;
  return r;
}

namespace {
// rows reduced to RREF in place; returns rank
int rref(std::vector<std::vector<mpq_class>>& m) {
  if (m.empty()) return 0;
  size_t rows = m.size(), cols = m[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[r], m[piv]);
    mpq_class inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      mpq_class f = m[i][c];
      for (size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  m.resize(r);
  return static_cast<int>(r);
}
}  // namespace

int rank_of(const std::vector<VecQ>& vs) {
  size_t dim = 0;
  for (const auto& v : vs) dim = std::max(dim, v.size());
  std::vector<std::vector<mpq_class>> m;
  for (const auto& v : vs) {
    std::vector<mpq_class> row(dim, mpq_class(0));
    for (size_t i = 0; i < v.size(); ++i) row[i] = v[i];
    m.push_back(std::move(row));
  }
  return rref(m);
}

std::vector<std::vector<mpq_class>> relation_kernel(const std::vector<VecQ>& vs) {
  // kernel of the map Q^n -> V, e_i -> vs[i]; matrix columns are vs[i]
  size_t n = vs.size();
  size_t dim = 0;
  for (const auto& v : vs) dim = std::max(dim, v.size());
  std::vector<std::vector<mpq_class>> m(dim, std::vector<mpq_class>(n, mpq_class(0)));
  for (size_t j = 0; j < n; ++j)
    for (size_t i = 0; i < vs[j].size(); ++i) m[i][j] = vs[j][i];
  rref(m);
  // read off free-variable solutions
  std::vector<int> pivot_col;
  std::vector<bool> is_pivot(n, false);
  size_t r = 0;
  for (const auto& row : m) {
    size_t c = 0;
    while (c < n && row[c] == 0) ++c;
    if (c < n) {
      pivot_col.push_back(static_cast<int>(c));
      is_pivot[c] = true;
    }
    ++r;
  }
  std::vector<std::vector<mpq_class>> kernel;
  for (size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    std::vector<mpq_class> sol(n, mpq_class(0));
    sol[free] = 1;
    for (size_t i = 0; i < pivot_col.size(); ++i)
      sol[static_cast<size_t>(pivot_col[i])] = -m[i][free];
    kernel.push_back(std::move(sol));
  }
  rref(kernel);  // canonical form
  return kernel;
}

}  // namespace forge
