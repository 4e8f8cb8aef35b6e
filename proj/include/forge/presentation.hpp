#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forge/ordinal.hpp"

namespace forge {

using Elem = int32_t;
using Tuple = std::vector<Elem>;

enum class StructureFamily {
  finite_order,
  ordinal_order,
  rational_order,
  rational_vector_space,
};

std::string family_name(StructureFamily f);

// Relational signature with a canonical symbol order. The vector-space
// signature is infinite (one scalar-multiplication symbol per rational).
class Signature {
 public:
  static Signature for_family(StructureFamily f);

  bool infinite() const { return infinite_; }
  // Number of symbols, or a large sentinel for infinite signatures.
  size_t count() const;
  int arity(size_t symbol) const;
  std::string name(size_t symbol) const;

 private:
  StructureFamily family_;
  bool infinite_ = false;
};

// A signed atomic fact R(args) or not-R(args). `args` live in whatever
// element space the context dictates (structure elements or B-constants).
struct Fact {
  int32_t symbol = 0;
  std::vector<int32_t> args;
  bool positive = true;

  auto operator<=>(const Fact&) const = default;
  std::string to_string(const Signature& sig) const;
  static Fact parse(const std::string& line, const Signature& sig);
};

using VecQ = std::vector<mpq_class>;  // finitely supported, trailing zeros trimmed

// The fixed enumeration of the rationals: q0 = 0, then the Stern-Brocot
// positives interleaved with their negatives.
mpq_class rational_at(size_t index);

// Stage-indexed presentation of a countable structure with domain an initial
// segment of the naturals (all of them unless the family is finite). Element
// semantics are supplied by a per-family engine; a seeded permutation of an
// initial window yields alternative presentations of the same structure.
class Presentation {
 public:
  Presentation() = default;  // the empty finite order

  static Presentation finite_order(int n);
  static Presentation ordinal_order(const Ordinal& alpha);
  static Presentation rational_order();
  static Presentation rational_vector_space();

  // Same structure, elements renamed by a seeded permutation of [0, window).
  Presentation permuted(uint64_t seed, int window) const;

  StructureFamily family() const { return family_; }
  const Signature& signature() const { return sig_; }
  const Ordinal& order_type() const { return alpha_; }
  std::optional<int> size() const;  // finite-order only
  bool rigid() const;
  bool is_order() const { return family_ != StructureFamily::rational_vector_space; }
  std::string describe() const;

  bool less(Elem a, Elem b) const;  // order families
  Ordinal element_ordinal(Elem e) const;
  mpq_class element_rational(Elem e) const;
  VecQ element_vector(Elem e) const;
  // Index of an element whose vector equals v, searching the first `window`
  // elements; nullopt when not explored.
  std::optional<Elem> find_vector(const VecQ& v, int window) const;

  // Inverse lookups used by game candidate pools. Both grow the enumeration
  // as needed; nullopt when the value lies outside the structure.
  std::optional<Elem> element_for_ordinal(const Ordinal& o) const;
  Elem element_for_rational(const mpq_class& q) const;

  bool eval_atom(size_t symbol, const Tuple& args) const;

 private:
  Elem image(Elem e) const;  // apply the presentation permutation

  StructureFamily family_ = StructureFamily::finite_order;
  Signature sig_;
  Ordinal alpha_;   // ordinal-order
  int finite_n_ = 0;
  std::vector<Elem> perm_;  // permutation of an initial window; id beyond

  // ordinal-order engine: elements enumerate coefficient vectors
  struct OrdEngine;
  std::shared_ptr<OrdEngine> ord_;
  struct VecEngine;
  std::shared_ptr<VecEngine> vec_;
};

// Finite injective map between element spaces, insertion order retained.
// Domains built by the constructions are initial segments of the fresh
// constant set B, so the map is essentially its range tuple.
class PartialMap {
 public:
  PartialMap() = default;

  size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  void add(int32_t from, Elem to);  // throws on domain/range collision
  std::optional<Elem> apply(int32_t from) const;
  int32_t dom_at(size_t i) const { return pairs_[i].first; }
  Elem ran_at(size_t i) const { return pairs_[i].second; }
  PartialMap prefix(size_t k) const;
  Tuple range_tuple() const;
  std::vector<int32_t> domain_tuple() const;
  bool contains_range(Elem e) const;
  // True when `other` extends this map (pairwise, in insertion order).
  bool prefix_of(const PartialMap& other) const;

  bool operator==(const PartialMap&) const = default;

 private:
  std::vector<std::pair<int32_t, Elem>> pairs_;
};

// The stage-s finite atomic diagram: all signed facts over elements
// {0..s-1} using the first s symbols.
std::vector<Fact> diagram_at(const Presentation& p, int s);

// Facts phi(b) for symbols among the first n_symbols with P |= phi(p(b)),
// args expressed in the domain space of p.
std::vector<Fact> pullback(const Presentation& p, const PartialMap& map,
                           size_t n_symbols);

// True iff some automorphism of P carries a to b coordinatewise. Decided by
// the family engine: well-orders are rigid, Q is order-homogeneous, vector
// spaces compare linear-dependence patterns on the explored span.
bool auto_type_equal(const Presentation& p, const Tuple& a, const Tuple& b);

// All tuples over [0, max_elem) of length 1..max_len in (length, lex) order.
std::vector<Tuple> canonical_tuples(const Presentation& p, int max_len,
                                    int max_elem);
// Position in the canonical order; lower is "less". Tuples first compare by
// length, then lexicographically.
bool tuple_canonical_less(const Tuple& a, const Tuple& b);

Tuple concat(const Tuple& a, const Tuple& b);

std::string tuple_to_string(const Tuple& t);

// Exact rational linear algebra over the explored span.
int rank_of(const std::vector<VecQ>& vs);
bool vectors_equal(const VecQ& a, const VecQ& b);
VecQ vec_add(const VecQ& a, const VecQ& b);
VecQ vec_scale(const mpq_class& c, const VecQ& a);
// Basis of the null space of the matrix whose columns are vs (kernel of the
// coordinate map Q^n -> V), in reduced row echelon form.
std::vector<std::vector<mpq_class>> relation_kernel(const std::vector<VecQ>& vs);

}  // namespace forge
