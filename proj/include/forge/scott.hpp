#pragma once

#include <optional>
#include <string>
#include <vector>

#include "forge/presentation.hpp"

namespace forge {

// Hardcoded Scott families per structure family. Formulas are named by
// descriptor strings; each comes with an evaluator and an exists-y witness
// shape (phi = exists y kernel(x, y)) used by the T-set.
//   - orders of type omega: "pos:p1,...,pk" (exact predecessor counts),
//     kernel witnesses enumerate the initial segment below the top;
//   - the rationals: "pat:<order pattern>" (quantifier-free, empty witness);
//   - vector spaces: "dep:<relation kernel>" (linear dependence pattern),
//     kernel witnesses are greedy bases drawn from the tuple.
class ScottFamily {
 public:
  static ScottFamily for_family(StructureFamily f);  // throws on unsupported

  StructureFamily family() const { return family_; }

  // The unique family formula the tuple satisfies.
  std::string index_of(const Presentation& p, const Tuple& t,
                       int budget) const;
  bool satisfies(const Presentation& p, const Tuple& t,
                 const std::string& descriptor, int budget) const;
  // The canonical least witness for the existential quantifier.
  Tuple canonical_witness(const Presentation& p, const Tuple& t,
                          int budget) const;
  bool eval_kernel(const Presentation& p, const Tuple& t, const Tuple& witness,
                   const std::string& descriptor, int budget) const;

 private:
  StructureFamily family_ = StructureFamily::finite_order;
};

struct InvariantSet {
  enum class Kind { S, T };
  struct Entry {
    Tuple a;
    Tuple witness;  // T only: the minimal witness tuple
    std::string formula;
  };
  Kind kind = Kind::S;
  std::vector<Entry> entries;
  int bound = 0;

  // T-membership: upward closed in the witness coordinate (lex order).
  bool t_contains(const Tuple& a, const Tuple& b,
                  const std::string& formula) const;
  const Entry* find(const Tuple& a) const;
};

// S(B) = { (b, phi) : B |= phi(b) } over tuples of length <= max_len on the
// first `bound` elements.
InvariantSet compute_S(const Presentation& p, const ScottFamily& fam,
                       int bound, int max_len = 1);

// T(B): minimal-witness representation of the clause-(3) triples.
InvariantSet compute_T(const Presentation& p, const ScottFamily& fam,
                       int bound, int max_len = 1);

// Back-and-forth matching by formula indices; an isomorphism from the first
// `count` elements of A into B's explored window.
PartialMap iso_from_S(const Presentation& a, const Presentation& b,
                      const ScottFamily& fam, int count, int window);

InvariantSet S_from_T(const InvariantSet& t);
InvariantSet T_from_S(const InvariantSet& s, const Presentation& b,
                      const Presentation& a, const ScottFamily& fam,
                      int bound);

// Example-3.2 machinery for omega-type presentations.
std::vector<std::pair<Elem, Elem>> succ_relation(const Presentation& p,
                                                 int bound);
PartialMap iso_from_succ(const Presentation& p,
                         const std::vector<std::pair<Elem, Elem>>& succ);

// Example-3.3 machinery for vector spaces.
std::vector<Tuple> indep_relation(const Presentation& w, int bound,
                                  int max_len);
std::vector<Elem> basis_from_indep(const Presentation& w,
                                   const std::vector<Tuple>& indep, int bound);
PartialMap iso_from_basis(const Presentation& v, const Presentation& w,
                          const std::vector<Elem>& basis_v,
                          const std::vector<Elem>& basis_w, int window);

}  // namespace forge
