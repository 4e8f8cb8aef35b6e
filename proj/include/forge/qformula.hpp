#pragma once

#include <string>
#include <vector>

#include "forge/presentation.hpp"

namespace forge {

// Quantifier-free formulas over a relational signature, written in prefix
// notation over the token alphabet
//   R_0 < R_1 < ... < "=" < "~" < "&" < "|" < x_0 < x_1 < ...
// The registered numbering godel-v1 orders formulas by symbol length, ties
// broken lexicographically on the token sequence. Symbol length charges
// R_k and x_i at k+1 and i+1 (variables written in unary), connectives "~"
// at 50 and "&", "|" at 100, which keeps every length class finite and puts
// atomic facts first.
struct QFormula {
  enum class Kind { atom, eq, neg, conj, disj };
  Kind kind = Kind::atom;
  int32_t symbol = 0;           // atom: signature symbol index
  std::vector<int> vars;        // atom/eq argument variable indices
  std::vector<QFormula> sub;    // neg: 1 child, conj/disj: 2 children

  int max_var() const;
  std::string to_string(const Signature& sig) const;

  bool eval(const Presentation& p, const Tuple& t) const;
};

// The first `count` formulas of godel-v1 for this signature. Cached; the
// returned reference stays valid for the process lifetime.
const std::vector<QFormula>& godel_v1(const Signature& sig, size_t count);

}  // namespace forge
