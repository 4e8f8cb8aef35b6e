#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace forge {

// Ordinal notations in Cantor normal form: a sum w^e0*c0 + w^e1*c1 + ...
// with e0 > e1 > ... and all ci >= 1. The empty sum is 0. Exponents are
// ordinals themselves; under the default bound w^w every exponent is a
// natural number.
class Ordinal {
 public:
  struct Term;

  Ordinal() = default;

  static Ordinal nat(uint64_t n);
  static Ordinal omega();
  // w^exponent * coeff (coeff >= 1).
  static Ordinal omega_pow(const Ordinal& exponent, uint64_t coeff = 1);
  static Ordinal omega_omega();  // w^w, the default bound

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Value as a natural number, if the ordinal is finite.
  std::optional<uint64_t> as_nat() const;

  enum class Kind { zero, successor, limit };
  Kind kind() const;
  bool is_limit() const { return kind() == Kind::limit; }
  bool is_successor() const { return kind() == Kind::successor; }

  Ordinal successor() const;
  // Predecessor of a successor ordinal; throws on zero/limit.
  Ordinal predecessor() const;

  // Sum of this and a strictly smaller-leading ordinal; used internally by
  // fundamental sequences. General ordinal addition is a non-goal.
  Ordinal append_term(const Ordinal& exponent, uint64_t coeff) const;

  std::string to_string() const;
  static Ordinal parse(const std::string& text);  // throws std::invalid_argument

  bool operator==(const Ordinal& o) const;
  bool operator!=(const Ordinal& o) const { return !(*this == o); }
  bool operator<(const Ordinal& o) const;
  bool operator<=(const Ordinal& o) const { return *this == o || *this < o; }
  bool operator>(const Ordinal& o) const { return o < *this; }
  bool operator>=(const Ordinal& o) const { return o <= *this; }

 private:
  std::vector<Term> terms_;  // strictly decreasing exponents
};

struct Ordinal::Term {
  Ordinal exponent;
  uint64_t coeff = 1;
};

enum class Cmp { less, equal, greater };

Cmp compare(const Ordinal& a, const Ordinal& b);

// The n-th element of the canonical fundamental sequence of a limit ordinal:
//   w[n] = n, (g + w^(k+1))[n] = g + w^k * n, composite forms recurse on the
//   last term. Strictly increasing in n with supremum lambda.
Ordinal fundamental_sequence(const Ordinal& lambda, uint64_t n);

// The first `count` notations >= offset and < bound, stepping by successor.
// Returns fewer when the range is exhausted.
std::vector<Ordinal> ordinals_upto(const Ordinal& bound, size_t count,
                                   const Ordinal& offset = Ordinal());

// Checked parse: value must lie strictly below `bound`.
Ordinal parse_ordinal_below(const std::string& text, const Ordinal& bound);

}  // namespace forge
