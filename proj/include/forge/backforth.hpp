#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "forge/ordinal.hpp"
#include "forge/presentation.hpp"
#include "forge/qformula.hpp"

namespace forge {

// Thrown when a bounded witness search comes up empty: either the bound is
// too small or no witness exists (e.g. the structure is categorical at the
// requested level).
struct SearchExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a construction detects a broken invariant; the message carries
// the context dump.
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Leq0Variant { paper_truncated, full_qf };

std::string variant_name(Leq0Variant v);
Leq0Variant variant_from_name(const std::string& s);

// Desk-scale quantifier caps. These are part of the registered semantics of
// the relations on infinite structures: one-shot game extensions range over
// distinct tuples of length <= game_ext_len drawn from the per-query
// candidate pool, freeness adversaries over canonical tuples of length <=
// adversary_len on the first adversary_max_elem elements.
struct SearchBound {
  int game_ext_len = 2;
  int adversary_len = 2;
  int adversary_max_elem = 6;
  int offset_coeff = 4;        // max coefficient in ordinal offset candidates
  int pool_cap = 64;           // cap on per-query candidate pools
  int free_len = 2;            // max length of candidate free tuples
  int free_max_elem = 24;      // canonical pool for find_free_tuple
  int limit_samples = 6;       // fundamental-sequence samples at limit levels
  int retry_margin = 6;        // placement retries in construction helpers
  uint64_t node_budget = 4'000'000;

  static SearchBound defaults() { return SearchBound{}; }
  // Wider caps for freeness searches inside constructions (the not-leq side
  // needs game extensions longer than the adversaries can pin).
  static SearchBound construction() {
    SearchBound b;
    b.game_ext_len = 3;
    b.adversary_len = 2;
    return b;
  }
};

enum class Tri { no, yes, unknown };

// Base relation of Def-style back-and-forth calculus. full_qf compares the
// complete atomic types (quantifier-free formulas are closed under
// negation, so one-directional preservation collapses to equality);
// paper_truncated checks only the godel-v1 formulas with index below the
// compared length, preservation left to right.
bool leq0(const Presentation& p, const Tuple& a, const Tuple& b,
          Leq0Variant v);

// a <=_beta b: for every extension d of b there is an extension c of a with
// (b+d) <=_{beta'} (a+c). Exact on finite orders; on infinite families exact
// relative to the registered candidate reduction. `unknown` only at limit
// beta (sampled fundamental sequence) or on node-budget exhaustion.
Tri leq_beta(const Presentation& p, const Tuple& a, const Tuple& b,
             const Ordinal& beta, Leq0Variant v, const SearchBound& bound);

// Independent brute-force game oracle for finite orders: plain recursion
// straight from the definition, every beta' < beta, full quantification over
// the domain (same registered extension caps).
bool ef_oracle(const Presentation& p, const Tuple& a, const Tuple& b,
               const Ordinal& beta, Leq0Variant v, const SearchBound& bound);

struct FreenessVerdict {
  enum class Kind { free, not_free, unknown };
  struct Witness {
    Tuple adversary;
    Tuple a_prime;
    Tuple a1_prime;
  };
  Kind kind = Kind::unknown;
  std::vector<Witness> witnesses;  // free: one entry per tested adversary
  Tuple refuting;                  // not_free: adversary with no witness
  std::string note;

  bool is_free() const { return kind == Kind::free; }
};

// Def-4.2-style freeness of `a` over `c`, adversaries ranging over canonical
// tuples up to the bound. Never reports an unproven negative: not_free
// carries the refuting adversary for which the witness search was exhausted.
FreenessVerdict is_alpha_free(const Presentation& p, const Tuple& c,
                              const Tuple& a, const Ordinal& alpha,
                              Leq0Variant v, const SearchBound& bound);

// Least tuple (canonical order) with a `free` verdict; throws SearchExhausted
// when no candidate within the bound is free.
Tuple find_free_tuple(const Presentation& p, const Tuple& c,
                      const Ordinal& alpha, Leq0Variant v,
                      const SearchBound& bound);

// Monotone-in-s enumeration approximating { (beta, a, b) : a <=_beta b }.
struct FriendlinessEntry {
  Ordinal beta;
  Tuple a, b;
  bool operator==(const FriendlinessEntry&) const = default;
};
std::vector<FriendlinessEntry> friendliness_table(const Presentation& p,
                                                  const Ordinal& beta_max,
                                                  int s, Leq0Variant v);

// --- construction helpers -------------------------------------------------

// Find c with x <=_beta (base + c) and |base + c| = |x|. `base` must satisfy
// base <=_{beta+1} x|_{|base|} for the search to be guaranteed; aborts with
// SearchExhausted otherwise.
Tuple extend_match(const Presentation& p, const Tuple& x, const Tuple& base,
                   const Ordinal& beta, Leq0Variant v,
                   const SearchBound& bound);

// Find (a_new, tail_new) replacing x's slot block [slot_lo, slot_hi) and its
// tail so that the whole tuple y satisfies x <=_beta y, y|_{slot_lo} =
// x|_{slot_lo}, and y's slot block has a different automorphism type over the
// prefix than `reference` (which defaults to x's own slot block).
Tuple break_slot_type(const Presentation& p, const Tuple& x, size_t slot_lo,
                      size_t slot_hi, const Ordinal& beta, Leq0Variant v,
                      const SearchBound& bound);

}  // namespace forge
