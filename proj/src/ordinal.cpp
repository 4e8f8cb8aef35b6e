#include "forge/ordinal.hpp"

#include <cctype>
#include <sstream>

namespace forge {

Ordinal Ordinal::nat(uint64_t n) {
  Ordinal o;
  if (n > 0) o.terms_.push_back(Term{Ordinal(), n});
  return o;
}

Ordinal Ordinal::omega() { return omega_pow(nat(1), 1); }

Ordinal Ordinal::omega_pow(const Ordinal& exponent, uint64_t coeff) {
  if (coeff == 0) throw std::invalid_argument("omega_pow: coeff must be >= 1");
  if (exponent.is_zero()) return nat(coeff);
  Ordinal o;
  o.terms_.push_back(Term{exponent, coeff});
  return o;
}

Ordinal Ordinal::omega_omega() { return omega_pow(omega(), 1); }

std::optional<uint64_t> Ordinal::as_nat() const {
  if (terms_.empty()) return 0;
  if (terms_.size() == 1 && terms_[0].exponent.is_zero()) return terms_[0].coeff;
  return std::nullopt;
}

Cmp compare(const Ordinal& a, const Ordinal& b) {
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  size_t n = std::min(ta.size(), tb.size());
  for (size_t i = 0; i < n; ++i) {
    Cmp ce = compare(ta[i].exponent, tb[i].exponent);
    if (ce != Cmp::equal) return ce;
    if (ta[i].coeff != tb[i].coeff)
      return ta[i].coeff < tb[i].coeff ? Cmp::less : Cmp::greater;
  }
  if (ta.size() == tb.size()) return Cmp::equal;
  return ta.size() < tb.size() ? Cmp::less : Cmp::greater;
}

bool Ordinal::operator==(const Ordinal& o) const {
  return compare(*this, o) == Cmp::equal;
}
bool Ordinal::operator<(const Ordinal& o) const {
  return compare(*this, o) == Cmp::less;
}

Ordinal::Kind Ordinal::kind() const {
  if (terms_.empty()) return Kind::zero;
  return terms_.back().exponent.is_zero() ? Kind::successor : Kind::limit;
}

Ordinal Ordinal::successor() const {
  Ordinal o = *this;
  if (!o.terms_.empty() && o.terms_.back().exponent.is_zero())
    o.terms_.back().coeff += 1;
  else
    o.terms_.push_back(Term{Ordinal(), 1});
  return o;
}

Ordinal Ordinal::predecessor() const {
  if (kind() != Kind::successor)
    throw std::invalid_argument("predecessor: not a successor ordinal");
  Ordinal o = *this;
  if (o.terms_.back().coeff > 1)
    o.terms_.back().coeff -= 1;
  else
    o.terms_.pop_back();
  return o;
}

Ordinal Ordinal::append_term(const Ordinal& exponent, uint64_t coeff) const {
  if (coeff == 0) return *this;
  Ordinal o = *this;
  if (!o.terms_.empty()) {
    Cmp c = compare(exponent, o.terms_.back().exponent);
    if (c == Cmp::greater)
      throw std::invalid_argument("append_term: exponent not decreasing");
    if (c == Cmp::equal) {
      o.terms_.back().coeff += coeff;
      return o;
    }
  }
  o.terms_.push_back(Term{exponent, coeff});
  return o;
}

Ordinal fundamental_sequence(const Ordinal& lambda, uint64_t n) {
  if (!lambda.is_limit())
    throw std::invalid_argument("fundamental_sequence: not a limit ordinal");
  const auto& ts = lambda.terms();
  Ordinal prefix;
  for (size_t i = 0; i + 1 < ts.size(); ++i)
    prefix = prefix.append_term(ts[i].exponent, ts[i].coeff);
  const Ordinal& e = ts.back().exponent;
  uint64_t c = ts.back().coeff;
  if (c > 1) {
    // g + w^e*c  ->  g + w^e*(c-1) + (w^e)[n]
    Ordinal head = prefix.append_term(e, c - 1);
    Ordinal tail = fundamental_sequence(Ordinal::omega_pow(e, 1), n);
    for (const auto& t : tail.terms()) head = head.append_term(t.exponent, t.coeff);
    return head;
  }
  if (e.is_successor()) {
    // g + w^(k+1)  ->  g + w^k * n
    if (n == 0) return prefix;
    return prefix.append_term(e.predecessor(), n);
  }
  // g + w^lambda'  ->  g + w^(lambda'[n])
  return prefix.append_term(fundamental_sequence(e, n), 1);
}

std::vector<Ordinal> ordinals_upto(const Ordinal& bound, size_t count,
                                   const Ordinal& offset) {
  std::vector<Ordinal> out;
  Ordinal cur = offset;
  while (out.size() < count && cur < bound) {
    out.push_back(cur);
    cur = cur.successor();
  }
  return out;
}

std::string Ordinal::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << "+";
    first = false;
    if (t.exponent.is_zero()) {
      os << t.coeff;
      continue;
    }
    os << "w";
    if (!(t.exponent == Ordinal::nat(1))) {
      auto en = t.exponent.as_nat();
      if (en)
        os << "^" << *en;
      else
        os << "^(" << t.exponent.to_string() << ")";
    }
    os << "*" << t.coeff;
  }
  return os.str();
}

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("ordinal parse error at position " +
                                std::to_string(pos) + ": " + msg + " in '" + s +
                                "'");
  }

  bool eat(char c) {
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  uint64_t number() {
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
      fail("expected number");
    uint64_t v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + static_cast<uint64_t>(s[pos] - '0');
      ++pos;
    }
    return v;
  }

  Ordinal exponent() {
    if (eat('(')) {
      Ordinal o = ordinal();
      if (!eat(')')) fail("expected ')'");
      return o;
    }
    if (pos < s.size() && s[pos] == 'w') return term();
    return Ordinal::nat(number());
  }

  Ordinal term() {
    if (eat('w')) {
      Ordinal e = Ordinal::nat(1);
      if (eat('^')) e = exponent();
      uint64_t c = 1;
      if (eat('*')) c = number();
      if (e.is_zero()) return Ordinal::nat(c);
      return Ordinal::omega_pow(e, c);
    }
    return Ordinal::nat(number());
  }

  Ordinal ordinal() {
    Ordinal acc = term();
    while (eat('+')) {
      Ordinal t = term();
      if (t.is_zero()) fail("zero term in sum");
      if (acc.is_zero()) fail("leading zero term in sum");
      const auto& tt = t.terms();
      Ordinal res = acc;
      for (const auto& x : tt) {
        if (compare(x.exponent, res.terms().back().exponent) != Cmp::less)
          fail("exponents must be strictly decreasing");
        res = res.append_term(x.exponent, x.coeff);
      }
      acc = res;
    }
    return acc;
  }
};

}  // namespace

Ordinal Ordinal::parse(const std::string& text) {
  Parser p(text);
  Ordinal o = p.ordinal();
  if (p.pos != text.size()) p.fail("trailing characters");
  return o;
}

Ordinal parse_ordinal_below(const std::string& text, const Ordinal& bound) {
  Ordinal o = Ordinal::parse(text);
  if (!(o < bound))
    throw std::invalid_argument("ordinal '" + text + "' not below bound " +
                                bound.to_string());
  return o;
}

}  // namespace forge
