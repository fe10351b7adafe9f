#pragma once

// Exact scalar types used by every engine.
//
// Rational is GMP's mpq_class. Surd is an element of the field generated by
// square roots of rationals, stored as a finite sum r_1*sqrt(s_1) + ... with
// distinct squarefree integer radicands s_i >= 1. Kernel values are of the
// form w*sqrt(c2), so odd powers of a kernel scale stay inside this field.
// Number pairs an optional exact value with its double approximation and
// degrades to floating point as soon as one operand is inexact.

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace chaoskit {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "5", "-3/4", "0.25", "1e-3", "2.5e2" into an exact rational.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when q == 1).
std::string to_string(const Rational& r);

Rational factorial(unsigned k);

/// x = square^2 * free with free squarefree. Throws TooLarge when x has a
/// cofactor that cannot be certified squarefree by trial division.
void square_decompose(const Integer& x, Integer& square, Integer& free);

class Surd {
 public:
  Surd() = default;
  Surd(const Rational& r);  // NOLINT(google-explicit-constructor)
  Surd(long v) : Surd(Rational(v)) {}  // NOLINT(google-explicit-constructor)
  Surd(int v) : Surd(Rational(v)) {}   // NOLINT(google-explicit-constructor)

  /// sqrt(r) for r >= 0.
  static Surd sqrt(const Rational& r);

  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const;
  std::optional<Rational> as_rational() const;
  /// Single term r*sqrt(s) (including pure rationals and zero).
  bool is_monomial() const { return terms_.size() <= 1; }

  double to_double() const;
  long double to_long_double() const;
  std::string str() const;

  const std::map<Integer, Rational>& terms() const { return terms_; }

  Surd& operator+=(const Surd& o);
  Surd& operator-=(const Surd& o);
  Surd& operator*=(const Surd& o);
  Surd& operator*=(const Rational& r);

  /// Reciprocal of a monomial; throws ShapeMismatch for multi-term values.
  Surd inverse() const;
  Surd pow(unsigned e) const;

  friend Surd operator+(Surd a, const Surd& b) { return a += b; }
  friend Surd operator-(Surd a, const Surd& b) { return a -= b; }
  friend Surd operator*(Surd a, const Surd& b) { return a *= b; }
  friend Surd operator-(const Surd& a) { return Surd() - a; }
  friend bool operator==(const Surd& a, const Surd& b) { return a.terms_ == b.terms_; }

 private:
  void add_term(const Integer& radicand, const Rational& coef);
  std::map<Integer, Rational> terms_;
};

/// Exact-when-possible real. `approx` is always populated.
struct Number {
  std::optional<Surd> exact;
  double approx = 0.0;

  Number() : exact(Surd()) {}
  Number(const Surd& s) : exact(s), approx(s.to_double()) {}  // NOLINT
  Number(const Rational& r) : Number(Surd(r)) {}                // NOLINT
  static Number inexact(double v) {
    Number n;
    n.exact.reset();
    n.approx = v;
    return n;
  }

  bool is_exact() const { return exact.has_value(); }
  /// Exact zero test when exact, otherwise |approx| <= tol.
  bool is_zero(double tol = 0.0) const;
  /// "5/2", "1/2*sqrt(2)" when exact, shortest round-trip decimal otherwise.
  std::string str() const;

  friend Number operator+(const Number& a, const Number& b);
  friend Number operator-(const Number& a, const Number& b);
  friend Number operator*(const Number& a, const Number& b);
  friend Number operator-(const Number& a) { return Number() - a; }
  /// Exact comparison when both sides are exact, bitwise on approximations otherwise.
  friend bool operator==(const Number& a, const Number& b) {
    if (a.exact && b.exact) return *a.exact == *b.exact;
    return a.approx == b.approx;
  }
};

/// |x|; the sign of an exact multi-term value is decided by its approximation.
Number abs(const Number& x);
/// a / b where b is an exact monomial or either side is inexact.
Number divide(const Number& a, const Number& b);

std::string format_double(double v);

}  // namespace chaoskit
