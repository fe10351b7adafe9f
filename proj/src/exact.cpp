#include "chaoskit/exact.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "chaoskit/error.hpp"

namespace chaoskit {

namespace {

constexpr unsigned long kTrialLimit = 1000000UL;

Integer pow10(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw Error(ErrorCode::ParseError, "not a rational number: '" + std::string(text) + "'");
  };
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return fail();

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) return fail();
    Rational r = num / den;
    r.canonicalize();
    return r;
  }

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) return fail();
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) return fail();
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part))) {
      return fail();
    }
    digits = std::string(int_part) + std::string(frac_part);
    exponent -= static_cast<long>(frac_part.size());
  } else {
    if (!all_digits(s)) return fail();
    digits = std::string(s);
  }
  Rational r(Integer(digits, 10));
  if (exponent > 0) r *= pow10(static_cast<unsigned long>(exponent));
  if (exponent < 0) r /= pow10(static_cast<unsigned long>(-exponent));
  r.canonicalize();
  if (negative) r = -r;
  return r;
}

std::string to_string(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c.get_str();
}

Rational factorial(unsigned k) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), k);
  return Rational(r);
}

void square_decompose(const Integer& x, Integer& square, Integer& free) {
  if (x <= 0) throw Error(ErrorCode::ShapeMismatch, "square_decompose expects a positive integer");
  Integer rem = x;
  square = 1;
  free = 1;
  unsigned long p = 2;
  for (; p <= kTrialLimit; p += (p == 2 ? 1 : 2)) {
    if (Integer(p) * p > rem) break;
    if (mpz_divisible_ui_p(rem.get_mpz_t(), p) == 0) continue;
    unsigned e = 0;
    while (mpz_divisible_ui_p(rem.get_mpz_t(), p) != 0) {
      mpz_divexact_ui(rem.get_mpz_t(), rem.get_mpz_t(), p);
      ++e;
    }
    for (unsigned i = 0; i < e / 2; ++i) square *= p;
    if (e % 2 == 1) free *= p;
  }
  if (rem == 1) return;
  if (Integer(p) * p > rem) {
    free *= rem;  // prime cofactor
    return;
  }
  if (mpz_perfect_square_p(rem.get_mpz_t()) != 0) {
    Integer root;
    mpz_sqrt(root.get_mpz_t(), rem.get_mpz_t());
    square *= root;
    return;
  }
  // No factor below the limit: a cofactor below limit^3 is p or p*q, both squarefree.
  Integer limit3 = Integer(kTrialLimit) * kTrialLimit * kTrialLimit;
  if (rem < limit3) {
    free *= rem;
    return;
  }
  throw Error(ErrorCode::TooLarge, "radicand too large to certify squarefree");
}

Surd::Surd(const Rational& r) { add_term(Integer(1), r); }

Surd Surd::sqrt(const Rational& r) {
  if (r < 0) throw Error(ErrorCode::ShapeMismatch, "sqrt of a negative rational");
  Surd out;
  if (r == 0) return out;
  Rational c = r;
  c.canonicalize();
  Integer pq = c.get_num() * c.get_den();
  Integer square, free;
  square_decompose(pq, square, free);
  out.add_term(free, Rational(square, c.get_den()));
  return out;
}

bool Surd::is_rational() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 1);
}

std::optional<Rational> Surd::as_rational() const {
  if (terms_.empty()) return Rational(0);
  if (!is_rational()) return std::nullopt;
  return terms_.begin()->second;
}

double Surd::to_double() const { return static_cast<double>(to_long_double()); }

long double Surd::to_long_double() const {
  long double acc = 0.0L;
  for (const auto& [rad, coef] : terms_) {
    long double c = coef.get_d();
    if (rad == 1) {
      acc += c;
    } else {
      acc += c * std::sqrt(static_cast<long double>(rad.get_d()));
    }
  }
  return acc;
}

std::string Surd::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [rad, coef] : terms_) {
    Rational mag = coef;
    bool negative = mag < 0;
    if (negative) mag = -mag;
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    if (rad == 1) {
      os << to_string(mag);
    } else {
      if (mag != 1) os << to_string(mag) << '*';
      os << "sqrt(" << rad.get_str() << ')';
    }
  }
  return os.str();
}

void Surd::add_term(const Integer& radicand, const Rational& coef) {
  if (coef == 0) return;
  Rational c = coef;
  c.canonicalize();
  auto [it, inserted] = terms_.try_emplace(radicand, std::move(c));
  if (!inserted) {
    it->second += coef;
    if (it->second == 0) terms_.erase(it);
  }
}

Surd& Surd::operator+=(const Surd& o) {
  for (const auto& [rad, coef] : o.terms_) add_term(rad, coef);
  return *this;
}

Surd& Surd::operator-=(const Surd& o) {
  for (const auto& [rad, coef] : o.terms_) add_term(rad, -coef);
  return *this;
}

Surd& Surd::operator*=(const Rational& r) {
  if (r == 0) {
    terms_.clear();
    return *this;
  }
  Rational c = r;
  c.canonicalize();
  for (auto& [rad, coef] : terms_) coef *= c;
  return *this;
}

Surd& Surd::operator*=(const Surd& o) {
  if (o.is_rational()) return *this *= o.as_rational().value();
  if (is_rational()) {
    Rational r = as_rational().value();
    *this = o;
    return *this *= r;
  }
  Surd out;
  for (const auto& [ra, ca] : terms_) {
    for (const auto& [rb, cb] : o.terms_) {
      Integer g;
      mpz_gcd(g.get_mpz_t(), ra.get_mpz_t(), rb.get_mpz_t());
      Integer rad = (ra / g) * (rb / g);
      out.add_term(rad, ca * cb * Rational(g));
    }
  }
  terms_ = std::move(out.terms_);
  return *this;
}

Surd Surd::inverse() const {
  if (terms_.empty()) throw Error(ErrorCode::ShapeMismatch, "division by zero");
  if (terms_.size() != 1) throw Error(ErrorCode::ShapeMismatch, "inverse of a multi-term surd");
  const auto& [rad, coef] = *terms_.begin();
  Surd out;
  out.add_term(rad, Rational(1) / (coef * Rational(rad)));
  return out;
}

Surd Surd::pow(unsigned e) const {
  Surd result(1);
  Surd base = *this;
  while (e > 0) {
    if (e & 1U) result *= base;
    e >>= 1U;
    if (e > 0) base *= base;
  }
  return result;
}

std::string format_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool Number::is_zero(double tol) const {
  if (exact) return exact->is_zero();
  return std::fabs(approx) <= tol;
}

std::string Number::str() const { return exact ? exact->str() : format_double(approx); }

Number operator+(const Number& a, const Number& b) {
  if (a.exact && b.exact) return Number(*a.exact + *b.exact);
  return Number::inexact(a.approx + b.approx);
}

Number operator-(const Number& a, const Number& b) {
  if (a.exact && b.exact) return Number(*a.exact - *b.exact);
  return Number::inexact(a.approx - b.approx);
}

Number operator*(const Number& a, const Number& b) {
  if (a.exact && b.exact) return Number(*a.exact * *b.exact);
  return Number::inexact(a.approx * b.approx);
}

Number abs(const Number& x) {
  if (x.exact) {
    if (x.exact->is_zero()) return x;
    bool negative = x.exact->is_monomial() ? x.exact->terms().begin()->second < 0 : x.approx < 0;
    return negative ? -x : x;
  }
  return Number::inexact(std::fabs(x.approx));
}

Number divide(const Number& a, const Number& b) {
  if (a.exact && b.exact && b.exact->is_monomial() && !b.exact->is_zero()) {
    return Number(*a.exact * b.exact->inverse());
  }
  return Number::inexact(a.approx / b.approx);
}

}  // namespace chaoskit
