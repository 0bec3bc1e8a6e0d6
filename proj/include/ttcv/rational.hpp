#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace ttcv {

// Exact rational number. Always held in canonical form: lowest terms,
// denominator > 0, zero represented as 0/1. Arithmetic never rounds.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long long value);
  // Throws std::invalid_argument if den == 0.
  Rational(long long num, long long den);

  // Accepts "p" or "p/q" with optional leading '-', base 10, q > 0 after
  // canonicalization. Rejects whitespace, '+', empty parts, and zero
  // denominators. from_string throws std::invalid_argument; try_parse
  // returns nullopt instead.
  static Rational from_string(std::string_view text);
  static std::optional<Rational> try_parse(std::string_view text);

  // Canonical form: "p/q", or just "p" when the denominator is 1.
  std::string str() const;

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_one() const { return v_ == 1; }
  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  // Throws std::domain_error on division by zero.
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

 private:
  explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  mpq_class v_;
};

}  // namespace ttcv
