#include "ttcv/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace ttcv {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational::Rational(long long value) : v_(static_cast<long>(value)) {
  // mpz from long covers long long on LP64; guard other models via string.
  if (static_cast<long long>(static_cast<long>(value)) != value) {
    v_ = mpq_class(std::to_string(value));
  }
}

Rational::Rational(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  v_ = mpq_class(std::to_string(num) + "/" + std::to_string(den < 0 ? -den : den));
  if (den < 0) v_ = -v_;
  v_.canonicalize();
}

std::optional<Rational> Rational::try_parse(std::string_view text) {
  std::string_view num = text;
  std::string_view den;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
    if (!all_digits(den)) return std::nullopt;
  }
  if (!num.empty() && num.front() == '-') num.remove_prefix(1);
  if (!all_digits(num)) return std::nullopt;
  mpq_class v(std::string(text), 10);
  if (v.get_den() == 0) return std::nullopt;
  v.canonicalize();
  return Rational(std::move(v));
}

Rational Rational::from_string(std::string_view text) {
  auto parsed = try_parse(text);
  if (!parsed) {
    throw std::invalid_argument("Rational: malformed literal \"" + std::string(text) + "\"");
  }
  return *parsed;
}

std::string Rational::str() const {
  return v_.get_str();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  v_ /= o.v_;
  return *this;
}

}  // namespace ttcv
