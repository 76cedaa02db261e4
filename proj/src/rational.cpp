#include "logcap/rational.hpp"

#include <cmath>

#include "logcap/errors.hpp"

namespace logcap {

namespace {

double log_abs_mpz(const mpz_class& z) {
  long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, z.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp2) * M_LN2;
}

}  // namespace

Rational::Rational(long num, long den) {
  if (den == 0) throw InvalidArgument("Rational: zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("Rational::from_double: non-finite value");
  return Rational(mpq_class(x));
}

Rational Rational::parse(const std::string& text) {
  if (text.empty()) throw InvalidArgument("Rational::parse: empty string");
  auto dot = text.find('.');
  auto exp_pos = text.find_first_of("eE");
  try {
    if (dot == std::string::npos && exp_pos == std::string::npos) {
      mpq_class q(text, 10);
      if (q.get_den() == 0) throw InvalidArgument("Rational::parse: zero denominator");
      q.canonicalize();
      return Rational(q);
    }
    // Decimal literal, possibly with exponent: parse exactly.
    std::string mantissa = exp_pos == std::string::npos ? text : text.substr(0, exp_pos);
    long exponent = exp_pos == std::string::npos ? 0 : std::stol(text.substr(exp_pos + 1));
    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false;
    for (char c : mantissa) {
      if (c == '.') {
        seen_dot = true;
      } else {
        digits.push_back(c);
        if (seen_dot && c >= '0' && c <= '9') ++frac_digits;
      }
    }
    mpz_class num(digits, 10);
    mpq_class q(num);
    long shift = exponent - frac_digits;
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    if (shift < 0) {
      q /= p10;
    } else {
      q *= p10;
    }
    q.canonicalize();
    return Rational(q);
  } catch (const std::invalid_argument&) {
    throw InvalidArgument("Rational::parse: malformed number '" + text + "'");
  }
}

Rational Rational::pow2(long exponent) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  mpq_class q = exponent < 0 ? mpq_class(mpz_class(1), p) : mpq_class(p);
  return Rational(q);
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.q_ == 0) throw InvalidArgument("Rational: division by zero");
  q_ /= o.q_;
  return *this;
}

double Rational::log_abs() const {
  if (q_ == 0) throw InvalidArgument("Rational::log_abs: zero");
  return log_abs_mpz(q_.get_num()) - log_abs_mpz(q_.get_den());
}

std::string Rational::decimal_str() const {
  mpz_class den = q_.get_den();
  unsigned long twos = mpz_scan1(den.get_mpz_t(), 0);
  mpz_class rest = den >> twos;
  unsigned long fives = 0;
  while (mpz_divisible_ui_p(rest.get_mpz_t(), 5)) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) return str();
  unsigned long digits = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  mpz_class scaled = q_.get_num() * scale / den;
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string s = scaled.get_str();
  if (digits == 0) return (neg ? "-" : "") + s;
  if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
  s.insert(s.size() - digits, ".");
  return (neg ? "-" : "") + s;
}

}  // namespace logcap
