#include "functal/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace functal {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      return Rational(BigInt(text));
    }
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument("malformed rational literal '" + text + "': " + e.what());
  }
}

std::string rational_to_string(const Rational& value) {
  const BigInt num = numerator(value);
  const BigInt den = denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational rationalize(double value, const BigInt& max_denominator) {
  if (!std::isfinite(value)) throw std::invalid_argument("cannot rationalize non-finite value");
  const bool negative = value < 0;
  double x = std::fabs(value);

  // Continued-fraction convergents p_k/q_k until the denominator bound.
  BigInt p_prev = 1, q_prev = 0;
  BigInt p_cur = BigInt(static_cast<long long>(std::floor(x)));
  BigInt q_cur = 1;
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 64 && frac > 1e-15; ++iter) {
    x = 1.0 / frac;
    const double fl = std::floor(x);
    if (fl > 9e18) break;
    BigInt a(static_cast<long long>(fl));
    BigInt p_next = a * p_cur + p_prev;
    BigInt q_next = a * q_cur + q_prev;
    if (q_next > max_denominator) break;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
    frac = x - fl;
  }
  Rational result(p_cur, q_cur);
  return negative ? Rational(-result) : result;
}

}  // namespace functal
