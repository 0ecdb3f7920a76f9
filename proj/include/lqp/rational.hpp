#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lqp {

/// Exact rational arithmetic on 64-bit components.
///
/// Integrability exponents (p, p', n/p - k, rate products like s*p*alpha)
/// must be compared exactly: "n/p is an integer" and "exponent == -1" are
/// branch conditions, not approximations.  All intermediates go through
/// __int128 and anything that cannot be renormalized into 64 bits throws
/// std::overflow_error.  The domain keeps numerators tiny, so an overflow
/// here means a bug upstream, not a capacity problem.
class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}
  Rational(long long n, long long d) { assign(n, d); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Accepts "3", "-7" and "3/2".  Anything else (decimals included) is
  /// rejected so callers cannot smuggle in non-exact exponents.
  static Rational parse(const std::string& text);

  friend Rational operator-(const Rational& r) {
    Rational out;
    out.num_ = -r.num_;
    out.den_ = r.den_;
    return out;
  }
  friend Rational operator+(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                   i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + (-b);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

private:
  using i128 = __int128;

  void assign(long long n, long long d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    num_ = n;
    den_ = d;
  }

  static Rational from128(i128 n, i128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    i128 an = n < 0 ? -n : n;
    i128 g = gcd128(an, d);
    if (g > 1) { n /= g; d /= g; }
    constexpr i128 lo = INT64_MIN, hi = INT64_MAX;
    if (n < lo || n > hi || d > hi)
      throw std::overflow_error("rational arithmetic overflow");
    Rational out;
    out.num_ = static_cast<long long>(n);
    out.den_ = static_cast<long long>(d);
    return out;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
  }

  long long num_;
  long long den_;
};

inline Rational Rational::parse(const std::string& text) {
  auto parse_int = [](const std::string& s) -> long long {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size())
      throw std::invalid_argument("bad rational literal: '" + s + "'");
    return v;
  };
  auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_int(text));
  return Rational(parse_int(text.substr(0, slash)),
                  parse_int(text.substr(slash + 1)));
}

/// t -> rational power, used where exponents are exact but the base is a
/// floating sample.  Integer exponents stay in pure multiplication.
double pow_rational(double base, const Rational& e);

}  // namespace lqp
