#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace relat {

// Exact rational arithmetic. Values used as relation indices live in [0,1]
// and addition there is capped at 1, but the type itself is a plain
// normalized fraction so oracles can reuse it.
struct Rat {
  long long num = 0;
  long long den = 1;

  constexpr Rat() = default;
  Rat(long long n, long long d = 1) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  static Rat zero() { return Rat(0); }
  static Rat one() { return Rat(1); }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return (__int128)a.num * b.den < (__int128)b.num * a.den;
  }
  friend bool operator<=(const Rat& a, const Rat& b) {
    return (__int128)a.num * b.den <= (__int128)b.num * a.den;
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator>=(const Rat& a, const Rat& b) { return b <= a; }

  friend Rat operator+(const Rat& a, const Rat& b) {
    long long g = std::gcd(a.den, b.den);
    long long d = a.den / g * b.den;
    long long n = a.num * (b.den / g) + b.num * (a.den / g);
    return Rat(n, d);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    long long g = std::gcd(a.den, b.den);
    long long d = a.den / g * b.den;
    long long n = a.num * (b.den / g) - b.num * (a.den / g);
    return Rat(n, d);
  }

  bool isZero() const { return num == 0; }
  bool isOne() const { return num == den; }

  std::string str() const {
    if (num == 0) return "0";
    if (num == den) return "1";
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

// Addition truncated at 1; this is the monoid used for metric indices.
inline Rat cappedAdd(const Rat& a, const Rat& b) {
  Rat s = a + b;
  return s > Rat::one() ? Rat::one() : s;
}

inline Rat ratMin(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat ratMax(const Rat& a, const Rat& b) { return a < b ? b : a; }

// Parses "p/q", "p", rejects anything else or values with q == 0.
Rat parseRat(const std::string& s);

}  // namespace relat
