#pragma once
#include <cstdint>
#include <numeric>
#include <ostream>

#include "driftlab/errors.hpp"

namespace driftlab {

// Exact rational on 64-bit integers, always kept normalized (gcd 1, den > 0).
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rat() noexcept : num(0), den(1) {}
  constexpr Rat(std::int64_t n) : num(n), den(1) {}
  Rat(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw DomainError("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Rat operator+(Rat a, Rat b) { return Rat(a.num * b.den + b.num * a.den, a.den * b.den); }
  friend Rat operator-(Rat a, Rat b) { return Rat(a.num * b.den - b.num * a.den, a.den * b.den); }
  friend Rat operator*(Rat a, Rat b) { return Rat(a.num * b.num, a.den * b.den); }
  friend Rat operator/(Rat a, Rat b) { return Rat(a.num * b.den, a.den * b.num); }
  friend Rat operator-(Rat a) { return Rat(-a.num, a.den); }
  friend bool operator==(Rat a, Rat b) { return a.num == b.num && a.den == b.den; }
  friend bool operator!=(Rat a, Rat b) { return !(a == b); }
  Rat& operator+=(Rat b) { return *this = *this + b; }
  Rat& operator-=(Rat b) { return *this = *this - b; }
  Rat& operator*=(Rat b) { return *this = *this * b; }

  friend std::ostream& operator<<(std::ostream& os, Rat r) {
    os << r.num;
    if (r.den != 1) os << '/' << r.den;
    return os;
  }
};

}  // namespace driftlab
