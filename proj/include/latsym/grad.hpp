#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "latsym/jets.hpp"

namespace latsym {

/// Forward-mode dual number with N partial-derivative slots.
template <int N>
struct Grad {
  double v = 0;
  std::array<double, N> d{};

  static Grad constant(double x) {
    Grad g;
    g.v = x;
    return g;
  }
  static Grad seeded(double x, int slot) {
    Grad g;
    g.v = x;
    g.d[slot] = 1;
    return g;
  }

  friend Grad operator+(const Grad& a, const Grad& b) {
    Grad r;
    r.v = a.v + b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
  }
  friend Grad operator-(const Grad& a, const Grad& b) {
    Grad r;
    r.v = a.v - b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
    return r;
  }
  friend Grad operator-(const Grad& a) {
    Grad r;
    r.v = -a.v;
    for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend Grad operator*(const Grad& a, const Grad& b) {
    Grad r;
    r.v = a.v * b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend Grad operator*(double s, const Grad& a) {
    Grad r;
    r.v = s * a.v;
    for (int i = 0; i < N; ++i) r.d[i] = s * a.d[i];
    return r;
  }
  friend Grad operator/(const Grad& a, const Grad& b) {
    if (b.v == 0) throw DomainError("division by zero");
    Grad r;
    r.v = a.v / b.v;
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
    return r;
  }

  friend Grad exp(const Grad& a) {
    Grad r;
    r.v = std::exp(a.v);
    for (int i = 0; i < N; ++i) r.d[i] = r.v * a.d[i];
    return r;
  }
  friend Grad log(const Grad& a) {
    if (a.v <= 0) throw DomainError("log of non-positive value");
    Grad r;
    r.v = std::log(a.v);
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] / a.v;
    return r;
  }
  friend Grad sqrt(const Grad& a) {
    if (a.v < 0) throw DomainError("sqrt of negative value");
    if (a.v == 0) throw DomainError("sqrt at zero has no derivatives");
    Grad r;
    r.v = std::sqrt(a.v);
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] / (2 * r.v);
    return r;
  }
  friend Grad sin(const Grad& a) {
    Grad r;
    r.v = std::sin(a.v);
    double c = std::cos(a.v);
    for (int i = 0; i < N; ++i) r.d[i] = c * a.d[i];
    return r;
  }
  friend Grad cos(const Grad& a) {
    Grad r;
    r.v = std::cos(a.v);
    double s = std::sin(a.v);
    for (int i = 0; i < N; ++i) r.d[i] = -s * a.d[i];
    return r;
  }
  friend Grad pow_int(const Grad& a, long e) {
    if (e == 0) return constant(1.0);
    bool inv = e < 0;
    unsigned long n = inv ? -(unsigned long)e : (unsigned long)e;
    Grad acc = constant(1.0);
    Grad base = a;
    while (n) {
      if (n & 1) acc = acc * base;
      base = base * base;
      n >>= 1;
    }
    if (inv) return constant(1.0) / acc;
    return acc;
  }
  friend Grad pow(const Grad& a, const Grad& b) {
    if (a.v <= 0)
      throw DomainError("pow with non-positive base and non-integer exponent");
    return exp(b * log(a));
  }
};

}  // namespace latsym
