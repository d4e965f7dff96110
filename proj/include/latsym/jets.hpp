#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace latsym {

struct DomainError : std::runtime_error {
  int offset;  // byte offset of the offending subtree, -1 if not expression-borne
  explicit DomainError(const std::string& msg, int off = -1)
      : std::runtime_error(msg), offset(off) {}
};

/// Value of a scalar function of t together with its first three
/// t-derivatives.  Constants have v1 = v2 = v3 = 0.
struct Jet3 {
  double v0 = 0, v1 = 0, v2 = 0, v3 = 0;

  static Jet3 constant(double v) { return {v, 0, 0, 0}; }
  static Jet3 variable(double v) { return {v, 1, 0, 0}; }

  friend Jet3 operator+(const Jet3& a, const Jet3& b) {
    return {a.v0 + b.v0, a.v1 + b.v1, a.v2 + b.v2, a.v3 + b.v3};
  }
  friend Jet3 operator-(const Jet3& a, const Jet3& b) {
    return {a.v0 - b.v0, a.v1 - b.v1, a.v2 - b.v2, a.v3 - b.v3};
  }
  friend Jet3 operator-(const Jet3& a) { return {-a.v0, -a.v1, -a.v2, -a.v3}; }
  // Leibniz rule through order 3
  friend Jet3 operator*(const Jet3& a, const Jet3& b) {
    return {a.v0 * b.v0,
            a.v1 * b.v0 + a.v0 * b.v1,
            a.v2 * b.v0 + 2 * a.v1 * b.v1 + a.v0 * b.v2,
            a.v3 * b.v0 + 3 * a.v2 * b.v1 + 3 * a.v1 * b.v2 + a.v0 * b.v3};
  }
  friend Jet3 operator*(double s, const Jet3& a) {
    return {s * a.v0, s * a.v1, s * a.v2, s * a.v3};
  }
  friend Jet3 operator/(const Jet3& a, const Jet3& b) {
    if (b.v0 == 0) throw DomainError("division by zero");
    Jet3 q;
    q.v0 = a.v0 / b.v0;
    q.v1 = (a.v1 - q.v0 * b.v1) / b.v0;
    q.v2 = (a.v2 - 2 * q.v1 * b.v1 - q.v0 * b.v2) / b.v0;
    q.v3 = (a.v3 - 3 * q.v2 * b.v1 - 3 * q.v1 * b.v2 - q.v0 * b.v3) / b.v0;
    return q;
  }
};

/// Truncated Taylor series with runtime order (<= kMaxOrder).  Coefficients
/// c[k] = f^(k)/k!, so products are plain convolutions and the standard
/// series recurrences apply for the transcendental functions.
class Taylor {
 public:
  static constexpr int kMaxOrder = 7;

  Taylor() = default;
  explicit Taylor(int order) : n_(order + 1) { check_order(order); }

  static Taylor constant(double v, int order) {
    Taylor r(order);
    r.c_[0] = v;
    return r;
  }
  static Taylor variable(double v, int order) {
    Taylor r(order);
    r.c_[0] = v;
    if (order >= 1) r.c_[1] = 1;
    return r;
  }
  static Taylor from_coeffs(const double* c, int order) {
    Taylor r(order);
    for (int k = 0; k <= order; ++k) r.c_[k] = c[k];
    return r;
  }

  int order() const { return n_ - 1; }
  double value() const { return c_[0]; }
  double coeff(int k) const { return k < n_ ? c_[k] : 0.0; }
  double deriv(int k) const { return coeff(k) * factorial(k); }

  Jet3 jet3() const { return {deriv(0), deriv(1), deriv(2), deriv(3)}; }

  /// Series of f', one order lower.
  Taylor derivative() const {
    Taylor r(order() > 0 ? order() - 1 : 0);
    for (int k = 1; k < n_; ++k) r.c_[k - 1] = c_[k] * k;
    return r;
  }

  friend Taylor operator+(const Taylor& a, const Taylor& b) {
    Taylor r(std::min(a.order(), b.order()));
    for (int k = 0; k < r.n_; ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend Taylor operator-(const Taylor& a, const Taylor& b) {
    Taylor r(std::min(a.order(), b.order()));
    for (int k = 0; k < r.n_; ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }
  friend Taylor operator-(const Taylor& a) {
    Taylor r(a.order());
    for (int k = 0; k < r.n_; ++k) r.c_[k] = -a.c_[k];
    return r;
  }
  friend Taylor operator*(double s, const Taylor& a) {
    Taylor r(a.order());
    for (int k = 0; k < r.n_; ++k) r.c_[k] = s * a.c_[k];
    return r;
  }
  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r(std::min(a.order(), b.order()));
    for (int k = 0; k < r.n_; ++k) {
      double s = 0;
      for (int j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
      r.c_[k] = s;
    }
    return r;
  }
  friend Taylor operator/(const Taylor& a, const Taylor& b) {
    if (b.c_[0] == 0) throw DomainError("division by zero");
    Taylor r(std::min(a.order(), b.order()));
    for (int k = 0; k < r.n_; ++k) {
      double s = a.c_[k];
      for (int j = 1; j <= k; ++j) s -= b.c_[j] * r.c_[k - j];
      r.c_[k] = s / b.c_[0];
    }
    return r;
  }

  friend Taylor exp(const Taylor& a) {
    Taylor r(a.order());
    r.c_[0] = std::exp(a.c_[0]);
    for (int k = 1; k < r.n_; ++k) {
      double s = 0;
      for (int j = 1; j <= k; ++j) s += j * a.c_[j] * r.c_[k - j];
      r.c_[k] = s / k;
    }
    return r;
  }
  friend Taylor log(const Taylor& a) {
    if (a.c_[0] <= 0) throw DomainError("log of non-positive value");
    Taylor r(a.order());
    r.c_[0] = std::log(a.c_[0]);
    for (int k = 1; k < r.n_; ++k) {
      double s = a.c_[k];
      for (int j = 1; j < k; ++j) s -= j * r.c_[j] * a.c_[k - j] / k;
      r.c_[k] = s / a.c_[0];
    }
    return r;
  }
  friend Taylor sqrt(const Taylor& a) {
    if (a.c_[0] < 0) throw DomainError("sqrt of negative value");
    if (a.c_[0] == 0) throw DomainError("sqrt at zero has no derivatives");
    Taylor r(a.order());
    r.c_[0] = std::sqrt(a.c_[0]);
    for (int k = 1; k < r.n_; ++k) {
      double s = a.c_[k];
      for (int j = 1; j < k; ++j) s -= r.c_[j] * r.c_[k - j];
      r.c_[k] = s / (2 * r.c_[0]);
    }
    return r;
  }
  friend void sincos(const Taylor& a, Taylor& si, Taylor& co) {
    si = Taylor(a.order());
    co = Taylor(a.order());
    si.c_[0] = std::sin(a.c_[0]);
    co.c_[0] = std::cos(a.c_[0]);
    for (int k = 1; k <= a.order(); ++k) {
      double ss = 0, cs = 0;
      for (int j = 1; j <= k; ++j) {
        ss += j * a.c_[j] * co.c_[k - j];
        cs += j * a.c_[j] * si.c_[k - j];
      }
      si.c_[k] = ss / k;
      co.c_[k] = -cs / k;
    }
  }
  friend Taylor sin(const Taylor& a) {
    Taylor s, c;
    sincos(a, s, c);
    return s;
  }
  friend Taylor cos(const Taylor& a) {
    Taylor s, c;
    sincos(a, s, c);
    return c;
  }

  friend Taylor pow_int(const Taylor& a, long e) {
    if (e == 0) return Taylor::constant(1.0, a.order());
    bool inv = e < 0;
    unsigned long n = inv ? -(unsigned long)e : (unsigned long)e;
    Taylor acc = Taylor::constant(1.0, a.order());
    Taylor base = a;
    while (n) {
      if (n & 1) acc = acc * base;
      base = base * base;
      n >>= 1;
    }
    if (inv) return Taylor::constant(1.0, a.order()) / acc;
    return acc;
  }
  friend Taylor pow(const Taylor& a, const Taylor& b) {
    if (a.c_[0] <= 0)
      throw DomainError("pow with non-positive base and non-integer exponent");
    return exp(b * log(a));
  }

 private:
  static void check_order(int order) {
    if (order < 0 || order > kMaxOrder)
      throw std::logic_error("Taylor order out of range");
  }
  static double factorial(int k) {
    static const double f[] = {1, 1, 2, 6, 24, 120, 720, 5040};
    return f[k];
  }
  int n_ = 1;
  std::array<double, kMaxOrder + 1> c_{};
};

}  // namespace latsym
