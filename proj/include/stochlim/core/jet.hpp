#pragma once

#include <cmath>
#include <vector>

#include "stochlim/core/error.hpp"

namespace stochlim {

/// Truncated Taylor series c_0 + c_1 h + ... + c_K h^K of a real function
/// about a point. Arithmetic propagates exact derivatives up to order K.
class Jet {
 public:
  explicit Jet(int order, double value = 0.0) : c_(static_cast<std::size_t>(order) + 1, 0.0) {
    c_[0] = value;
  }

  static Jet variable(double x0, int order) {
    Jet j(order, x0);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  double value() const { return c_[0]; }

  /// n-th derivative at the expansion point.
  double derivative(int n) const {
    if (n > order()) throw Error(ErrorKind::capability, "jet order exceeded");
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    return c_[static_cast<std::size_t>(n)] * fact;
  }

  Jet& operator+=(const Jet& o) {
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
  friend Jet operator-(Jet a) { return a *= -1.0; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const int n = a.order();
    Jet r(n);
    for (int k = 0; k <= n; ++k) {
      double s = 0.0;
      for (int j = 0; j <= k; ++j) s += a[j] * b[k - j];
      r[k] = s;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    const int n = a.order();
    Jet q(n);
    for (int k = 0; k <= n; ++k) {
      double s = a[k];
      for (int j = 1; j <= k; ++j) s -= b[j] * q[k - j];
      q[k] = s / b[0];
    }
    return q;
  }

  friend Jet exp(const Jet& a) {
    const int n = a.order();
    Jet e(n, std::exp(a[0]));
    for (int k = 1; k <= n; ++k) {
      double s = 0.0;
      for (int j = 1; j <= k; ++j) s += j * a[j] * e[k - j];
      e[k] = s / k;
    }
    return e;
  }

  friend Jet sqrt(const Jet& a) {
    const int n = a.order();
    Jet r(n, std::sqrt(a[0]));
    for (int k = 1; k <= n; ++k) {
      double s = a[k];
      for (int j = 1; j < k; ++j) s -= r[j] * r[k - j];
      r[k] = s / (2.0 * r[0]);
    }
    return r;
  }

  friend Jet pow(const Jet& a, int p) {
    Jet r(a.order(), 1.0);
    for (int i = 0; i < p; ++i) r = r * a;
    return r;
  }

 private:
  std::vector<double> c_;
};

}  // namespace stochlim
