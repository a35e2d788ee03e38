#pragma once

// Closed family of Schwartz test functions
//
//   f(x) = q(x - c) * exp(-a (x - c)^2) * exp(i k x),    a > 0, c, k real,
//
// with q a complex polynomial in the centred variable. The family is closed
// under differentiation, products, affine changes of variable, complex
// conjugation and the Fourier transform  f~(t) = \int e^{ixt} f(x) dx,
// so every derivative and transform used downstream is exact.
//
// The modulation exp(i k x) is what makes the family closed under the
// Fourier transform while keeping width and centre real.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "stochlim/core/error.hpp"
#include "stochlim/core/types.hpp"

namespace stochlim {

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

/// Coefficients of q(y + s) given coefficients of q(y).
inline std::vector<Complex> shift_poly(std::span<const Complex> q, double s) {
  const int n = static_cast<int>(q.size());
  std::vector<Complex> out(q.size(), Complex{});
  if (s == 0.0) return {q.begin(), q.end()};
  for (int m = 0; m < n; ++m) {
    if (q[m] == Complex{}) continue;
    double sp = 1.0;
    for (int j = m; j >= 0; --j) {
      out[j] += q[m] * binomial(m, j) * sp;
      sp *= s;
    }
  }
  return out;
}

inline std::vector<Complex> poly_mul(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Complex> r(a.size() + b.size() - 1, Complex{});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

template <class X>
X horner(std::span<const Complex> q, const X& y) {
  X r{};
  for (auto it = q.rbegin(); it != q.rend(); ++it) r = r * y + *it;
  return r;
}

inline void trim(std::vector<Complex>& q) {
  while (!q.empty() && q.back() == Complex{}) q.pop_back();
}

}  // namespace detail

class GaussPoly {
 public:
  GaussPoly() = default;

  /// q given in powers of (x - center).
  GaussPoly(std::vector<Complex> centred_coeffs, double width, double center = 0.0, double freq = 0.0)
      : q_(std::move(centred_coeffs)), a_(width), c_(center), k_(freq) {
    if (!(a_ > 0.0) || !std::isfinite(a_))
      throw Error(ErrorKind::unsupported_input, "GaussPoly width must be positive and finite");
    detail::trim(q_);
  }

  /// p(x) exp(-a (x-c)^2) with p given in powers of x.
  static GaussPoly from_power(std::span<const Complex> p, double width, double center = 0.0,
                              double freq = 0.0) {
    return {detail::shift_poly(p, center), width, center, freq};
  }

  /// exp(-a (x-c)^2), optionally scaled.
  static GaussPoly gaussian(double width, double center = 0.0, Complex scale = 1.0) {
    return {{scale}, width, center};
  }

  std::span<const Complex> coeffs() const { return q_; }
  double width() const { return a_; }
  double center() const { return c_; }
  double freq() const { return k_; }
  bool is_zero() const { return q_.empty(); }
  int degree() const { return static_cast<int>(q_.size()) - 1; }

  Complex operator()(double x) const {
    if (q_.empty()) return {};
    const double y = x - c_;
    return detail::horner<Complex>(q_, Complex{y}) * std::exp(Complex{-a_ * y * y, k_ * x});
  }

  /// Exact derivative, as a member of the family.
  GaussPoly derivative() const {
    if (q_.empty()) return *this;
    // d/dy [q e^{-a y^2 + i k y}] = (q' - 2 a y q + i k q) e^{...}
    std::vector<Complex> r(q_.size() + 1, Complex{});
    for (std::size_t m = 1; m < q_.size(); ++m) r[m - 1] += static_cast<double>(m) * q_[m];
    for (std::size_t m = 0; m < q_.size(); ++m) {
      r[m + 1] += -2.0 * a_ * q_[m];
      r[m] += I * k_ * q_[m];
    }
    return {std::move(r), a_, c_, k_};
  }

  GaussPoly conj() const {
    std::vector<Complex> r(q_.size());
    std::transform(q_.begin(), q_.end(), r.begin(), [](Complex z) { return std::conj(z); });
    return {std::move(r), a_, c_, -k_};
  }

  GaussPoly scaled(Complex s) const {
    std::vector<Complex> r(q_);
    for (auto& z : r) z *= s;
    return {std::move(r), a_, c_, k_};
  }

  /// g(x) = f(s x + b), s != 0.
  GaussPoly affine(double s, double b) const {
    if (s == 0.0) throw Error(ErrorKind::unsupported_input, "affine map with zero scale");
    // s x + b - c = s (x - (c - b)/s)
    std::vector<Complex> r(q_);
    double sp = 1.0;
    for (auto& z : r) {
      z *= sp;
      sp *= s;
    }
    const Complex phase = std::exp(I * (k_ * b));
    for (auto& z : r) z *= phase;
    return {std::move(r), a_ * s * s, (c_ - b) / s, k_ * s};
  }

  /// Pointwise product (stays in the family).
  friend GaussPoly operator*(const GaussPoly& f, const GaussPoly& g) {
    if (f.is_zero() || g.is_zero()) return GaussPoly{{}, f.a_ + g.a_, 0.0, 0.0};
    const double a = f.a_ + g.a_;
    const double c = (f.a_ * f.c_ + g.a_ * g.c_) / a;
    const double d = f.c_ - g.c_;
    const double kexp = f.a_ * g.a_ * d * d / a;
    auto qf = detail::shift_poly(f.q_, c - f.c_);
    auto qg = detail::shift_poly(g.q_, c - g.c_);
    auto q = detail::poly_mul(qf, qg);
    // The modulation factors exp(i k x) are referred to x, so they multiply directly.
    for (auto& z : q) z *= std::exp(-kexp);
    return {std::move(q), a, c, f.k_ + g.k_};
  }

  /// Fourier transform  f~(t) = \int e^{ixt} f(x) dx.
  GaussPoly fourier() const {
    const double newa = 1.0 / (4.0 * a_);
    if (q_.empty()) return GaussPoly{{}, newa, -k_, c_};
    // (-i d/ds)^m e^{-s^2/(4a)} = h_m(s) e^{-s^2/(4a)},  h_{m+1} = -i (h_m' - s h_m / (2a))
    std::vector<Complex> H(q_.size(), Complex{});
    std::vector<Complex> h{Complex{1.0}};
    for (std::size_t m = 0; m < q_.size(); ++m) {
      for (std::size_t j = 0; j < h.size(); ++j) H[j] += q_[m] * h[j];
      std::vector<Complex> next(h.size() + 1, Complex{});
      for (std::size_t j = 1; j < h.size(); ++j) next[j - 1] += -I * static_cast<double>(j) * h[j];
      for (std::size_t j = 0; j < h.size(); ++j) next[j + 1] += I * h[j] / (2.0 * a_);
      h = std::move(next);
      if (H.size() < h.size()) H.resize(h.size(), Complex{});
    }
    const Complex pref = std::sqrt(pi / a_) * std::exp(I * (k_ * c_));
    for (auto& z : H) z *= pref;
    return {std::move(H), newa, -k_, c_};
  }

  /// \int_R f(x) dx in closed form.
  Complex integral() const {
    if (q_.empty()) return {};
    return fourier()(0.0);
  }

  /// max |f| bound: sum_m |q_m| max_y |y|^m e^{-a y^2}.
  double sup_bound() const {
    double s = 0.0;
    for (std::size_t m = 0; m < q_.size(); ++m) {
      const double mm = static_cast<double>(m);
      const double peak = m == 0 ? 1.0 : std::pow(mm / (2.0 * a_), mm / 2.0) * std::exp(-mm / 2.0);
      s += std::abs(q_[m]) * peak;
    }
    return s;
  }

 private:
  std::vector<Complex> q_;
  double a_ = 1.0;
  double c_ = 0.0;
  double k_ = 0.0;
};

/// Finite sum of GaussPoly terms; the empty sum is the zero function.
class GaussPolySum {
 public:
  GaussPolySum() = default;
  GaussPolySum(GaussPoly g) { add(std::move(g)); }  // NOLINT: implicit by intent
  explicit GaussPolySum(std::vector<GaussPoly> terms) {
    for (auto& t : terms) add(std::move(t));
  }

  void add(GaussPoly g) {
    if (!g.is_zero()) terms_.push_back(std::move(g));
  }

  std::span<const GaussPoly> terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Complex operator()(double x) const {
    Complex s{};
    for (const auto& t : terms_) s += t(x);
    return s;
  }

  template <class F>
  GaussPolySum map(F&& f) const {
    GaussPolySum r;
    for (const auto& t : terms_) r.add(f(t));
    return r;
  }

  GaussPolySum derivative() const { return map([](const GaussPoly& t) { return t.derivative(); }); }
  GaussPolySum conj() const { return map([](const GaussPoly& t) { return t.conj(); }); }
  GaussPolySum fourier() const { return map([](const GaussPoly& t) { return t.fourier(); }); }
  GaussPolySum scaled(Complex s) const {
    return map([s](const GaussPoly& t) { return t.scaled(s); });
  }
  GaussPolySum affine(double s, double b) const {
    return map([=](const GaussPoly& t) { return t.affine(s, b); });
  }

  /// Inverse transform  f(x) = (1/2pi) \int e^{-ixt} f~(t) dt.
  GaussPolySum inverse_fourier() const {
    return fourier().affine(-1.0, 0.0).scaled(1.0 / (2.0 * pi));
  }

  Complex integral() const {
    Complex s{};
    for (const auto& t : terms_) s += t.integral();
    return s;
  }

  friend GaussPolySum operator+(GaussPolySum a, const GaussPolySum& b) {
    for (const auto& t : b.terms_) a.add(t);
    return a;
  }

  friend GaussPolySum operator*(const GaussPolySum& a, const GaussPolySum& b) {
    GaussPolySum r;
    for (const auto& s : a.terms_)
      for (const auto& t : b.terms_) r.add(s * t);
    return r;
  }

 private:
  std::vector<GaussPoly> terms_;
};

}  // namespace stochlim
