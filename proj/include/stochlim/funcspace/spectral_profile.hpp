#pragma once

// Density of states rho(omega) for a radial dispersion and formfactor, or a
// directly specified ("synthetic") density. Every k-space integral
//   \int |g(k)|^2 F(omega(k)) dk
// becomes \int rho(omega) F(omega) d omega. Derivatives of rho are exact:
// the density is evaluated on Taylor jets.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stochlim/core/error.hpp"
#include "stochlim/core/jet.hpp"
#include "stochlim/funcspace/gauss_poly.hpp"
#include "stochlim/funcspace/quadrature.hpp"

namespace stochlim {

enum class DispersionKind { massless, massive, polynomial, synthetic };

inline const char* to_string(DispersionKind k) {
  switch (k) {
    case DispersionKind::massless: return "massless";
    case DispersionKind::massive: return "massive";
    case DispersionKind::polynomial: return "polynomial";
    case DispersionKind::synthetic: return "synthetic";
  }
  return "?";
}

/// Radial dispersion law omega(r), r = |k|.
struct Dispersion {
  DispersionKind kind = DispersionKind::massless;
  double mass = 0.0;                 // massive: omega = sqrt(r^2 + m^2)
  std::vector<double> poly_coeffs;   // polynomial: omega = sum_j w_j r^j

  template <class T>
  T operator()(const T& r) const {
    switch (kind) {
      case DispersionKind::massless: return r;
      case DispersionKind::massive: return sqrt_(r * r + mass * mass);
      case DispersionKind::polynomial: {
        T acc = r * 0.0;
        for (auto it = poly_coeffs.rbegin(); it != poly_coeffs.rend(); ++it) acc = acc * r + *it;
        return acc;
      }
      case DispersionKind::synthetic: break;
    }
    throw Error(ErrorKind::unsupported_input, "synthetic profiles have no dispersion");
  }

  template <class T>
  T slope(const T& r) const {
    switch (kind) {
      case DispersionKind::massless: return r * 0.0 + 1.0;
      case DispersionKind::massive: return r / sqrt_(r * r + mass * mass);
      case DispersionKind::polynomial: {
        T acc = r * 0.0;
        for (std::size_t j = poly_coeffs.size(); j-- > 1;) acc = acc * r + static_cast<double>(j) * poly_coeffs[j];
        return acc;
      }
      case DispersionKind::synthetic: break;
    }
    throw Error(ErrorKind::unsupported_input, "synthetic profiles have no dispersion");
  }

 private:
  static double sqrt_(double x) { return std::sqrt(x); }
  static Jet sqrt_(const Jet& x) { return sqrt(x); }
};

/// Real Gaussian-polynomial q(x-c) exp(-a (x-c)^2) with real coefficients.
struct RealGaussTerm {
  std::vector<double> q;
  double width = 1.0;
  double center = 0.0;

  template <class T>
  T operator()(const T& x) const {
    T y = x - center;
    T p = y * 0.0;
    for (auto it = q.rbegin(); it != q.rend(); ++it) p = p * y + *it;
    return p * exp_(-width * (y * y));
  }

 private:
  static double exp_(double x) { return std::exp(x); }
  static Jet exp_(const Jet& x) { return exp(x); }
};

inline double unit_sphere_area(int d) {
  // S_{d-1} = 2 pi^{d/2} / Gamma(d/2)
  return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
}

class SpectralProfile {
 public:
  static constexpr int kMaxOrder = 8;

  /// rho(omega) given directly; must be real-valued and nonnegative.
  static SpectralProfile synthetic(const GaussPolySum& rho,
                                   double support_min = -std::numeric_limits<double>::infinity(),
                                   double support_max = std::numeric_limits<double>::infinity()) {
    SpectralProfile p;
    p.kind_ = DispersionKind::synthetic;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& t : rho.terms()) {
      if (t.freq() != 0.0)
        throw Error(ErrorKind::unsupported_input, "synthetic density must not carry a modulation");
      RealGaussTerm r{{}, t.width(), t.center()};
      for (auto z : t.coeffs()) {
        if (z.imag() != 0.0) throw Error(ErrorKind::unsupported_input, "synthetic density must be real");
        r.q.push_back(z.real());
      }
      p.terms_.push_back(std::move(r));
      const double u0 = detail::tail_offset(t, kTailBudget);
      lo = std::min(lo, t.center() - u0);
      hi = std::max(hi, t.center() + u0);
    }
    if (p.terms_.empty()) {
      lo = 0.0;
      hi = 1.0;
    }
    p.lo_ = std::max(lo, support_min);
    p.hi_ = std::min(hi, support_max);
    p.edge_lo_ = support_min;
    p.edge_hi_ = support_max;
    if (!(p.hi_ > p.lo_)) throw Error(ErrorKind::unsupported_input, "empty density support");
    p.check_nonnegative();
    return p;
  }

  /// Radial reduction of (omega(|k|), g(|k|)) in d dimensions.
  /// For d = 1, half_line restricts to the single ray k > 0.
  static SpectralProfile radial(const Dispersion& omega, const GaussPoly& g, int d, bool half_line = false) {
    if (d < 1) throw Error(ErrorKind::unsupported_input, "dimension must be >= 1");
    if (omega.kind == DispersionKind::synthetic)
      throw Error(ErrorKind::unsupported_input, "radial reduction needs a dispersion law");
    if (omega.kind == DispersionKind::massive && !(omega.mass > 0.0))
      throw Error(ErrorKind::unsupported_input, "massive dispersion needs m > 0");
    SpectralProfile p;
    p.kind_ = omega.kind;
    p.omega_ = omega;
    p.dim_ = d;
    p.sphere_ = unit_sphere_area(d) * ((d == 1 && half_line) ? 0.5 : 1.0);
    const GaussPoly g2 = g * g.conj();
    RealGaussTerm t{{}, g2.width(), g2.center()};
    for (auto z : g2.coeffs()) t.q.push_back(z.real());
    p.terms_.push_back(t);
    // numeric support in r: |g|^2 tail below budget
    const double rmax = std::max(g2.center(), 0.0) + detail::tail_offset(g2, kTailBudget);
    if (omega.kind == DispersionKind::polynomial) {
      if (omega.poly_coeffs.size() < 2)
        throw Error(ErrorKind::unsupported_input, "polynomial dispersion must be non-constant");
      constexpr int n = 4000;
      for (int i = 1; i <= n; ++i) {
        const double r = rmax * i / n;
        if (!(omega.slope(r) > 0.0))
          throw Error(ErrorKind::unsupported_input,
                      "dispersion is not strictly increasing in |k| on the formfactor support "
                      "(piecewise-monotone splitting is not implemented)");
      }
    }
    p.rmax_ = rmax;
    p.lo_ = omega(0.0);
    p.hi_ = omega(rmax);
    p.edge_lo_ = p.lo_;
    p.edge_hi_ = std::numeric_limits<double>::infinity();
    return p;
  }

  DispersionKind kind() const { return kind_; }
  int dimension() const { return dim_; }
  /// Highest derivative order available analytically.
  int smoothness() const { return kMaxOrder; }
  bool is_zero() const { return scale_ == 0.0 || terms_.empty(); }

  /// Numerical support [lo, hi]; rho is below ~1e-30 (relative) outside.
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  /// Physical edges (may be infinite); a pole exactly there is unsupported.
  double edge_lo() const { return edge_lo_; }
  double edge_hi() const { return edge_hi_; }

  SpectralProfile scaled(double s) const {
    SpectralProfile p = *this;
    p.scale_ *= s;
    return p;
  }

  double operator()(double w) const {
    if (w < lo_ || w > hi_ || is_zero()) return 0.0;
    return eval(w);
  }

  /// Taylor jet of rho at w (order <= kMaxOrder).
  Jet jet(double w, int order) const {
    if (order > kMaxOrder) throw Error(ErrorKind::capability, "density derivative order exceeds maximum");
    if (w < lo_ || w > hi_ || is_zero()) return Jet(order, 0.0);
    return eval(Jet::variable(w, order));
  }

  double derivative(double w, int n) const { return jet(w, n).derivative(n); }

  /// r(omega) for radial profiles.
  double radius(double w) const { return radius_of(w); }

 private:
  static constexpr double kTailBudget = 1e-30;

  template <class T>
  T eval(const T& w) const {
    T acc = w * 0.0;
    if (kind_ == DispersionKind::synthetic) {
      for (const auto& t : terms_) acc += t(w);
      return acc * scale_;
    }
    const T r = radius_of(w);
    const auto& g2 = terms_.front();
    T rd = r * 0.0 + 1.0;
    for (int i = 0; i < dim_ - 1; ++i) rd = rd * r;
    if (kind_ == DispersionKind::massive) {
      // omega' = r / omega: rho = S r^{d-2} omega |g|^2
      T rm = r * 0.0 + 1.0;
      for (int i = 0; i < dim_ - 2; ++i) rm = rm * r;
      T val = rm * w * g2(r);
      if (dim_ == 1) val = w * g2(r) / r;
      return val * (sphere_ * scale_);
    }
    return rd * g2(r) / omega_.slope(r) * (sphere_ * scale_);
  }

  double radius_of(double w) const {
    switch (kind_) {
      case DispersionKind::massless: return w;
      case DispersionKind::massive: return std::sqrt(std::max(w * w - omega_.mass * omega_.mass, 0.0));
      case DispersionKind::polynomial: {
        double lo = 0.0, hi = rmax_;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          (omega_(mid) < w ? lo : hi) = mid;
        }
        double r = 0.5 * (lo + hi);
        for (int it = 0; it < 3; ++it) {
          const double s = omega_.slope(r);
          if (s > 0.0) r -= (omega_(r) - w) / s;
        }
        return r;
      }
      case DispersionKind::synthetic: break;
    }
    return w;
  }

  Jet radius_of(const Jet& w) const {
    switch (kind_) {
      case DispersionKind::massless: return w;
      case DispersionKind::massive: return sqrt(w * w - omega_.mass * omega_.mass);
      case DispersionKind::polynomial: {
        // Newton on jets: each step doubles the number of correct orders.
        Jet r(w.order(), radius_of(w.value()));
        for (int it = 0; it <= w.order() + 1; ++it) r = r - (omega_(r) - w) / omega_.slope(r);
        return r;
      }
      case DispersionKind::synthetic: break;
    }
    return w;
  }

  void check_nonnegative() const {
    double peak = 0.0, worst = 0.0;
    constexpr int n = 2000;
    for (int i = 0; i <= n; ++i) {
      const double v = eval(lo_ + (hi_ - lo_) * i / n);
      peak = std::max(peak, v);
      worst = std::min(worst, v);
    }
    if (worst < -1e-12 * std::max(peak, 1e-300))
      throw Error(ErrorKind::unsupported_input, "density must be nonnegative");
  }

  DispersionKind kind_ = DispersionKind::synthetic;
  Dispersion omega_{};
  std::vector<RealGaussTerm> terms_;
  int dim_ = 1;
  double sphere_ = 1.0;
  double scale_ = 1.0;
  double rmax_ = 0.0;
  double lo_ = 0.0, hi_ = 1.0;
  double edge_lo_ = -std::numeric_limits<double>::infinity();
  double edge_hi_ = std::numeric_limits<double>::infinity();
};

/// radial_reduce entry point (dispersion + radial formfactor + dimension).
inline SpectralProfile radial_reduce(const Dispersion& omega, const GaussPoly& g, int d, bool half_line = false) {
  return SpectralProfile::radial(omega, g, d, half_line);
}

}  // namespace stochlim
