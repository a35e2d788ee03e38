#pragma once

// Noise-strength constants of a spectral density rho.
//
// Conventions (u = omega - omega0):
//   gamma~_n = ((-1)^n/n!) \int sigma^n d sigma \int rho(omega) e^{i sigma u} d omega
//            = 2 pi (-i)^n rho^(n)(omega0) / n!
//   gamma_0  = \int_{-inf}^0 d sigma G(sigma)              = -i \int rho/(u - i0)
//   gamma_1  = -\int_{-inf}^0 sigma d sigma G(sigma)       = -\int rho/(u - i0)^2
// with G(sigma) = \int rho(omega) e^{i sigma u} d omega. The i0 forms are
// evaluated by Plemelj splitting; the damped sigma-integrals (factor e^{eps sigma})
// give the kernels i/(eps + iu) and -1/(eps + iu)^2, extrapolated to eps -> 0,
// and serve as the independent route that fixes every sign.
//
// Spin-boson constants, omega_1 = omega - Delta, omega_2 = omega + Delta:
//   A_l = \int rho/(omega - delta_l - i0),  B_l = \int rho/(omega - delta_l - i0)^2,
//   Z_l = \int\int rho(x) rho(y) / ((x - delta_l - i0)(x + y)) [1/(x - delta_l - i0) + 1/(y - delta_l - i0)],
//   C_l = i A_l B_l - i Z_l,   delta_1 = Delta, delta_2 = -Delta.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "stochlim/core/error.hpp"
#include "stochlim/funcspace/funcspace.hpp"

namespace stochlim {

struct NoiseCoefficients {
  int n = 0;
  Complex gamma_causal;
  Complex gamma_full;
  double omega0 = 0.0;
};

struct CoeffOptions {
  double tol = 1e-12;  // absolute quadrature tolerance
  double window = 1.0;
};

struct RouteCheck {
  Complex route1;  // Plemelj / closed form
  Complex route2;  // regularized, extrapolated
  double gap = 0.0;
};

struct SpinBosonConstants {
  double delta = 0.0;
  std::array<Complex, 2> A{}, B{}, C{}, Z{};
};

namespace detail {

inline void check_pole_location(const SpectralProfile& rho, double x0) {
  constexpr double margin = 1e-9;
  if ((std::isfinite(rho.edge_lo()) && std::abs(x0 - rho.edge_lo()) <= margin) ||
      (std::isfinite(rho.edge_hi()) && std::abs(x0 - rho.edge_hi()) <= margin))
    throw Error(ErrorKind::unsupported_input, "pole at a support endpoint (one-sided PV not implemented)");
}

inline PoleOptions pole_opts(const CoeffOptions& opt) {
  PoleOptions po;
  po.quad.abs_tol = opt.tol;
  po.max_window = opt.window;
  return po;
}

inline RealToComplex as_fn(const SpectralProfile& rho) {
  return [&rho](double w) { return Complex{rho(w)}; };
}

inline RealToComplex as_derivative(const SpectralProfile& rho) {
  return [&rho](double w) { return Complex{rho.derivative(w, 1)}; };
}

}  // namespace detail

/// \int rho(omega) / (omega - x0 - i0) d omega.
inline Complex plemelj1(const SpectralProfile& rho, double x0, const CoeffOptions& opt = {}) {
  if (rho.is_zero()) return {};
  detail::check_pole_location(rho, x0);
  return pole1(detail::as_fn(rho), x0, rho.support_lo(), rho.support_hi(), detail::pole_opts(opt)).value;
}

/// \int rho(omega) / (omega - x0 - i0)^2 d omega (by parts against rho').
inline Complex plemelj2(const SpectralProfile& rho, double x0, const CoeffOptions& opt = {}) {
  if (rho.is_zero()) return {};
  detail::check_pole_location(rho, x0);
  return pole2(detail::as_fn(rho), detail::as_derivative(rho), x0, rho.support_lo(), rho.support_hi(),
               detail::pole_opts(opt))
      .value;
}

/// gamma~_n = 2 pi (-i)^n rho^(n)(omega0) / n!.
inline Complex gamma_full(const SpectralProfile& rho, double omega0, int n) {
  if (n < 0) throw Error(ErrorKind::unsupported_input, "negative order");
  if (n > SpectralProfile::kMaxOrder)
    throw Error(ErrorKind::capability, "density derivatives beyond order " +
                                           std::to_string(SpectralProfile::kMaxOrder) + " are not available");
  if (rho.is_zero()) return {};
  detail::check_pole_location(rho, omega0);
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  return 2.0 * pi * std::pow(-I, n) * rho.derivative(omega0, n) / fact;
}

/// Causal gamma_0 = -i \int rho/(u - i0),  gamma_1 = -\int rho/(u - i0)^2.
inline Complex gamma_causal(const SpectralProfile& rho, double omega0, int n, const CoeffOptions& opt = {}) {
  switch (n) {
    case 0: return -I * plemelj1(rho, omega0, opt);
    case 1: return -plemelj2(rho, omega0, opt);
    default: break;
  }
  throw Error(ErrorKind::capability, "causal coefficients are implemented for n in {0, 1}");
}

inline NoiseCoefficients noise_coefficients(const SpectralProfile& rho, double omega0, int n,
                                            const CoeffOptions& opt = {}) {
  NoiseCoefficients c;
  c.n = n;
  c.omega0 = omega0;
  c.gamma_full = gamma_full(rho, omega0, n);
  if (n <= 1) c.gamma_causal = gamma_causal(rho, omega0, n, opt);
  return c;
}

// ---------------------------------------------------------------------------
// Regularized routes (Boost Gauss-Kronrod, no shared quadrature code)

namespace detail {

template <class F>
Complex boost_integrate(const F& f, std::vector<double> breaks, double rel_tol = 1e-11) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  Complex s{};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    s += GK::integrate([&](double x) -> Complex { return f(x); }, breaks[i], breaks[i + 1], 12, rel_tol);
  }
  return s;
}

/// Breakpoints clustering at x0 on the scale eps, clipped to [lo, hi].
inline std::vector<double> cluster_breaks(double lo, double hi, double x0, double eps) {
  std::vector<double> b{lo, hi};
  for (double k : {0.0, 1.0, 4.0, 16.0, 64.0, 256.0}) {
    for (double sgn : {-1.0, 1.0}) {
      const double x = x0 + sgn * k * eps;
      if (x > lo && x < hi) b.push_back(x);
    }
  }
  return b;
}

/// Polynomial extrapolation to h = 0 (Neville) of values sampled at h_i.
inline Complex neville_zero(std::span<const double> h, std::span<const Complex> v) {
  std::vector<Complex> p(v.begin(), v.end());
  const std::size_t n = p.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i) p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
  return p[0];
}

}  // namespace detail

struct DampedOptions {
  std::vector<double> eps{0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125};
  double agree = 1e-6;  // |full - (one point fewer)| allowed before reporting non-convergence
};

/// Damped-kernel value of \int rho/(omega - x0 - i0)^order, order in {1, 2},
/// from the causal sigma-integral with e^{eps sigma} and eps -> 0 extrapolation.
inline Complex damped_pole(const SpectralProfile& rho, double x0, int order, const DampedOptions& opt = {}) {
  if (order != 1 && order != 2) throw Error(ErrorKind::capability, "damped route supports pole orders 1 and 2");
  if (rho.is_zero()) return {};
  std::vector<Complex> vals;
  for (double e : opt.eps) {
    auto f = [&](double w) {
      const Complex k = 1.0 / Complex{e, w - x0};  // \int_{-inf}^0 e^{(eps + iu) sigma} d sigma
      return rho(w) * (order == 1 ? I * k : -k * k);
    };
    vals.push_back(detail::boost_integrate(f, detail::cluster_breaks(rho.support_lo(), rho.support_hi(), x0, e)));
  }
  const Complex full = detail::neville_zero(opt.eps, vals);
  const Complex fewer = detail::neville_zero(std::span(opt.eps).first(opt.eps.size() - 1),
                                             std::span<const Complex>(vals).first(vals.size() - 1));
  const double diff = std::abs(full - fewer);
  if (diff > opt.agree * (1.0 + std::abs(full)))
    throw Error(ErrorKind::accuracy,
                "damped-route extrapolation did not settle (last two extrapolants differ by " + std::to_string(diff) + ")",
                diff);
  return full;
}

/// Route 1 (Plemelj) against route 2 (damped causal sigma-integral) for gamma_n, n in {0, 1}.
inline RouteCheck cross_validate_gamma(const SpectralProfile& rho, double omega0, int n, const CoeffOptions& opt = {},
                                       const DampedOptions& dopt = {}) {
  RouteCheck r;
  r.route1 = gamma_causal(rho, omega0, n, opt);
  r.route2 = n == 0 ? -I * damped_pole(rho, omega0, 1, dopt) : -damped_pole(rho, omega0, 2, dopt);
  r.gap = std::abs(r.route1 - r.route2);
  return r;
}

/// gamma~_n from the Gaussian-regularized sigma-integral
///   ((-1)^n/n!) \int sigma^n e^{-eps sigma^2} e^{i sigma u} d sigma  -> kernel (-i d/du)^n sqrt(pi/eps) e^{-u^2/(4 eps)},
/// extrapolated to eps -> 0 (expansion in integer powers of eps).
inline Complex gamma_full_regularized(const SpectralProfile& rho, double omega0, int n,
                                      std::vector<double> eps = {0.02, 0.01, 0.005, 0.0025, 0.00125}) {
  if (n < 0 || n > SpectralProfile::kMaxOrder) throw Error(ErrorKind::capability, "order out of range");
  if (rho.is_zero()) return {};
  std::vector<Complex> vals;
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  for (double e : eps) {
    GaussPoly kern = GaussPoly::gaussian(1.0 / (4.0 * e), 0.0, std::sqrt(pi / e));
    for (int k = 0; k < n; ++k) kern = kern.derivative().scaled(-I);
    auto f = [&](double w) { return rho(w) * kern(w - omega0); };
    const double reach = 12.0 * std::sqrt(e);
    const double lo = std::max(rho.support_lo(), omega0 - reach), hi = std::min(rho.support_hi(), omega0 + reach);
    if (!(hi > lo)) {
      vals.emplace_back();
      continue;
    }
    vals.push_back(std::pow(-1.0, n) / fact *
                   detail::boost_integrate(f, detail::cluster_breaks(lo, hi, omega0, std::sqrt(e))));
  }
  return detail::neville_zero(eps, vals);
}

// ---------------------------------------------------------------------------
// Spin-boson constants

namespace detail {

/// Z_l for pole x0 = delta_l (requires x + y > 0 on the support).
inline Complex spinboson_z(const SpectralProfile& rho, double x0, const CoeffOptions& opt) {
  const double lo = rho.support_lo(), hi = rho.support_hi();
  // Z is a nested integral. The inner integrals sit on a roundoff floor near
  // 1e-13 for wide supports; the outer tolerance is relaxed to match.
  CoeffOptions inner = opt;
  inner.tol = std::max(opt.tol, 1e-11);
  CoeffOptions outer = opt;
  outer.tol = std::max(opt.tol, 1e-10);
  QuadOptions q;
  q.abs_tol = inner.tol;
  // H(x) = \int rho(y)/(x+y) dy,  H'(x) = -\int rho(y)/(x+y)^2 dy
  auto H = [&](double x) {
    return integrate([&](double y) { return Complex{rho(y) / (x + y)}; }, lo, hi, q).value;
  };
  auto dH = [&](double x) {
    return integrate([&](double y) { return Complex{-rho(y) / ((x + y) * (x + y))}; }, lo, hi, q).value;
  };
  const RealToComplex h = [&](double x) { return rho(x) == 0.0 ? Complex{} : rho(x) * H(x); };
  const RealToComplex dh = [&](double x) {
    const double r = rho(x);
    const double dr = rho.derivative(x, 1);
    if (r == 0.0 && dr == 0.0) return Complex{};
    return dr * H(x) + r * dH(x);
  };
  PoleOptions po = pole_opts(outer);
  const Complex za = pole2(h, dh, x0, lo, hi, po).value;
  // K(x) = \int rho(y) / ((y - x0 - i0)(x + y)) dy
  PoleOptions pin = pole_opts(inner);
  const RealToComplex k = [&](double x) {
    const double r = rho(x);
    if (r == 0.0) return Complex{};
    return r * pole1([&](double y) { return Complex{rho(y) / (x + y)}; }, x0, lo, hi, pin).value;
  };
  const Complex zb = pole1(k, x0, lo, hi, po).value;
  return za + zb;
}

}  // namespace detail

inline SpinBosonConstants spinboson_constants(const SpectralProfile& rho, double delta, const CoeffOptions& opt = {}) {
  if (!(delta > 0.0)) throw Error(ErrorKind::unsupported_input, "gap Delta must be positive");
  SpinBosonConstants c;
  c.delta = delta;
  if (rho.is_zero()) return c;
  if (rho.support_lo() < 0.0)
    throw Error(ErrorKind::unsupported_input,
                "spin-boson constants need omega >= 0 on the support (omega(k1) + omega(k2) > 0)");
  const std::array<double, 2> poles{delta, -delta};
  for (std::size_t l = 0; l < 2; ++l) {
    c.A[l] = plemelj1(rho, poles[l], opt);
    c.B[l] = plemelj2(rho, poles[l], opt);
    c.Z[l] = detail::spinboson_z(rho, poles[l], opt);
    c.C[l] = I * c.A[l] * c.B[l] - I * c.Z[l];
  }
  return c;
}

}  // namespace stochlim
