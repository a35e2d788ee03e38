#pragma once

// Rescaled oscillatory integrals
//
//   (1/lambda^2) \int\int e^{ixt/lambda^2} f(x) phi(t) dx dt
//
// and their distributional expansions in lambda^2. Everything is evaluated on
// the Fourier side, where the integrands are smooth and non-oscillatory.

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "stochlim/core/error.hpp"
#include "stochlim/funcspace/funcspace.hpp"

namespace stochlim {

/// Strictly decreasing couplings in (0, 1).
class LambdaGrid {
 public:
  LambdaGrid() = default;
  explicit LambdaGrid(std::vector<double> values) : v_(std::move(values)) {
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (!(v_[i] > 0.0 && v_[i] < 1.0))
        throw Error(ErrorKind::config, "lambda values must lie in (0, 1)");
      if (i > 0 && !(v_[i] < v_[i - 1]))
        throw Error(ErrorKind::config, "lambda grid must be strictly decreasing");
    }
  }
  std::span<const double> values() const { return v_; }
  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }

 private:
  std::vector<double> v_;
};

struct SlopeFit {
  double slope = 0.0;
  double halfwidth = 0.0;
  int points = 0;
};

struct ExpansionReport {
  std::vector<double> lambdas;
  std::vector<Complex> integrals;
  std::vector<Complex> sums;
  std::vector<double> residuals;
  SlopeFit fit;
};

struct OscOptions {
  double tol = 1e-12;         // absolute quadrature tolerance
  double floor_factor = 100;  // residuals below floor_factor * tol are not fitted
};

namespace detail {

inline QuadOptions quad_opts(double tol) {
  QuadOptions q;
  q.abs_tol = tol;
  return q;
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace detail

/// \int f~(t) phi(lambda^2 t) dt.
inline Complex pair_integral(const GaussPolySum& f, const GaussPolySum& phi, double lambda,
                             const OscOptions& opt = {}) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::unsupported_input, "lambda must be positive");
  const auto integrand = f.fourier() * phi.affine(lambda * lambda, 0.0);
  return integrate(integrand, -detail::kInf, detail::kInf, detail::quad_opts(opt.tol)).value;
}

/// 2 pi sum_{n<=N} (i lambda^2)^n / n! f^(n)(0) phi^(n)(0).
inline Complex expansion_sum(const GaussPolySum& f, const GaussPolySum& phi, double lambda, int N,
                             int max_order = kDefaultMaxOrder) {
  Complex s{};
  Complex w = 1.0;
  const Complex step = I * (lambda * lambda);
  for (int n = 0; n <= N; ++n) {
    if (n > 0) w *= step / static_cast<double>(n);
    s += w * derivative_at(f, n, 0.0, max_order) * derivative_at(phi, n, 0.0, max_order);
  }
  return 2.0 * pi * s;
}

/// (1/lambda^2) \int dx \int_0^a dt f(x) phi(t) e^{ix(t-a)/lambda^2}
///   = \int_{-a/lambda^2}^0 f~(y) phi(lambda^2 y + a) dy.
inline Complex simplex_integral(const GaussPolySum& f, const PiecewiseC1& phi, double a, double lambda,
                                const OscOptions& opt = {}) {
  if (!(a > 0.0)) throw Error(ErrorKind::unsupported_input, "simplex length must be positive");
  if (!(lambda > 0.0)) throw Error(ErrorKind::unsupported_input, "lambda must be positive");
  const double l2 = lambda * lambda;
  const auto ft = f.fourier();
  const auto pieces = phi.pieces();
  Complex s{};
  for (const auto& p : pieces) {
    const double lo = -a / l2;
    const double hi = std::min(0.0, (p.cutoff - a) / l2);
    if (!(hi > lo)) continue;
    const auto integrand = ft * p.phi.affine(l2, a);
    s += integrate(integrand, lo, hi, detail::quad_opts(opt.tol / static_cast<double>(pieces.size()))).value;
  }
  return s;
}

struct SimplexExpansion {
  Complex leading;     // phi(a^-) M0
  Complex correction;  // lambda^2 phi'_L(a) M1
  Complex sum() const { return leading + correction; }
};

inline SimplexExpansion simplex_expansion(const GaussPolySum& f, const PiecewiseC1& phi, double a, double lambda,
                                          const OscOptions& opt = {}) {
  if (!(a > 0.0)) throw Error(ErrorKind::unsupported_input, "simplex length must be positive");
  SimplexExpansion r{};
  const Complex v = phi.value_left(a);
  const Complex d = phi.left_derivative(a);
  if (v == Complex{} && d == Complex{}) return r;
  const auto ft = f.fourier();
  if (v != Complex{}) r.leading = v * half_line_moment(ft, 0, HalfLine::negative, opt.tol).value;
  if (d != Complex{})
    r.correction = lambda * lambda * d * half_line_moment(ft, 1, HalfLine::negative, opt.tol).value;
  return r;
}

/// \int dx \int_0^inf dt (1/lambda^2) e^{ixt/lambda^2} f(x) phi(t) = \int_0^inf f~(s) phi(lambda^2 s) ds.
inline Complex halfline_integral(const GaussPolySum& f, const GaussPolySum& phi, double lambda,
                                 const OscOptions& opt = {}) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::unsupported_input, "lambda must be positive");
  const auto integrand = f.fourier() * phi.affine(lambda * lambda, 0.0);
  return integrate(integrand, 0.0, detail::kInf, detail::quad_opts(opt.tol)).value;
}

/// sum_{n<=N} lambda^{2n} phi^(n)(0)/n! \int_0^inf s^n f~(s) ds  (Taylor expansion of phi).
inline Complex halfline_expansion(const GaussPolySum& f, const GaussPolySum& phi, double lambda, int N,
                                  const OscOptions& opt = {}) {
  if (N < 0 || N > 1) throw Error(ErrorKind::capability, "half-line expansion is available for N in {0, 1}");
  const auto ft = f.fourier();
  Complex s{};
  double w = 1.0;
  for (int n = 0; n <= N; ++n) {
    if (n > 0) w *= lambda * lambda / n;
    const Complex d = derivative_at(phi, n, 0.0);
    if (d == Complex{}) continue;
    s += w * d * half_line_moment(ft, n, HalfLine::positive, opt.tol).value;
  }
  return s;
}

/// i \int f(x)/(x + i0) dx = i PV \int f/x + pi f(0); equals \int_0^inf f~(s) ds.
inline Complex halfline_pole_identity(const GaussPolySum& f, double tol = 1e-12) {
  if (f.is_zero()) return {};
  double lo = detail::kInf, hi = -detail::kInf;
  for (const auto& t : f.terms()) {
    const double u0 = detail::tail_offset(t, 0.1 * tol / static_cast<double>(f.terms().size()));
    lo = std::min(lo, t.center() - u0);
    hi = std::max(hi, t.center() + u0);
  }
  lo = std::min(lo, -1.0);
  hi = std::max(hi, 1.0);
  PoleOptions po;
  po.quad.abs_tol = tol;
  // pole1 gives PV + i pi f(0); the +i0 prescription flips the delta term.
  const auto minus = pole1([&f](double x) { return f(x); }, 0.0, lo, hi, po);
  const Complex plus = minus.value - 2.0 * pi * I * f(0.0);
  return I * plus;
}

/// Least-squares slope of log(residual) against log(lambda), half-width = standard error.
/// Residuals not above `floor` are excluded.
inline SlopeFit convergence_slope(std::span<const double> residuals, const LambdaGrid& grid, double floor = 0.0) {
  if (residuals.size() != grid.size()) throw Error(ErrorKind::unsupported_input, "residuals/grid size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (!(residuals[i] > floor) || !std::isfinite(residuals[i])) continue;
    xs.push_back(std::log(grid[i]));
    ys.push_back(std::log(residuals[i]));
  }
  const auto n = static_cast<int>(xs.size());
  if (n < 4)
    throw Error(ErrorKind::insufficient_data,
                "slope fit needs at least 4 points above the noise floor, got " + std::to_string(n));
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  SlopeFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  const double icpt = my - fit.slope * mx;
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double e = ys[i] - (icpt + fit.slope * xs[i]);
    ss += e * e;
  }
  fit.halfwidth = std::sqrt(ss / (n - 2) / sxx);
  return fit;
}

namespace detail {

template <class Integral, class Sum>
ExpansionReport sweep(const LambdaGrid& grid, const OscOptions& opt, Integral&& integral, Sum&& sum) {
  ExpansionReport rep;
  for (double l : grid.values()) {
    const Complex v = integral(l);
    const Complex s = sum(l);
    rep.lambdas.push_back(l);
    rep.integrals.push_back(v);
    rep.sums.push_back(s);
    rep.residuals.push_back(std::abs(v - s));
  }
  rep.fit = convergence_slope(rep.residuals, grid, opt.floor_factor * opt.tol);
  return rep;
}

}  // namespace detail

/// Residual sweep of pair_integral against expansion_sum of order N.
inline ExpansionReport pair_report(const GaussPolySum& f, const GaussPolySum& phi, int N, const LambdaGrid& grid,
                                   const OscOptions& opt = {}) {
  return detail::sweep(
      grid, opt, [&](double l) { return pair_integral(f, phi, l, opt); },
      [&](double l) { return expansion_sum(f, phi, l, N); });
}

/// Residual sweep of simplex_integral against simplex_expansion.
inline ExpansionReport simplex_report(const GaussPolySum& f, const PiecewiseC1& phi, double a,
                                      const LambdaGrid& grid, const OscOptions& opt = {}) {
  return detail::sweep(
      grid, opt, [&](double l) { return simplex_integral(f, phi, a, l, opt); },
      [&](double l) { return simplex_expansion(f, phi, a, l, opt).sum(); });
}

/// Residual sweep of halfline_integral against halfline_expansion of order N.
inline ExpansionReport halfline_report(const GaussPolySum& f, const GaussPolySum& phi, int N,
                                       const LambdaGrid& grid, const OscOptions& opt = {}) {
  return detail::sweep(
      grid, opt, [&](double l) { return halfline_integral(f, phi, l, opt); },
      [&](double l) { return halfline_expansion(f, phi, l, N, opt); });
}

}  // namespace stochlim
