#pragma once

#include <limits>
#include <vector>

#include "stochlim/core/error.hpp"
#include "stochlim/funcspace/gauss_poly.hpp"
#include "stochlim/funcspace/quadrature.hpp"
#include "stochlim/funcspace/spectral_profile.hpp"

namespace stochlim {

inline constexpr int kDefaultMaxOrder = 8;

/// Exact n-th derivative of f at x0.
inline Complex derivative_at(const GaussPolySum& f, int n, double x0, int max_order = kDefaultMaxOrder) {
  if (n < 0 || n > max_order)
    throw Error(ErrorKind::capability, "derivative order " + std::to_string(n) + " exceeds maximum " +
                                           std::to_string(max_order));
  GaussPolySum g = f;
  for (int k = 0; k < n; ++k) g = g.derivative();
  return g(x0);
}

/// f~(t) = \int e^{ixt} f(x) dx.
inline GaussPolySum fourier(const GaussPolySum& f) { return f.fourier(); }

enum class HalfLine { negative, positive };

/// \int over the chosen half-line of y^m ftilde(y) dy.
inline QuadResult half_line_moment(const GaussPolySum& ftilde, int m, HalfLine side,
                                   double tol = 1e-10, int max_order = kDefaultMaxOrder) {
  if (m < 0 || m > max_order) throw Error(ErrorKind::capability, "moment order exceeds maximum");
  std::vector<Complex> mono(static_cast<std::size_t>(m) + 1, Complex{});
  mono.back() = 1.0;
  // y^m as a (very wide) GaussPoly factor would spoil the tails; multiply per term instead.
  GaussPolySum integrand;
  for (const auto& t : ftilde.terms()) {
    auto q = detail::poly_mul(detail::shift_poly(mono, t.center()), t.coeffs());
    integrand.add(GaussPoly{std::move(q), t.width(), t.center(), t.freq()});
  }
  const double inf = std::numeric_limits<double>::infinity();
  QuadOptions opt;
  opt.abs_tol = tol;
  return side == HalfLine::negative ? integrate(integrand, -inf, 0.0, opt)
                                    : integrate(integrand, 0.0, inf, opt);
}

/// phi(t) = sum_i phi_i(t) Theta_[0, a_i](t) on t >= 0 (a_i may be +inf).
class PiecewiseC1 {
 public:
  struct Piece {
    GaussPolySum phi;
    double cutoff;
  };

  PiecewiseC1() = default;
  explicit PiecewiseC1(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    for (const auto& p : pieces_)
      if (!(p.cutoff > 0.0)) throw Error(ErrorKind::unsupported_input, "piece cutoff must be positive");
  }

  std::span<const Piece> pieces() const { return pieces_; }

  /// Left limit phi(a^-) for a > 0 (the pairing with delta_+(. - a)).
  Complex value_left(double a) const {
    Complex s{};
    for (const auto& p : pieces_)
      if (a <= p.cutoff) s += p.phi(a);
    return s;
  }

  /// Left derivative phi'_L(a).
  Complex left_derivative(double a) const {
    Complex s{};
    for (const auto& p : pieces_)
      if (a <= p.cutoff) s += p.phi.derivative()(a);
    return s;
  }

  Complex operator()(double t) const {
    if (t < 0.0) return {};
    Complex s{};
    for (const auto& p : pieces_)
      if (t <= p.cutoff) s += p.phi(t);
    return s;
  }

 private:
  std::vector<Piece> pieces_;
};

}  // namespace stochlim
