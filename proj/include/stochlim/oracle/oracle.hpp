#pragma once

// Independent verification paths. Nothing here calls the adaptive quadrature
// or the Fourier transform of the funcspace module; only the GaussPoly data
// types are shared.
//
//  * gaussian_closed_form: the double integral (1/l^2) \int\int e^{ixt/l^2} f(x) phi(t)
//    done in (x, t) space by complete-the-square and complex Gaussian moments.
//  * direct_2d_quadrature: the same double integral by nested Boost
//    Gauss-Kronrod quadrature of the literal oscillatory integrand.
//  * richardson_extract: least-squares fit of values(l) by a few powers of l.
//  * two_mode_propagator: vacuum amplitude for a field with two discrete modes,
//    by dense matrix exponentiation in a truncated Fock space.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <span>
#include <vector>

#include "stochlim/core/error.hpp"
#include "stochlim/funcspace/gauss_poly.hpp"

namespace stochlim::oracle {

namespace detail {

using Poly = std::vector<Complex>;

inline Poly padd(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), Complex{});
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

inline Poly pmul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, Complex{});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline Poly pscale(Poly a, Complex s) {
  for (auto& z : a) z *= s;
  return a;
}

/// Ratios K_m = J_m / J_0 of J_m = \int y^m e^{-A y^2 + B y} dy (Re A > 0):
/// K_{m+1} = (B/2A) K_m + (m/2A) K_{m-1}.
inline std::vector<Complex> moment_ratios(Complex A, Complex B, int mmax) {
  std::vector<Complex> K(static_cast<std::size_t>(mmax) + 1, Complex{});
  K[0] = 1.0;
  if (mmax >= 1) K[1] = B / (2.0 * A);
  for (int m = 1; m < mmax; ++m)
    K[static_cast<std::size_t>(m) + 1] =
        (B / (2.0 * A)) * K[static_cast<std::size_t>(m)] +
        (static_cast<double>(m) / (2.0 * A)) * K[static_cast<std::size_t>(m) - 1];
  return K;
}

/// Coefficients of q(t - d) in powers of t, given q in powers of (t - d).
inline Poly uncentre(std::span<const Complex> q, double d) {
  Poly r(q.size(), Complex{});
  for (std::size_t m = 0; m < q.size(); ++m) {
    // (t - d)^m = sum_j C(m, j) t^j (-d)^{m-j}
    double binom = 1.0;
    for (std::size_t j = 0; j <= m; ++j) {
      r[j] += q[m] * binom * std::pow(-d, static_cast<double>(m - j));
      binom = binom * static_cast<double>(m - j) / static_cast<double>(j + 1);
    }
  }
  return r;
}

/// One term pair of (1/l^2) \int\int e^{ixt/l^2} f(x) phi(t) dx dt.
inline Complex pair_term(const GaussPoly& f, const GaussPoly& g, double lambda) {
  const double mu = lambda * lambda;
  const double a = f.width(), c = f.center(), kf = f.freq();
  const double b = g.width(), d = g.center(), kg = g.freq();
  // y = x - c. Exponent in y: -a y^2 + B(t) y with B(t) = beta1 t + beta0.
  const Complex beta1 = I / mu;
  const Complex beta0 = I * kf;
  const Poly Bpoly{beta0, beta1};
  // \int y^m e^{-a y^2 + B y} dy = sqrt(pi/a) e^{B^2/4a} P_m(B)
  const auto qf = f.coeffs();
  std::vector<Poly> P;
  P.push_back(Poly{1.0});
  for (std::size_t m = 1; m < qf.size(); ++m) {
    Poly next = pscale(pmul(Bpoly, P[m - 1]), 1.0 / (2.0 * a));
    if (m >= 2) next = padd(next, pscale(P[m - 2], static_cast<double>(m - 1) / (2.0 * a)));
    P.push_back(std::move(next));
  }
  Poly Qs;
  for (std::size_t m = 0; m < qf.size(); ++m) Qs = padd(Qs, pscale(P[m], qf[m]));
  const Poly R = pmul(Qs, uncentre(g.coeffs(), d));
  // remaining exponent in t: -At t^2 + Bt t + C (t stays O(lambda), so nothing large cancels)
  const Complex At = b + 1.0 / (4.0 * a * mu * mu);
  const Complex Bt = 2.0 * b * d + I * (c / mu + kg) - kf / (2.0 * a * mu);
  const Complex C = -b * d * d + I * (kf * c) - kf * kf / (4.0 * a);
  const auto K = moment_ratios(At, Bt, static_cast<int>(R.size()) - 1);
  Complex poly_part{};
  for (std::size_t n = 0; n < R.size(); ++n) poly_part += R[n] * K[n];
  const Complex J0 = std::sqrt(pi / At) * std::exp(C + Bt * Bt / (4.0 * At));
  return std::sqrt(pi / a) * J0 * poly_part / mu;
}

}  // namespace detail

/// Exact (1/l^2) \int\int e^{ixt/l^2} f(x) phi(t) dx dt  (= \int f~(t) phi(l^2 t) dt).
inline Complex gaussian_closed_form(const GaussPolySum& f, const GaussPolySum& phi, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::unsupported_input, "lambda must be positive");
  Complex s{};
  for (const auto& a : f.terms())
    for (const auto& b : phi.terms()) s += detail::pair_term(a, b, lambda);
  return s;
}

struct Quad2DResult {
  Complex value;
  double error = 0.0;
};

namespace detail {

/// Half-width beyond which |term| < 1e-17 * sum |q_m| (coarse scan).
inline double truncation_radius(const GaussPoly& g) {
  double qsum = 0.0;
  for (auto z : g.coeffs()) qsum += std::abs(z);
  for (double u = 1.0 / std::sqrt(g.width());; u += 0.25 / std::sqrt(g.width())) {
    double p = 0.0;
    for (std::size_t m = 0; m < g.coeffs().size(); ++m) p += std::abs(g.coeffs()[m]) * std::pow(u, double(m));
    if (p * std::exp(-g.width() * u * u) < 1e-17 * qsum) return u;
  }
  return 0.0;  // unreachable
}

inline std::pair<double, double> box(const GaussPolySum& f) {
  double lo = 1e300, hi = -1e300;
  for (const auto& t : f.terms()) {
    const double r = truncation_radius(t);
    lo = std::min(lo, t.center() - r);
    hi = std::max(hi, t.center() + r);
  }
  return {lo, hi};
}

}  // namespace detail

/// Nested Gauss-Kronrod quadrature of the literal oscillatory double integral (lambda >= 0.3).
inline Quad2DResult direct_2d_quadrature(const GaussPolySum& f, const GaussPolySum& phi, double lambda,
                                         double tol = 1e-10) {
  if (!(lambda >= 0.3))
    throw Error(ErrorKind::accuracy, "direct oscillatory quadrature is restricted to lambda >= 0.3");
  Quad2DResult res;
  if (f.is_zero() || phi.is_zero()) return res;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double l2 = lambda * lambda;
  const auto [xlo, xhi] = detail::box(f);
  const auto [tlo, thi] = detail::box(phi);
  double inner_err_max = 0.0;
  auto inner = [&](double t, bool imag_part) {
    double err = 0.0;
    const double v = GK::integrate(
        [&](double x) {
          const Complex z = std::exp(I * (x * t / l2)) * f(x);
          return imag_part ? z.imag() : z.real();
        },
        xlo, xhi, 15, tol * 1e-2, &err);
    inner_err_max = std::max(inner_err_max, err);
    return v;
  };
  // (Re + i Im) of inner times phi, split into real/imag outer integrals.
  auto outer = [&](bool imag_part) {
    double err = 0.0;
    const double v = GK::integrate(
        [&](double t) {
          const Complex z = Complex{inner(t, false), inner(t, true)} * phi(t);
          return imag_part ? z.imag() : z.real();
        },
        tlo, thi, 15, tol, &err);
    return std::pair{v, err};
  };
  const auto [re, ere] = outer(false);
  const auto [im, eim] = outer(true);
  res.value = Complex{re, im} / l2;
  res.error = (ere + eim + inner_err_max * (thi - tlo)) / l2;
  return res;
}

struct RichardsonFit {
  std::vector<double> lambdas;
  std::vector<Complex> values;
  std::vector<int> powers;
  std::vector<Complex> coefficients;
  double residual = 0.0;   // RMS misfit
  double condition = 0.0;  // of the column-equilibrated design matrix
};

/// Least-squares fit values(l) ~ sum_p coeff_p l^p.
inline RichardsonFit richardson_extract(std::span<const double> lambdas, std::span<const Complex> values,
                                        std::span<const int> powers, double max_condition = 1e8) {
  if (lambdas.size() != values.size()) throw Error(ErrorKind::unsupported_input, "size mismatch");
  if (powers.empty()) throw Error(ErrorKind::unsupported_input, "no powers requested");
  if (lambdas.size() < powers.size() + 2)
    throw Error(ErrorKind::insufficient_data, "Richardson fit needs at least #powers + 2 samples");
  const auto m = static_cast<Eigen::Index>(lambdas.size());
  const auto n = static_cast<Eigen::Index>(powers.size());
  Eigen::MatrixXd V(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) V(i, j) = std::pow(lambdas[static_cast<std::size_t>(i)], powers[static_cast<std::size_t>(j)]);
  const Eigen::VectorXd colnorm = V.colwise().norm();
  const Eigen::MatrixXd Vs = V * colnorm.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Vs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  RichardsonFit fit;
  fit.lambdas.assign(lambdas.begin(), lambdas.end());
  fit.values.assign(values.begin(), values.end());
  fit.powers.assign(powers.begin(), powers.end());
  fit.condition = sv(0) / sv(n - 1);
  if (!(fit.condition <= max_condition))
    throw Error(ErrorKind::ill_conditioned, "Richardson design matrix is ill-conditioned", fit.condition);
  Eigen::VectorXd re(m), im(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    re(i) = values[static_cast<std::size_t>(i)].real();
    im(i) = values[static_cast<std::size_t>(i)].imag();
  }
  const Eigen::VectorXd cre = svd.solve(re).cwiseQuotient(colnorm);
  const Eigen::VectorXd cim = svd.solve(im).cwiseQuotient(colnorm);
  double ss = 0.0;
  const Eigen::VectorXd rre = V * cre - re, rim = V * cim - im;
  ss = rre.squaredNorm() + rim.squaredNorm();
  fit.residual = std::sqrt(ss / static_cast<double>(m));
  for (Eigen::Index j = 0; j < n; ++j) fit.coefficients.emplace_back(cre(j), cim(j));
  return fit;
}

struct TwoMode {
  Complex g1, g2;       // couplings
  double nu1, nu2;      // detunings omega_j - omega0
  Complex D = 1.0;      // scalar system operator
};

namespace detail {

inline Complex two_mode_amplitude(const TwoMode& m, double lambda, double t, int cutoff) {
  const int n = cutoff + 1;
  const int dim = n * n;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  auto kron = [&](const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    Eigen::MatrixXcd K(dim, dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) K.block(i * n, j * n, n, n) = A(i, j) * B;
    return K;
  };
  const Eigen::MatrixXcd a1 = kron(a, id), a2 = kron(id, a);
  const Eigen::MatrixXcd a1d = a1.adjoint(), a2d = a2.adjoint();
  // Rotating-frame Hamiltonian; <0|e^{iH0 t} e^{-iHt}|0> = <0|e^{-iHt}|0> since H0|0> = 0.
  const Eigen::MatrixXcd H = m.nu1 * a1d * a1 + m.nu2 * a2d * a2 +
                             lambda * (m.D * (m.g1 * a1d + m.g2 * a2d) +
                                       std::conj(m.D) * (std::conj(m.g1) * a1 + std::conj(m.g2) * a2));
  const Eigen::MatrixXcd U = (Complex{0.0, -t} * H).exp();
  return U(0, 0);
}

}  // namespace detail

/// Vacuum amplitude of the interaction-picture evolution for two discrete modes.
/// Throws accuracy if raising the per-mode cutoff by 2 moves the result by more than 1e-8.
inline Complex two_mode_propagator(const TwoMode& m, double lambda, double t, int fock_cutoff) {
  if (fock_cutoff < 4) throw Error(ErrorKind::unsupported_input, "Fock cutoff must be at least 4");
  const Complex lo = detail::two_mode_amplitude(m, lambda, t, fock_cutoff);
  const Complex hi = detail::two_mode_amplitude(m, lambda, t, fock_cutoff + 2);
  if (std::abs(hi - lo) > 1e-8)
    throw Error(ErrorKind::accuracy, "Fock cutoff too small for the requested coupling", std::abs(hi - lo));
  return lo;
}

/// \int_0^T (T - s) e^{-i nu s} ds.
inline Complex single_mode_kernel(double nu, double T) {
  const double x = nu * T;
  if (std::abs(x) < 0.5) {
    // sum_k (-i x)^k / (k! (k+1)(k+2)) T^2
    Complex term = 1.0, sum{};
    for (int k = 0; k < 30; ++k) {
      if (k > 0) term *= -I * x / static_cast<double>(k);
      sum += term / static_cast<double>((k + 1) * (k + 2));
    }
    return sum * (T * T);
  }
  return T / (I * nu) + (1.0 - std::exp(-I * x)) / (nu * nu);
}

/// Closed-form vacuum amplitude exp(-l^2 sum_j |D g_j|^2 \int_0^t (t-s) e^{-i nu_j s} ds).
inline Complex discrete_mode_amplitude(const TwoMode& m, double lambda, double t) {
  const double d2 = std::norm(m.D);
  return std::exp(-lambda * lambda * d2 *
                  (std::norm(m.g1) * single_mode_kernel(m.nu1, t) + std::norm(m.g2) * single_mode_kernel(m.nu2, t)));
}

}  // namespace stochlim::oracle
