#pragma once

// Vacuum expectations of the stochastic-limit models.
//
// Linear model (scalar D), T = t / l^2, u = omega - omega0:
//   <U_l(T)> = exp(-gamma_0 t |D|^2 + l^2 gamma_1 |D|^2 + l^2 |D|^2 C(T)),
//   C(T)     = \int rho(omega) e^{-iuT} / (u - i0)^2 d omega,   C(0) = -gamma_1.
// This is the cumulant exponential exp(-l^2 |D|^2 \int_0^T (T - s) G(s) ds) with
// G(s) = \int rho e^{-ius}, after splitting the entire kernel
//   \int_0^T (T - s) e^{-ius} ds = -iT/(u - i0) + 1/(u - i0)^2 - e^{-iuT}/(u - i0)^2.
// No extra phase appears; this was checked against exact two-mode propagation.
//
// Vacuum projection of the first-order equation: the noise terms act on the
// vacuum only through c|0> = 0 and <0|c^+ = 0, so <U_1> solves
// d<U_1>/dt = -gamma_0 D^+D <U_1> with <U_1(0)> = 0, hence <U_1> = 0.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stochlim/coeffs/coeffs.hpp"
#include "stochlim/core/error.hpp"
#include "stochlim/oracle/oracle.hpp"

namespace stochlim {

using Matrix = Eigen::MatrixXcd;

enum class ModelKind { linear, rwa_matrix, spin_boson };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::linear: return "linear";
    case ModelKind::rwa_matrix: return "rwa_matrix";
    case ModelKind::spin_boson: return "spin_boson";
  }
  return "?";
}

class SystemModel {
 public:
  SystemModel(ModelKind kind, Matrix D, Matrix Ddag, double omega0, SpectralProfile profile)
      : kind_(kind), D_(std::move(D)), Dd_(std::move(Ddag)), omega0_(omega0), rho_(std::move(profile)) {
    if (D_.rows() != D_.cols() || D_.rows() == 0) throw Error(ErrorKind::unsupported_input, "D must be square");
    if (Dd_.rows() != D_.rows() || Dd_.cols() != D_.cols() ||
        (Dd_ - D_.adjoint()).norm() > 1e-14 * (1.0 + D_.norm()))
      throw Error(ErrorKind::unsupported_input, "D^+ is not the conjugate transpose of D");
    if (kind_ == ModelKind::linear && D_.rows() != 1)
      throw Error(ErrorKind::unsupported_input, "linear model needs scalar D");
    if (kind_ == ModelKind::spin_boson && (D_ - spinboson_D()).norm() != 0.0)
      throw Error(ErrorKind::unsupported_input, "spin-boson model uses D = [[1,1],[-1,-1]]/2");
  }

  static SystemModel linear(Complex d, double omega0, SpectralProfile rho) {
    Matrix D(1, 1);
    D(0, 0) = d;
    return {ModelKind::linear, D, D.adjoint(), omega0, std::move(rho)};
  }
  static SystemModel rwa_matrix(const Matrix& D, double omega0, SpectralProfile rho) {
    return {ModelKind::rwa_matrix, D, D.adjoint(), omega0, std::move(rho)};
  }
  /// omega0 holds Delta.
  static SystemModel spin_boson(double delta, SpectralProfile rho) {
    const Matrix D = spinboson_D();
    return {ModelKind::spin_boson, D, D.adjoint(), delta, std::move(rho)};
  }

  static Matrix spinboson_D() {
    Matrix D(2, 2);
    D << 0.5, 0.5, -0.5, -0.5;
    return D;
  }

  ModelKind kind() const { return kind_; }
  const Matrix& D() const { return D_; }
  const Matrix& Ddag() const { return Dd_; }
  double omega0() const { return omega0_; }
  const SpectralProfile& profile() const { return rho_; }
  int dim() const { return static_cast<int>(D_.rows()); }

 private:
  ModelKind kind_;
  Matrix D_, Dd_;
  double omega0_;
  SpectralProfile rho_;
};

struct VacuumExpectation {
  Matrix value;
  int order = 0;  // power of lambda represented
  double t = 0.0;
  double truncation_bound = 0.0;
  int terms = 0;
};

// ---------------------------------------------------------------------------
// Linear model

/// \int rho(omega) e^{-i(omega - omega0) t} / (omega - omega0 - i0)^2 d omega,
/// to absolute accuracy opt.tol * max(1, t).
inline Complex c_of_t(const SpectralProfile& rho, double omega0, double t, const CoeffOptions& opt = {}) {
  if (t < 0.0) throw Error(ErrorKind::unsupported_input, "c_of_t needs t >= 0");
  if (rho.is_zero()) return {};
  detail::check_pole_location(rho, omega0);
  auto h = [&](double w) { return rho(w) * std::exp(-I * ((w - omega0) * t)); };
  auto dh = [&](double w) { return (rho.derivative(w, 1) - I * t * rho(w)) * std::exp(-I * ((w - omega0) * t)); };
  // h' carries a factor t, and so does the attainable absolute accuracy
  CoeffOptions scaled = opt;
  scaled.tol = opt.tol * std::max(1.0, t);
  PoleOptions po = detail::pole_opts(scaled);
  if (t > 0.0) po.max_window = std::min(po.max_window, 1.0 / t);
  return pole2(h, dh, omega0, rho.support_lo(), rho.support_hi(), po).value;
}

struct LinearAbc {
  Complex full;       // exp(A t + l^2 B + l^2 C(t/l^2))
  Complex truncated;  // e^{-gamma_0 t |D|^2} (1 + l^2 gamma_1 |D|^2)
  Complex gamma0, gamma1, C;
};

inline LinearAbc linear_abc(const SystemModel& m, double lambda, double t, const CoeffOptions& opt = {}) {
  if (m.kind() != ModelKind::linear || m.dim() != 1)
    throw Error(ErrorKind::unsupported_input, "linear_abc needs the linear model with scalar D");
  if (t < 0.0) throw Error(ErrorKind::unsupported_input, "t must be >= 0");
  const double d2 = std::norm(m.D()(0, 0));
  const double l2 = lambda * lambda;
  LinearAbc r;
  r.gamma0 = gamma_causal(m.profile(), m.omega0(), 0, opt);
  r.gamma1 = gamma_causal(m.profile(), m.omega0(), 1, opt);
  r.C = l2 > 0.0 ? c_of_t(m.profile(), m.omega0(), t / l2, opt) : Complex{};
  r.full = std::exp(-r.gamma0 * t * d2 + l2 * r.gamma1 * d2 + l2 * d2 * r.C);
  r.truncated = std::exp(-r.gamma0 * t * d2) * (1.0 + l2 * r.gamma1 * d2);
  return r;
}

/// exp(-l^2 |D|^2 \int_0^T (T - s) G(s) ds), T = t / l^2, written as a single
/// omega-integral of the entire kernel \int_0^T (T - s) e^{-ius} ds.
inline Complex cumulant_oracle(const SystemModel& m, double lambda, double t) {
  if (m.kind() != ModelKind::linear || m.dim() != 1)
    throw Error(ErrorKind::unsupported_input, "cumulant oracle needs the linear model with scalar D");
  const double l2 = lambda * lambda;
  if (t == 0.0 || l2 == 0.0 || m.profile().is_zero()) {
    if (l2 == 0.0 && t > 0.0) throw Error(ErrorKind::unsupported_input, "cumulant oracle needs lambda > 0");
    return 1.0;
  }
  const double T = t / l2;
  const auto& rho = m.profile();
  const double lo = rho.support_lo(), hi = rho.support_hi();
  // resolve the oscillation e^{-iuT}: break every quarter period
  const double step = std::min(0.5 * pi / T, 0.25);
  std::vector<double> breaks{lo, hi};
  for (double x = lo + step; x < hi; x += step) breaks.push_back(x);
  const double w0 = m.omega0();
  const Complex J = detail::boost_integrate(
      [&](double w) { return rho(w) * oracle::single_mode_kernel(w - w0, T); }, breaks, 1e-12);
  return std::exp(-l2 * std::norm(m.D()(0, 0)) * J);
}

// ---------------------------------------------------------------------------
// Matrix models

inline Matrix expm(const Matrix& A) { return A.exp(); }  // Pade scaling-and-squaring

/// exp(-gamma_0 t D^+D).
inline VacuumExpectation u0_vacuum(const Matrix& D, Complex gamma0, double t) {
  if (t < 0.0) throw Error(ErrorKind::unsupported_input, "t must be >= 0");
  const Matrix M = D.adjoint() * D;
  return {expm(-gamma0 * t * M), 0, t, 0.0, 0};
}

inline VacuumExpectation u0_vacuum(const SystemModel& m, double t, const CoeffOptions& opt = {}) {
  return u0_vacuum(m.D(), gamma_causal(m.profile(), m.omega0(), 0, opt), t);
}

/// <U_1(t)> = 0.
inline VacuumExpectation u1_vacuum(const SystemModel& m, double t) {
  if (t < 0.0) throw Error(ErrorKind::unsupported_input, "t must be >= 0");
  return {Matrix::Zero(m.dim(), m.dim()), 1, t, 0.0, 0};
}

/// e^{-g0 t M}[I + l^2 g1 M (I - g0 t M)] - l^2 g1 sum_{k>=1} (-g0 t)^k / k! S_k,
/// S_k = sum_{p=1}^k M^{p-1} Q M^{k-p},  M = D^+D,  Q = D^+^2 D^2.
/// Stops once the factorial tail bound falls below series_tol * |partial sum|.
inline VacuumExpectation rwa_matrix_vacuum(const Matrix& D, Complex gamma0, Complex gamma1, double lambda, double t,
                                           double series_tol = 1e-15, int k_max = 200) {
  if (t < 0.0) throw Error(ErrorKind::unsupported_input, "t must be >= 0");
  const Eigen::Index n = D.rows();
  const Matrix Id = Matrix::Identity(n, n);
  const Matrix Dd = D.adjoint();
  const Matrix M = Dd * D;
  const Matrix Q = Dd * Dd * D * D;
  const double l2 = lambda * lambda;
  const Complex x = -gamma0 * t;

  VacuumExpectation r;
  r.t = t;
  r.order = 2;
  const Matrix E = expm(x * M);
  r.value = E * (Id + l2 * gamma1 * M * (Id + x * M));

  // The sum is the Frechet derivative of exp at xM in direction xQ, and that
  // derivative picks up e^{x mu} when M is shifted by mu Id. Summing with the
  // traceless part keeps the terms small when |x| is large (no cancellation).
  const double mu = M.trace().real() / static_cast<double>(n);
  const Matrix Ms = M - mu * Id;
  const Complex shift = std::exp(x * mu);
  const double qn = Q.norm(), mn = Ms.norm(), y = std::abs(x), z = y * mn;
  const double pref = std::abs(l2 * gamma1 * shift);
  if (qn == 0.0 || y == 0.0 || pref == 0.0) return r;

  Matrix S = Q, Mk = Ms, series = Matrix::Zero(n, n);
  Complex coef = 1.0;  // x^k / k!
  double zk = 1.0;     // z^k / k!
  for (int k = 1; k <= k_max; ++k) {
    coef *= x / static_cast<double>(k);
    zk *= z / static_cast<double>(k);
    series += coef * S;
    // |sum_{j>k} x^j/j! S_j| <= |Q| y sum_{j>k} z^{j-1}/(j-1)! <= |Q| y z^k/k! e^z
    const double bound = pref * qn * y * zk * std::exp(z);
    const Matrix partial = r.value - l2 * gamma1 * shift * series;
    if (bound <= series_tol * std::max(partial.norm(), std::numeric_limits<double>::min())) {
      r.value = partial;
      r.truncation_bound = bound;
      r.terms = k;
      return r;
    }
    S = Ms * S + Q * Mk;
    Mk = Mk * Ms;
  }
  throw Error(ErrorKind::accuracy, "series tolerance unreachable within k_max terms");
}

inline VacuumExpectation rwa_matrix_vacuum(const SystemModel& m, double lambda, double t, double series_tol = 1e-15,
                                           const CoeffOptions& opt = {}) {
  return rwa_matrix_vacuum(m.D(), gamma_causal(m.profile(), m.omega0(), 0, opt),
                           gamma_causal(m.profile(), m.omega0(), 1, opt), lambda, t, series_tol);
}

// ---------------------------------------------------------------------------
// Spin-boson model (epsilon = 0), P = DD^+, Q = D^+D

namespace detail {

inline Matrix sb_P() {
  const Matrix D = SystemModel::spinboson_D();
  return D * D.adjoint();
}
inline Matrix sb_Q() {
  const Matrix D = SystemModel::spinboson_D();
  return D.adjoint() * D;
}

/// Classic fourth-order Runge-Kutta for Y' = F(t, Y) on [0, t_end] with n steps.
inline Matrix rk4(const std::function<Matrix(double, const Matrix&)>& F, Matrix Y, double t_end, int steps) {
  const double h = t_end / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const Matrix k1 = F(t, Y);
    const Matrix k2 = F(t + 0.5 * h, Y + 0.5 * h * k1);
    const Matrix k3 = F(t + 0.5 * h, Y + 0.5 * h * k2);
    const Matrix k4 = F(t + h, Y + h * k3);
    Y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return Y;
}

}  // namespace detail

/// e^{iA_1 t} DD^+ + e^{iA_2 t} D^+D.
inline VacuumExpectation spinboson_u0(const SpinBosonConstants& c, double t) {
  if (t < 0.0) throw Error(ErrorKind::unsupported_input, "t must be >= 0");
  return {std::exp(I * c.A[0] * t) * detail::sb_P() + std::exp(I * c.A[1] * t) * detail::sb_Q(), 0, t, 0.0, 0};
}

/// Right side of f' = (iA_1 P + iA_2 Q) f - P C_1 e^{iA_1 t} - Q C_2 e^{iA_2 t}.
inline Matrix spinboson_correction_rhs(const SpinBosonConstants& c, double t, const Matrix& f) {
  const Matrix P = detail::sb_P(), Q = detail::sb_Q();
  const Matrix gen = I * c.A[0] * P + I * c.A[1] * Q;
  return gen * f - P * (c.C[0] * std::exp(I * c.A[0] * t)) - Q * (c.C[1] * std::exp(I * c.A[1] * t));
}

inline Matrix spinboson_correction_initial(const SpinBosonConstants& c) {
  return -c.B[0] * detail::sb_P() - c.B[1] * detail::sb_Q();
}

inline VacuumExpectation spinboson_correction_ode(const SpinBosonConstants& c, double t_end, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::config, "ODE step must be positive");
  if (t_end < 0.0) throw Error(ErrorKind::unsupported_input, "t must be >= 0");
  const int n = std::max(1, static_cast<int>(std::ceil(t_end / step - 1e-9)));
  auto F = [&c](double t, const Matrix& f) { return spinboson_correction_rhs(c, t, f); };
  return {detail::rk4(F, spinboson_correction_initial(c), t_end, n), 2, t_end, 0.0, n};
}

/// (-B_1 - C_1 t) e^{iA_1 t} DD^+ + (-B_2 - C_2 t) e^{iA_2 t} D^+D.
inline VacuumExpectation spinboson_correction_closed(const SpinBosonConstants& c, double t) {
  if (t < 0.0) throw Error(ErrorKind::unsupported_input, "t must be >= 0");
  const Matrix v = (-c.B[0] - c.C[0] * t) * std::exp(I * c.A[0] * t) * detail::sb_P() +
                   (-c.B[1] - c.C[1] * t) * std::exp(I * c.A[1] * t) * detail::sb_Q();
  return {v, 2, t, 0.0, 0};
}

/// Time derivative of the closed form.
inline Matrix spinboson_correction_closed_derivative(const SpinBosonConstants& c, double t) {
  Matrix v = Matrix::Zero(2, 2);
  const Matrix PQ[2] = {detail::sb_P(), detail::sb_Q()};
  for (int l = 0; l < 2; ++l)
    v += (-c.C[l] + I * c.A[l] * (-c.B[l] - c.C[l] * t)) * std::exp(I * c.A[l] * t) * PQ[l];
  return v;
}

/// e^{iA_1 t}[1 - l^2 (B_1 + C_1 t)] DD^+ + e^{iA_2 t}[1 - l^2 (B_2 + C_2 t)] D^+D.
inline VacuumExpectation spinboson_vacuum(const SpinBosonConstants& c, double lambda, double t) {
  const double l2 = lambda * lambda;
  const Matrix v = std::exp(I * c.A[0] * t) * (1.0 - l2 * (c.B[0] + c.C[0] * t)) * detail::sb_P() +
                   std::exp(I * c.A[1] * t) * (1.0 - l2 * (c.B[1] + c.C[1] * t)) * detail::sb_Q();
  return {v, 2, t, 0.0, 0};
}

// ---------------------------------------------------------------------------
// Multipole pairing

/// Coefficient of l^{2(n+1)} in the smeared two-point function
///   W(l) = \int\int conj(phi(t)) psi(s) G((s - t)/l^2) dt ds,  G(s) = \int rho(omega) e^{-i(omega - omega0)s} d omega,
/// since l^{-2} G(s/l^2) = sum_n l^{2n} (-1)^n gamma~_n delta^(n)(s):
///   term_n = gamma~_n \int conj(phi) psi^(n) dt.
inline Complex multipole_pairing_term(int n, const GaussPolySum& phi, const GaussPolySum& psi,
                                      const SpectralProfile& rho, double omega0) {
  if (n < 0 || n > 2) throw Error(ErrorKind::capability, "multipole pairing is implemented for n <= 2");
  GaussPolySum d = psi;
  for (int k = 0; k < n; ++k) d = d.derivative();
  return gamma_full(rho, omega0, n) * (phi.conj() * d).integral();
}

/// W(l) on the Fourier side: l^2 \int rho(omega0 - l^2 v) conj(phi~(v)) psi~(v) dv.
inline Complex multipole_two_point(const GaussPolySum& phi, const GaussPolySum& psi, const SpectralProfile& rho,
                                   double omega0, double lambda) {
  const auto pf = phi.fourier(), sf = psi.fourier();
  const GaussPolySum prod = pf.conj() * sf;
  if (prod.is_zero() || rho.is_zero()) return {};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& t : prod.terms()) {
    const double u0 = detail::tail_offset(t, 1e-18);
    lo = std::min(lo, t.center() - u0);
    hi = std::max(hi, t.center() + u0);
  }
  const double l2 = lambda * lambda;
  std::vector<double> breaks{lo, hi};
  for (int k = 1; k < 16; ++k) breaks.push_back(lo + (hi - lo) * k / 16.0);
  return l2 * detail::boost_integrate(
                  [&](double v) { return rho(omega0 - l2 * v) * std::conj(pf(v)) * sf(v); }, breaks, 1e-13);
}

}  // namespace stochlim
