#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stochlim/models/models.hpp"
#include "stochlim/oscint/oscint.hpp"

using namespace stochlim;

namespace {

const double kRootPi = std::sqrt(pi);

SpectralProfile gauss_profile(double w0) { return SpectralProfile::synthetic(GaussPoly::gaussian(1.0, w0)); }

SpectralProfile skewed_profile() {
  const std::vector<Complex> p{1.0, 0.0, 0.25};
  return SpectralProfile::synthetic(GaussPoly::from_power(p, 1.0, 1.7));
}

SpectralProfile massless_profile() { return radial_reduce({DispersionKind::massless}, GaussPoly::gaussian(0.5), 3); }

/// C(T) for rho = e^{-(omega - omega0)^2}: -\int_T^inf (s - T) sqrt(pi) e^{-s^2/4} ds.
double gaussian_c(double T) {
  return -kRootPi * (2.0 * std::exp(-0.25 * T * T) - T * kRootPi * std::erfc(0.5 * T));
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix random_matrix(int n, std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex{g(rng), g(rng)};
  return m;
}

SpinBosonConstants synthetic_constants() {
  SpinBosonConstants c;
  c.A = {I * 0.3, I * 0.5};
  c.B = {1.0, 1.0};
  c.C = {1.0, 1.0};
  return c;
}

}  // namespace

TEST(SystemModel, Validation) {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 1) = 1.0;
  EXPECT_THROW(SystemModel(ModelKind::rwa_matrix, D, D, 1.0, gauss_profile(1.0)), Error);
  EXPECT_NO_THROW(SystemModel::rwa_matrix(D, 1.0, gauss_profile(1.0)));
  EXPECT_THROW(SystemModel(ModelKind::linear, D, D.adjoint(), 1.0, gauss_profile(1.0)), Error);
  EXPECT_THROW(SystemModel(ModelKind::spin_boson, D, D.adjoint(), 1.0, gauss_profile(1.0)), Error);
}

TEST(SystemModel, SpinBosonAlgebra) {
  const Matrix D = SystemModel::spinboson_D();
  const Matrix Dd = D.adjoint();
  const Matrix P = D * Dd;
  EXPECT_EQ(max_abs(D * D), 0.0);
  EXPECT_EQ(max_abs(Dd * Dd), 0.0);
  EXPECT_LT(max_abs(P * P - P), 1e-16);
  EXPECT_LT(max_abs(P + Dd * D - Matrix::Identity(2, 2)), 1e-16);
}

TEST(COfT, Examples) {
  const auto rho = gauss_profile(2.0);
  EXPECT_NEAR(std::abs(c_of_t(rho, 2.0, 0.0) + gamma_causal(rho, 2.0, 1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(c_of_t(rho, 2.0, 0.0) + 2.0 * kRootPi), 0.0, 1e-10);
  EXPECT_EQ(c_of_t(rho.scaled(0.0), 2.0, 3.0), Complex{});
  EXPECT_THROW((void)c_of_t(rho, 2.0, -1.0), Error);
  EXPECT_LE(std::abs(c_of_t(rho, 2.0, 50.0)), 0.05 * std::abs(c_of_t(rho, 2.0, 0.0)));
}

TEST(COfT, GaussianTimeDomainClosedForm) {
  const auto rho = gauss_profile(2.0);
  for (double T : {0.3, 1.0, 2.5, 6.0, 20.0, 200.0})
    EXPECT_NEAR(std::abs(c_of_t(rho, 2.0, T) - gaussian_c(T)), 0.0, 1e-11 * (1.0 + T)) << T;
}

TEST(COfT, DecaysOnTimeGrid) {
  const auto rho = massless_profile();
  const double c0 = std::abs(c_of_t(rho, 1.0, 0.0));
  double prev = c0;
  for (double T : {5.0, 20.0, 80.0}) {
    const double c = std::abs(c_of_t(rho, 1.0, T));
    EXPECT_LT(c, prev) << T;
    prev = c;
  }
  EXPECT_LT(prev, 0.05 * c0);
}

TEST(LinearAbc, ZeroCouplingAndGaussianExample) {
  const auto m = SystemModel::linear(1.0, 2.0, gauss_profile(2.0));
  const auto r0 = linear_abc(m, 0.0, 1.3);
  EXPECT_NEAR(std::abs(r0.full - std::exp(-pi * 1.3)), 0.0, 1e-12);
  EXPECT_EQ(r0.full, r0.truncated);
  const auto r = linear_abc(m, 0.1, 1.0);
  EXPECT_NEAR(std::abs(r.truncated - std::exp(-pi) * (1.0 + 0.02 * kRootPi)), 0.0, 1e-12);
}

TEST(LinearAbc, TruncatedFormIsSecondOrder) {
  const LambdaGrid grid({0.3, 0.25, 0.2, 0.15, 0.1, 0.07});
  for (const auto& rho : {gauss_profile(2.0), skewed_profile()}) {
    const auto m = SystemModel::linear(Complex{0.8, 0.3}, 2.0, rho);
    std::vector<double> res;
    for (double l : grid.values()) {
      const auto r = linear_abc(m, l, 1.0);
      res.push_back(std::abs(r.full - r.truncated));
    }
    EXPECT_GE(convergence_slope(res, grid, 1e-13).slope, 2.5);
  }
}

TEST(Cumulant, TrivialCases) {
  const auto m = SystemModel::linear(1.0, 2.0, gauss_profile(2.0));
  EXPECT_EQ(cumulant_oracle(m, 0.3, 0.0), Complex{1.0});
  const auto z = SystemModel::linear(1.0, 2.0, gauss_profile(2.0).scaled(0.0));
  EXPECT_EQ(cumulant_oracle(z, 0.3, 1.0), Complex{1.0});
}

TEST(Cumulant, AgreesWithAbcFormula) {
  struct Case {
    const char* name;
    SpectralProfile rho;
    double w0;
  };
  const std::vector<Case> cases{{"gaussian", gauss_profile(2.0), 2.0},
                                {"skewed", skewed_profile(), 2.0},
                                {"massless-3d", massless_profile(), 1.0}};
  for (const auto& c : cases) {
    const auto m = SystemModel::linear(Complex{0.6, -0.2}, c.w0, c.rho);
    for (double l : {0.3, 0.2, 0.1})
      for (double t : {0.5, 1.0, 2.0}) {
        const Complex abc = linear_abc(m, l, t).full;
        const Complex cum = cumulant_oracle(m, l, t);
        EXPECT_NEAR(std::abs(abc - cum), 0.0, 1e-6 * std::abs(cum)) << c.name << " l=" << l << " t=" << t;
      }
  }
}

TEST(Rwa, ScalarReduction) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int draw = 0; draw < 10; ++draw) {
    const Complex g0{u(rng), u(rng) - 1.0};
    const Complex g1{u(rng) - 1.0, u(rng) - 1.0};
    const double t = u(rng), l = 0.5 * u(rng);
    Matrix D(1, 1);
    D(0, 0) = Complex{u(rng), u(rng) - 1.0};
    const double d2 = std::norm(D(0, 0));
    const auto v = rwa_matrix_vacuum(D, g0, g1, l, t);
    const Complex expect = std::exp(-g0 * t * d2) * (1.0 + l * l * g1 * d2);
    EXPECT_NEAR(std::abs(v.value(0, 0) - expect), 0.0, 1e-10 * std::max(1.0, std::abs(expect))) << draw;
  }
}

TEST(Rwa, NilpotentDKillsSeries) {
  const Matrix D = SystemModel::spinboson_D();
  const Complex g0{1.1, 0.4}, g1{0.3, -0.7};
  const double l = 0.2, t = 1.5;
  const Matrix M = D.adjoint() * D;
  const Matrix Id = Matrix::Identity(2, 2);
  const auto v = rwa_matrix_vacuum(D, g0, g1, l, t);
  const Matrix bracket = (-g0 * t * M).exp() * (Id + l * l * g1 * M * (Id - g0 * t * M));
  EXPECT_EQ(v.terms, 0);
  EXPECT_LT(max_abs(v.value - bracket), 1e-15);
}

TEST(Rwa, InitialTime) {
  std::mt19937 rng(3);
  const Matrix D = random_matrix(3, rng, 0.5);
  const auto v = rwa_matrix_vacuum(D, Complex{1.0, 0.2}, Complex{0.5, 0.1}, 0.3, 0.0);
  const Matrix expect = Matrix::Identity(3, 3) + 0.09 * Complex{0.5, 0.1} * D.adjoint() * D;
  EXPECT_LT(max_abs(v.value - expect), 1e-15);
}

TEST(Rwa, SeriesMatchesBlockExponential) {
  // sum_k x^k/k! S_k is the Frechet derivative of exp at xM in direction xQ:
  // the upper-right block of exp([[xM, xQ], [0, xM]]).
  std::mt19937 rng(12);
  for (int draw = 0; draw < 5; ++draw) {
    const Matrix D = random_matrix(3, rng, 0.6);
    const Complex g0{0.9, 0.3}, g1{0.4, -0.2};
    const double l = 0.25, t = 0.8;
    const Matrix M = D.adjoint() * D, Q = D.adjoint() * D.adjoint() * D * D;
    const Complex x = -g0 * t;
    Matrix big = Matrix::Zero(6, 6);
    big.topLeftCorner(3, 3) = x * M;
    big.bottomRightCorner(3, 3) = x * M;
    big.topRightCorner(3, 3) = x * Q;
    const Matrix L = big.exp().topRightCorner(3, 3);
    const Matrix Id = Matrix::Identity(3, 3);
    const Matrix expect = (x * M).exp() * (Id + l * l * g1 * M * (Id + x * M)) - l * l * g1 * L;
    const auto v = rwa_matrix_vacuum(D, g0, g1, l, t);
    EXPECT_LT(max_abs(v.value - expect), 1e-12) << draw;
    EXPECT_GT(v.terms, 0);
    EXPECT_LT(v.truncation_bound, 1e-14 * v.value.norm());
  }
}

TEST(Rwa, ScalarReductionAtLargeDecay) {
  // |gamma0 t| |d|^2 around 25: the unshifted series would cancel badly here.
  const Complex d{0.6, -0.2};
  Matrix D(1, 1);
  D(0, 0) = d;
  const Complex g0{12.0, -30.0}, g1{0.7, 1.1};
  const double l = 0.3, t = 2.0, m = std::norm(d);
  const Complex x = -g0 * t;
  const Complex expect = std::exp(x * m) * (1.0 + l * l * g1 * m * (1.0 + x * m) - l * l * g1 * x * m * m);
  const auto v = rwa_matrix_vacuum(D, g0, g1, l, t);
  EXPECT_LT(std::abs(v.value(0, 0) - expect), 1e-12 * std::abs(expect));
}

TEST(Rwa, UnreachableTolerance) {
  std::mt19937 rng(1);
  const Matrix D = random_matrix(3, rng, 3.0);
  EXPECT_THROW((void)rwa_matrix_vacuum(D, Complex{0.0, 5.0}, Complex{1.0}, 0.3, 10.0, 1e-15, 3), Error);
}

TEST(U0, SemigroupOdeAndScalarCase) {
  std::mt19937 rng(4);
  const Matrix D = random_matrix(3, rng, 0.5);
  const Complex g0{0.8, 0.25};
  const Matrix a = u0_vacuum(D, g0, 0.7).value, b = u0_vacuum(D, g0, 1.1).value;
  EXPECT_LT(max_abs(u0_vacuum(D, g0, 1.8).value - a * b), 1e-10);
  EXPECT_LT(max_abs(u0_vacuum(D, g0, 0.0).value - Matrix::Identity(3, 3)), 0.0 + 1e-300);

  const Matrix gen = -g0 * D.adjoint() * D;
  auto F = [&](double, const Matrix& Y) -> Matrix { return gen * Y; };
  const Matrix ode = detail::rk4(F, Matrix::Identity(3, 3), 2.0, 2000);
  EXPECT_LT(max_abs(ode - u0_vacuum(D, g0, 2.0).value), 1e-8);

  const auto m = SystemModel::linear(Complex{0.7, 0.1}, 2.0, gauss_profile(2.0));
  EXPECT_NEAR(std::abs(u0_vacuum(m, 1.2).value(0, 0) - linear_abc(m, 0.0, 1.2).full), 0.0, 1e-13);
  EXPECT_EQ(max_abs(u1_vacuum(m, 3.0).value), 0.0);
}

TEST(SpinBoson, U0Examples) {
  const auto c = synthetic_constants();
  EXPECT_LT(max_abs(spinboson_u0(c, 0.0).value - Matrix::Identity(2, 2)), 1e-16);
  SpinBosonConstants same = c;
  same.A = {Complex{0.4, 0.1}, Complex{0.4, 0.1}};
  EXPECT_LT(max_abs(spinboson_u0(same, 2.0).value - std::exp(I * same.A[0] * 2.0) * Matrix::Identity(2, 2)), 1e-15);
  const double h = 1e-6;
  const Matrix fd = (spinboson_u0(c, h).value - spinboson_u0(c, 0.0).value) / h;
  const Matrix gen = I * c.A[0] * detail::sb_P() + I * c.A[1] * detail::sb_Q();
  EXPECT_LT(max_abs(fd - gen), 1e-5);
}

TEST(SpinBoson, OdeHomogeneousCase) {
  SpinBosonConstants c = synthetic_constants();
  c.B = {Complex{0.3, 0.2}, Complex{-0.4, 0.1}};
  c.C = {0.0, 0.0};
  const double t = 3.0;
  const Matrix expect = -c.B[0] * std::exp(I * c.A[0] * t) * detail::sb_P() -
                        c.B[1] * std::exp(I * c.A[1] * t) * detail::sb_Q();
  EXPECT_LT(max_abs(spinboson_correction_ode(c, t, 1e-3).value - expect), 1e-10);
}

TEST(SpinBoson, OdeMatchesClosedFormAndIsFourthOrder) {
  const auto c = synthetic_constants();
  const Matrix exact = spinboson_correction_closed(c, 5.0).value;
  EXPECT_LT(max_abs(spinboson_correction_ode(c, 5.0, 1e-3).value - exact), 1e-8);
  for (double t : {1.0, 2.5, 4.0})
    EXPECT_LT(max_abs(spinboson_correction_ode(c, t, 1e-3).value - spinboson_correction_closed(c, t).value), 1e-8);
  const double e1 = max_abs(spinboson_correction_ode(c, 5.0, 0.1).value - exact);
  const double e2 = max_abs(spinboson_correction_ode(c, 5.0, 0.05).value - exact);
  EXPECT_GE(e1 / e2, 12.0);
  EXPECT_LE(e1 / e2, 20.0);
}

TEST(SpinBoson, ClosedFormResidualAndVacuumFormula) {
  const auto rho = massless_profile();
  const auto c = spinboson_constants(rho, 1.2);
  EXPECT_LT(max_abs(spinboson_correction_closed(c, 0.0).value - spinboson_correction_initial(c)), 1e-15);
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int k = 0; k < 10; ++k) {
    const double t = u(rng);
    const Matrix f = spinboson_correction_closed(c, t).value;
    const Matrix res = spinboson_correction_closed_derivative(c, t) - spinboson_correction_rhs(c, t, f);
    EXPECT_LT(max_abs(res), 1e-12 * (1.0 + max_abs(f))) << t;
    for (double l : {0.1, 0.3}) {
      const Matrix sp = spinboson_vacuum(c, l, t).value;
      const Matrix parts = spinboson_u0(c, t).value + l * l * f;
      EXPECT_LT(max_abs(sp - parts), 1e-12 * (1.0 + max_abs(sp))) << t;
    }
  }
}

TEST(Multipole, ExamplesAndLocality) {
  const auto rho = skewed_profile();
  const GaussPolySum phi = GaussPoly::gaussian(1.0, 0.2), psi = GaussPoly({1.0, 0.5}, 0.8, -0.1);
  const Complex t0 = multipole_pairing_term(0, phi, psi, rho, 2.0);
  EXPECT_NEAR(std::abs(t0 - gamma_full(rho, 2.0, 0) * (phi.conj() * psi).integral()), 0.0, 1e-14);
  const GaussPolySum far = GaussPoly::gaussian(1.0, 10.0);
  for (int n = 0; n <= 2; ++n) EXPECT_LT(std::abs(multipole_pairing_term(n, phi, far, rho, 2.0)), 1e-8) << n;
  EXPECT_THROW((void)multipole_pairing_term(3, phi, psi, rho, 2.0), Error);
}

TEST(Multipole, RichardsonExtractionMatchesTerms) {
  const auto rho = skewed_profile();
  const GaussPolySum phi = GaussPoly({1.0, Complex{0.0, 0.3}}, 1.0, 0.2);
  const GaussPolySum psi = GaussPoly({1.0, 0.5}, 0.8, -0.1);
  const std::vector<double> ls{0.15, 0.13, 0.11, 0.09, 0.07, 0.05, 0.04, 0.03};
  std::vector<Complex> w;
  for (double l : ls) w.push_back(multipole_two_point(phi, psi, rho, 2.0, l));
  const std::vector<int> powers{2, 4, 6, 8, 10, 12};
  const auto fit = oracle::richardson_extract(ls, w, powers);
  for (int n = 0; n <= 2; ++n) {
    const Complex term = multipole_pairing_term(n, phi, psi, rho, 2.0);
    const Complex got = fit.coefficients[static_cast<std::size_t>(n)];
    EXPECT_NEAR(std::abs(got - term), 0.0, 1e-4 * std::abs(term)) << n << " " << got << " vs " << term;
  }
}
