#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "stochlim/coeffs/coeffs.hpp"

using namespace stochlim;

namespace {

const double kRootPi = std::sqrt(pi);

SpectralProfile gauss_profile(double w0) { return SpectralProfile::synthetic(GaussPoly::gaussian(1.0, w0)); }

SpectralProfile skewed_profile() {
  // (1 + 0.25 w^2) e^{-(w - 1.7)^2}
  const std::vector<Complex> p{1.0, 0.0, 0.25};
  return SpectralProfile::synthetic(GaussPoly::from_power(p, 1.0, 1.7));
}

struct Case {
  const char* name;
  SpectralProfile rho;
  double omega0;
};

std::vector<Case> corpus() {
  return {
      {"gaussian", gauss_profile(2.0), 2.0},
      {"skewed", skewed_profile(), 2.0},
      {"massless-3d", radial_reduce({DispersionKind::massless}, GaussPoly::gaussian(0.5), 3), 1.0},
      {"massive-3d", radial_reduce({DispersionKind::massive, 0.5}, GaussPoly::gaussian(0.4, 0.3), 3), 1.5},
      {"quadratic-3d", radial_reduce({DispersionKind::polynomial, 0.0, {0.0, 1.0, 0.5}}, GaussPoly::gaussian(0.7), 3),
       1.0},
      {"ray-1d", radial_reduce({DispersionKind::massless}, GaussPoly({1.0, 0.5}, 1.0, 0.8), 1, true), 0.8},
  };
}

}  // namespace

TEST(GammaFull, Examples) {
  const auto rho = gauss_profile(2.0);
  EXPECT_NEAR(std::abs(gamma_full(rho, 2.0, 0) - 2.0 * pi), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(gamma_full(rho, 2.0, 1)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(gamma_full(rho, 2.0, 3)), 0.0, 1e-13);
  // n = 2: 2 pi (-i)^2 rho''/2 = -pi * (-2) = 2 pi
  EXPECT_NEAR(std::abs(gamma_full(rho, 2.0, 2) - 2.0 * pi), 0.0, 1e-13);
  EXPECT_EQ(gamma_full(rho.scaled(0.0), 2.0, 1), Complex{});
  EXPECT_THROW((void)gamma_full(rho, 2.0, 9), Error);
}

TEST(GammaFull, AgreesWithRegularizedSigmaIntegral) {
  // asymmetric profile so that every order is nonzero
  const auto rho = skewed_profile();
  for (int n = 0; n <= 3; ++n) {
    const Complex closed = gamma_full(rho, 2.0, n);
    const Complex reg = gamma_full_regularized(rho, 2.0, n);
    EXPECT_NEAR(std::abs(closed - reg), 0.0, 1e-8 * (1.0 + std::abs(closed))) << n;
  }
}

TEST(GammaCausal, GaussianAnalytics) {
  const auto rho = gauss_profile(2.0);
  EXPECT_NEAR(std::abs(gamma_causal(rho, 2.0, 0) - pi), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(gamma_causal(rho, 2.0, 1) - 2.0 * kRootPi), 0.0, 1e-10);
  EXPECT_THROW((void)gamma_causal(rho, 2.0, 2), Error);
}

TEST(GammaCausal, ProfileAboveResonanceIsPurelyImaginary) {
  const auto rho = SpectralProfile::synthetic(GaussPoly::gaussian(1.0, 5.0), 3.0);
  const Complex g0 = gamma_causal(rho, 1.0, 0);
  EXPECT_EQ(g0.real(), 0.0);
  EXPECT_GT(std::abs(g0.imag()), 0.0);
}

TEST(GammaCausal, PoleAtSupportEdgeUnsupported) {
  const auto rho = SpectralProfile::synthetic(GaussPoly::gaussian(1.0, 2.0), 1.0);
  try {
    (void)gamma_causal(rho, 1.0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported_input);
  }
}

TEST(GammaCausal, ZeroProfile) {
  const auto rho = gauss_profile(2.0).scaled(0.0);
  const auto r0 = cross_validate_gamma(rho, 2.0, 0);
  EXPECT_EQ(r0.route1, Complex{});
  EXPECT_EQ(r0.route2, Complex{});
}

TEST(CrossValidate, PlemeljAgainstDampedRouteOnCorpus) {
  for (const auto& c : corpus()) {
    for (int n = 0; n <= 1; ++n) {
      const auto r = cross_validate_gamma(c.rho, c.omega0, n);
      EXPECT_LE(r.gap, 1e-6 * (1.0 + std::abs(r.route1))) << c.name << " n=" << n;
    }
  }
}

TEST(CrossValidate, FullLineIsCausalPlusAnticausal) {
  for (const auto& c : corpus()) {
    const Complex g0 = gamma_causal(c.rho, c.omega0, 0);
    EXPECT_NEAR(std::abs(gamma_full(c.rho, c.omega0, 0) - (g0 + std::conj(g0))), 0.0, 1e-8) << c.name;
    EXPECT_GE(g0.real(), 0.0);
  }
}

TEST(CrossValidate, ScalingCovariance) {
  const auto rho = skewed_profile();
  const double s = 3.0;
  for (int n = 0; n <= 1; ++n) {
    const Complex a = gamma_causal(rho, 2.0, n), b = gamma_causal(rho.scaled(s), 2.0, n);
    EXPECT_NEAR(std::abs(b - s * a), 0.0, 1e-10 * std::abs(s * a)) << n;
  }
}

TEST(SpinBoson, ResonanceDeltaTermAndDampedRoute) {
  const double delta = 2.0;
  const auto rho = SpectralProfile::synthetic(GaussPoly::gaussian(1.0, delta), 0.0);
  const auto c = spinboson_constants(rho, delta);
  // Plemelj: Im A_1 = pi rho(Delta); A_2 has no pole on the support
  EXPECT_NEAR(c.A[0].imag(), pi * rho(delta), 1e-10);
  EXPECT_EQ(c.A[1].imag(), 0.0);
  for (int l = 0; l < 2; ++l) {
    const double x0 = l == 0 ? delta : -delta;
    EXPECT_NEAR(std::abs(c.A[l] - damped_pole(rho, x0, 1)), 0.0, 1e-6 * (1.0 + std::abs(c.A[l]))) << l;
    EXPECT_NEAR(std::abs(c.B[l] - damped_pole(rho, x0, 2)), 0.0, 1e-6 * (1.0 + std::abs(c.B[l]))) << l;
    EXPECT_EQ(c.C[l], I * c.A[l] * c.B[l] - I * c.Z[l]);
  }
}

TEST(SpinBoson, ResonanceOffSupportLeavesPrincipalValueOnly) {
  const auto rho = SpectralProfile::synthetic(GaussPoly::gaussian(1.0, 4.0), 2.5);
  const auto c = spinboson_constants(rho, 1.0);
  EXPECT_EQ(c.A[0].imag(), 0.0);
  EXPECT_EQ(c.B[0].imag(), 0.0);
}

TEST(SpinBoson, ZAgreesWithLaplaceFactorization) {
  // 1/(x+y) = \int_0^inf e^{-s(x+y)} ds turns Z into nested one-dimensional integrals:
  //   Z = \int_0^inf [P2(s) L(s) + P1(s)^2] ds,
  //   P_k(s) = \int rho(x) e^{-sx}/(x - d - i0)^k dx,  L(s) = \int rho(y) e^{-sy} dy.
  const double delta = 1.2;
  const auto rho = radial_reduce({DispersionKind::massless}, GaussPoly::gaussian(0.5), 3);
  const auto c = spinboson_constants(rho, delta);
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double lo = rho.support_lo(), hi = rho.support_hi();
  PoleOptions po;
  po.quad.abs_tol = 1e-12;
  for (int l = 0; l < 2; ++l) {
    const double d = l == 0 ? delta : -delta;
    auto integrand = [&](double u) -> Complex {
      // s = u / (1 - u)
      const double s = u / (1.0 - u), jac = 1.0 / ((1.0 - u) * (1.0 - u));
      auto h = [&](double x) { return Complex{rho(x) * std::exp(-s * x)}; };
      auto dh = [&](double x) { return Complex{(rho.derivative(x, 1) - s * rho(x)) * std::exp(-s * x)}; };
      const Complex p1 = pole1(h, d, lo, hi, po).value;
      const Complex p2 = pole2(h, dh, d, lo, hi, po).value;
      const double L = GK::integrate([&](double y) { return rho(y) * std::exp(-s * y); }, lo, hi, 15, 1e-13);
      return (p2 * L + p1 * p1) * jac;
    };
    const Complex laplace = GK::integrate(integrand, 0.0, 1.0, 12, 1e-9);
    EXPECT_NEAR(std::abs(c.Z[l] - laplace), 0.0, 1e-5 * (1.0 + std::abs(laplace))) << l;
  }
}

TEST(SpinBoson, QuadraticScalingOfZ) {
  const auto rho = radial_reduce({DispersionKind::massless}, GaussPoly::gaussian(0.5), 3);
  const auto c1 = spinboson_constants(rho, 1.2);
  const auto c2 = spinboson_constants(rho.scaled(2.0), 1.2);
  for (int l = 0; l < 2; ++l) {
    EXPECT_NEAR(std::abs(c2.A[l] - 2.0 * c1.A[l]), 0.0, 1e-10 * std::abs(c1.A[l]));
    EXPECT_NEAR(std::abs(c2.Z[l] - 4.0 * c1.Z[l]), 0.0, 1e-9 * std::abs(c1.Z[l]));
  }
}

TEST(SpinBoson, NegativeSupportRejected) {
  EXPECT_THROW((void)spinboson_constants(gauss_profile(0.5), 1.0), Error);
}
