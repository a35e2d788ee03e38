#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "stochlim/oracle/oracle.hpp"
#include "stochlim/oscint/oscint.hpp"

using namespace stochlim;

namespace {

GaussPolySum gauss(double a = 1.0, double c = 0.0) { return GaussPoly::gaussian(a, c); }

const LambdaGrid kGrid({0.3, 0.2, 0.15, 0.1, 0.07, 0.05});

OscOptions tight() {
  OscOptions o;
  o.tol = 1e-13;
  return o;
}

GaussPolySum random_poly(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> q{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
  return GaussPoly(q, 0.6 + 0.8 * std::abs(u(rng)), 0.5 * u(rng));
}

/// Literal (1/l^2) \int_0^{a'} dt \int dx e^{ix(t-a)/l^2} f(x) phi(t), nested Boost quadrature.
Complex simplex_direct(const GaussPolySum& f, const GaussPolySum& phi, double tmax, double a, double lambda) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double l2 = lambda * lambda;
  auto inner = [&](double t, bool im) {
    return GK::integrate(
        [&](double x) {
          const Complex z = std::exp(I * (x * (t - a) / l2)) * f(x);
          return im ? z.imag() : z.real();
        },
        -12.0, 12.0, 18, 1e-13);
  };
  auto outer = [&](bool im) {
    return GK::integrate(
        [&](double t) {
          const Complex z = Complex{inner(t, false), inner(t, true)} * phi(t);
          return im ? z.imag() : z.real();
        },
        0.0, tmax, 18, 1e-11);
  };
  return Complex{outer(false), outer(true)} / l2;
}

}  // namespace

TEST(LambdaGrid, Validation) {
  EXPECT_THROW(LambdaGrid({0.3, 0.3}), Error);
  EXPECT_THROW(LambdaGrid({0.1, 0.2}), Error);
  EXPECT_THROW(LambdaGrid({1.0, 0.2}), Error);
  EXPECT_NO_THROW(LambdaGrid({0.9, 0.1}));
}

TEST(PairIntegral, GaussianClosedForm) {
  for (double l : {0.05, 0.3, 0.7}) {
    const Complex v = pair_integral(gauss(), gauss(), l, tight());
    EXPECT_NEAR(std::abs(v - 2.0 * pi / std::sqrt(1.0 + 4.0 * std::pow(l, 4))), 0.0, 1e-10) << l;
  }
}

TEST(PairIntegral, ZeroFunction) { EXPECT_EQ(pair_integral(GaussPolySum{}, gauss(), 0.2), Complex{}); }

TEST(PairIntegral, ShiftedGaussiansMatchCompleteTheSquare) {
  const auto f = gauss(1.0, 0.3), phi = gauss(1.0, 0.2);
  const Complex v = pair_integral(f, phi, 0.2, tight());
  EXPECT_NEAR(std::abs(v - oracle::gaussian_closed_form(f, phi, 0.2)), 0.0, 1e-10);
}

TEST(PairIntegral, RandomPolynomialsMatchClosedForm) {
  std::mt19937 rng(17);
  for (int draw = 0; draw < 6; ++draw) {
    const auto f = random_poly(rng), phi = random_poly(rng);
    for (double l : {0.5, 0.2, 0.05}) {
      const Complex v = pair_integral(f, phi, l);
      EXPECT_NEAR(std::abs(v - oracle::gaussian_closed_form(f, phi, l)), 0.0, 1e-10) << draw << " " << l;
    }
  }
}

TEST(PairIntegral, AgreesWithDirectQuadratureAtModerateLambda) {
  const auto f = gauss(1.0, 0.3), phi = gauss(1.0, 0.2);
  for (double l : {0.5, 0.9}) {
    const auto d = oracle::direct_2d_quadrature(f, phi, l);
    EXPECT_NEAR(std::abs(pair_integral(f, phi, l) - d.value), 0.0, 1e-6) << l;
  }
}

TEST(ExpansionSum, Examples) {
  const auto f = gauss(1.0, 0.3), phi = gauss(1.0, 0.2);
  EXPECT_NEAR(std::abs(expansion_sum(f, phi, 0.4, 0) - 2.0 * pi * f(0.0) * phi(0.0)), 0.0, 1e-15);
  for (double l : {0.1, 0.5})
    EXPECT_NEAR(std::abs(expansion_sum(gauss(), gauss(), l, 2) - (2.0 * pi - 4.0 * pi * std::pow(l, 4))), 0.0,
                1e-13);
  // x^3 e^{-x^2} has vanishing derivatives through order 2 at 0
  const GaussPolySum cube = GaussPoly({0.0, 0.0, 0.0, 1.0}, 1.0);
  EXPECT_EQ(expansion_sum(cube, gauss(), 0.3, 2), Complex{});
}

TEST(ExpansionSum, OrderBeyondCapability) {
  EXPECT_THROW((void)expansion_sum(gauss(), gauss(), 0.3, 9), Error);
}

TEST(ConvergenceSlope, ExactPowerLaws) {
  std::vector<double> r4, r2;
  for (double l : kGrid.values()) {
    r4.push_back(3.0 * std::pow(l, 4));
    r2.push_back(0.7 * l * l);
  }
  const auto f4 = convergence_slope(r4, kGrid);
  EXPECT_NEAR(f4.slope, 4.0, 1e-12);
  EXPECT_NEAR(f4.halfwidth, 0.0, 1e-10);
  EXPECT_NEAR(convergence_slope(r2, kGrid).slope, 2.0, 1e-12);
}

TEST(ConvergenceSlope, NoiseFloorExclusionAndInsufficientData) {
  std::vector<double> r;
  for (double l : kGrid.values()) r.push_back(std::pow(l, 4));
  r[4] = r[5] = 1e-14;  // below the floor
  const auto fit = convergence_slope(r, kGrid, 1e-11);
  EXPECT_EQ(fit.points, 4);
  EXPECT_NEAR(fit.slope, 4.0, 1e-12);
  r[3] = 1e-14;
  try {
    (void)convergence_slope(r, kGrid, 1e-11);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::insufficient_data);
  }
}

TEST(PairReport, ShiftedGaussianSlopes) {
  const auto f = gauss(1.0, 0.3), phi = gauss(1.0, 0.2);
  for (int N = 0; N <= 2; ++N) {
    const auto rep = pair_report(f, phi, N, kGrid, tight());
    EXPECT_GE(rep.fit.slope, 2 * N + 1.7) << N;
    EXPECT_LE(rep.fit.slope, 2 * N + 2.3) << N;
  }
}

TEST(PairReport, RandomPairsBeatOrderBound) {
  std::mt19937 rng(99);
  for (int draw = 0; draw < 4; ++draw) {
    const auto f = random_poly(rng), phi = random_poly(rng);
    for (int N = 0; N <= 2; ++N) {
      const auto rep = pair_report(f, phi, N, kGrid);
      EXPECT_GT(rep.fit.slope, 2 * N + 0.5) << draw << " N=" << N;
    }
  }
}

TEST(SimplexIntegral, ZeroTestFunction) {
  PiecewiseC1 phi({{GaussPolySum{}, 2.0}});
  EXPECT_EQ(simplex_integral(gauss(), phi, 1.0, 0.2), Complex{});
}

TEST(SimplexIntegral, ConstantPieceErfClosedForm) {
  // phi = 1 on [0, 2] (Gaussian of negligible width)
  PiecewiseC1 phi({{gauss(1e-14), 2.0}});
  for (double l : {0.3, 0.1}) {
    const double a = 1.0;
    const Complex v = simplex_integral(gauss(), phi, a, l, tight());
    EXPECT_NEAR(std::abs(v - pi * std::erf(a / (2.0 * l * l))), 0.0, 1e-10) << l;
  }
}

TEST(SimplexIntegral, MatchesDirectQuadrature) {
  const auto f = gauss(1.0, 0.3);
  const auto piece = gauss(1.0, 0.4);
  PiecewiseC1 phi({{piece, 1.5}});
  for (double l : {0.5, 0.3, 0.1}) {
    const double a = 1.0;
    const Complex direct = simplex_direct(f, piece, a, a, l);
    EXPECT_NEAR(std::abs(simplex_integral(f, phi, a, l, tight()) - direct), 0.0, 1e-6) << l;
  }
}

TEST(SimplexExpansion, BeyondLastCutoffIsExactlyZero) {
  PiecewiseC1 phi({{gauss(1.0, 0.3), 1.0}});
  const auto e = simplex_expansion(gauss(), phi, 1.05, 0.1);
  EXPECT_EQ(e.leading, Complex{});
  EXPECT_EQ(e.correction, Complex{});
}

TEST(SimplexExpansion, ConstantNearEndpoint) {
  PiecewiseC1 phi({{gauss(1e-14), 2.0}});
  const auto e = simplex_expansion(gauss(), phi, 1.0, 0.2);
  EXPECT_NEAR(std::abs(e.leading - pi), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(e.correction), 0.0, 1e-12);
}

TEST(SimplexExpansion, LinearPiece) {
  const GaussPoly tee({0.0, 1.0}, 1e-14);  // t on [0, 2]
  PiecewiseC1 phi({{tee, 2.0}});
  const double a = 1.3, l = 0.2;
  const auto e = simplex_expansion(gauss(), phi, a, l, tight());
  EXPECT_NEAR(std::abs(e.sum() - (a * pi - l * l * 2.0 * std::sqrt(pi))), 0.0, 1e-10);
}

TEST(SimplexReport, InteriorEndpointConverges) {
  const auto f = gauss(1.0, 0.3);
  PiecewiseC1 phi({{gauss(1.0, 0.4), 2.0}});
  const auto rep = simplex_report(f, phi, 1.0, kGrid, tight());
  EXPECT_GE(rep.fit.slope, 2.5);
}

TEST(SimplexReport, BeyondCutoffDecaysToZero) {
  const auto f = gauss(25.0);
  PiecewiseC1 phi({{gauss(1.0, 0.4), 1.0}});
  const auto rep = simplex_report(f, phi, 1.05, kGrid, tight());
  for (auto s : rep.sums) EXPECT_EQ(s, Complex{});
  EXPECT_GE(rep.fit.slope, 1.8);
}

TEST(HalfLine, ZeroAndLeadingTerm) {
  EXPECT_EQ(halfline_integral(gauss(), GaussPolySum{}, 0.2), Complex{});
  EXPECT_EQ(halfline_expansion(gauss(), GaussPolySum{}, 0.2, 1), Complex{});
  EXPECT_NEAR(std::abs(halfline_expansion(gauss(), gauss(), 0.2, 0) - pi), 0.0, 1e-10);
}

TEST(HalfLine, PoleIdentity) {
  EXPECT_NEAR(std::abs(halfline_pole_identity(gauss()) - pi), 0.0, 1e-10);
  std::mt19937 rng(4);
  for (int draw = 0; draw < 4; ++draw) {
    const auto f = random_poly(rng);
    const auto m0 = half_line_moment(f.fourier(), 0, HalfLine::positive, 1e-12).value;
    EXPECT_NEAR(std::abs(halfline_pole_identity(f) - m0), 0.0, 1e-9) << draw;
  }
}

TEST(HalfLine, ResidualSlopes) {
  const auto f = gauss(), phi = gauss(1.0, 0.2);
  const auto r0 = halfline_report(f, phi, 0, kGrid, tight());
  EXPECT_NEAR(r0.fit.slope, 2.0, 0.3);
  const auto r1 = halfline_report(f, phi, 1, kGrid, tight());
  EXPECT_NEAR(r1.fit.slope, 4.0, 0.3);
}
