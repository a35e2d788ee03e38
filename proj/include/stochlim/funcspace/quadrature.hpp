#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature for complex integrands, analytic
// tail truncation for GaussPoly integrands, and principal-value / Plemelj
// functionals for first- and second-order poles at x0 + i0.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "stochlim/core/error.hpp"
#include "stochlim/core/types.hpp"
#include "stochlim/funcspace/gauss_poly.hpp"

namespace stochlim {

struct QuadResult {
  Complex value;
  double error = 0.0;  // estimated absolute error (includes tail bounds when present)
  int evaluations = 0;
};

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 0.0;
  int max_intervals = 20000;
};

namespace detail {

// Kronrod 15-point nodes/weights and embedded Gauss 7-point weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi;
  Complex value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  std::array<Complex, 15> fv;
  fv[7] = f(c);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[static_cast<std::size_t>(j)];
    fv[static_cast<std::size_t>(j)] = f(c - dx);
    fv[static_cast<std::size_t>(14 - j)] = f(c + dx);
  }
  auto wk = [](int i) { return kWgk[static_cast<std::size_t>(i < 8 ? i : 14 - i)]; };
  Complex rk{}, rg = fv[7] * kWg[3];
  double resabs = 0.0;
  for (int i = 0; i < 15; ++i) {
    rk += wk(i) * fv[static_cast<std::size_t>(i)];
    resabs += wk(i) * std::abs(fv[static_cast<std::size_t>(i)]);
  }
  for (int j = 1; j < 7; j += 2)
    rg += kWg[static_cast<std::size_t>(j / 2)] *
          (fv[static_cast<std::size_t>(j)] + fv[static_cast<std::size_t>(14 - j)]);
  const Complex mean = 0.5 * rk;
  double resasc = 0.0;
  for (int i = 0; i < 15; ++i) resasc += wk(i) * std::abs(fv[static_cast<std::size_t>(i)] - mean);
  const double ah = std::abs(h);
  rk *= h;
  rg *= h;
  resabs *= ah;
  resasc *= ah;
  double err = std::abs(rk - rg);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {lo, hi, rk, err};
}

/// Neumaier-compensated complex accumulator.
class Accumulator {
 public:
  void add(Complex z) {
    add1(sr_, cr_, z.real());
    add1(si_, ci_, z.imag());
  }
  Complex sum() const { return {sr_ + cr_, si_ + ci_}; }

 private:
  static void add1(double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double sr_ = 0, cr_ = 0, si_ = 0, ci_ = 0;
};

}  // namespace detail

/// Adaptive GK15 over [lo, hi] (finite), starting from the given breakpoints.
template <class F>
QuadResult integrate(const F& f, std::vector<double> breaks, const QuadOptions& opt = {}) {
  QuadResult res;
  if (breaks.size() < 2) return res;
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::priority_queue<detail::Panel> heap;
  double total_err = 0.0;
  Complex total{};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    auto p = detail::gk15(f, breaks[i], breaks[i + 1]);
    res.evaluations += 15;
    total_err += p.error;
    total += p.value;
    heap.push(p);
  }
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (total_err > target() && static_cast<int>(heap.size()) < opt.max_intervals) {
    auto worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;  // cannot split further
    heap.pop();
    auto left = detail::gk15(f, worst.lo, mid);
    auto right = detail::gk15(f, mid, worst.hi);
    res.evaluations += 30;
    total_err += left.error + right.error - worst.error;
    total += left.value + right.value - worst.value;
    heap.push(left);
    heap.push(right);
  }
  // Final value re-summed with compensation in a fixed (left-to-right) order.
  std::vector<detail::Panel> panels;
  panels.reserve(heap.size());
  double err = 0.0;
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(),
            [](const detail::Panel& a, const detail::Panel& b) { return a.lo < b.lo; });
  detail::Accumulator acc;
  for (const auto& p : panels) {
    acc.add(p.value);
    err += p.error;
  }
  res.value = acc.sum();
  res.error = err;
  if (err > target())
    throw Error(ErrorKind::accuracy, "adaptive quadrature did not reach tolerance", err);
  return res;
}

template <class F>
QuadResult integrate(const F& f, double lo, double hi, const QuadOptions& opt = {}) {
  return integrate(f, std::vector<double>{lo, hi}, opt);
}

// ---------------------------------------------------------------------------
// GaussPoly tails

namespace detail {

/// Upper bound on \int_{u0}^inf u^m e^{-a u^2} du for u0 > 0, using u^2 >= u0 u.
inline double gauss_moment_tail(int m, double a, double u0) {
  const double s = a * u0;
  const double x = s * u0;
  // Gamma(m+1, x) / s^{m+1} = m! e^{-x} sum_j x^j/j! / s^{m+1}
  double term = 1.0, sum = 1.0;
  for (int j = 1; j <= m; ++j) {
    term *= x / j;
    sum += term;
  }
  double fact = 1.0;
  for (int j = 2; j <= m; ++j) fact *= j;
  return fact * std::exp(-x) * sum / std::pow(s, m + 1);
}

/// Bound on \int_{c+u0}^inf |g(x)| dx (or the mirror side) for one term, u0 > 0.
inline double term_tail(const GaussPoly& g, double u0) {
  // |q(y)| <= sum |q_m| |y|^m, symmetric in the side.
  double b = 0.0;
  const auto q = g.coeffs();
  for (std::size_t m = 0; m < q.size(); ++m)
    b += std::abs(q[m]) * gauss_moment_tail(static_cast<int>(m), g.width(), u0);
  return b;
}

/// Smallest u0 (on a geometric ladder) with term_tail(g, u0) <= budget.
inline double tail_offset(const GaussPoly& g, double budget) {
  double u0 = 1.0 / std::sqrt(g.width());
  for (int it = 0; it < 400; ++it) {
    if (term_tail(g, u0) <= budget) return u0;
    u0 *= 1.1;
  }
  throw Error(ErrorKind::accuracy, "GaussPoly tail bound unachievable", term_tail(g, u0));
}

}  // namespace detail

/// \int_lo^hi f(x) dx for a GaussPolySum; lo/hi may be infinite. Infinite
/// sides are truncated where the analytic tail bound drops below 0.1*tol,
/// and the bound is added to the reported error.
inline QuadResult integrate(const GaussPolySum& f, double lo, double hi, const QuadOptions& opt = {}) {
  QuadResult res;
  if (f.is_zero() || !(hi > lo)) return res;
  const auto terms = f.terms();
  const double budget = 0.1 * opt.abs_tol / static_cast<double>(terms.size());
  double tail_err = 0.0;
  double L = lo, H = hi;
  if (std::isinf(lo) || std::isinf(hi)) {
    double lo_cut = std::numeric_limits<double>::infinity();
    double hi_cut = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) {
      const double u0 = detail::tail_offset(t, budget);
      lo_cut = std::min(lo_cut, t.center() - u0);
      hi_cut = std::max(hi_cut, t.center() + u0);
      tail_err += (std::isinf(lo) ? 1.0 : 0.0) * detail::term_tail(t, u0) +
                  (std::isinf(hi) ? 1.0 : 0.0) * detail::term_tail(t, u0);
    }
    if (std::isinf(lo)) L = std::min(lo_cut, std::isinf(hi) ? lo_cut : hi);
    if (std::isinf(hi)) H = std::max(hi_cut, std::isinf(lo) ? hi_cut : lo);
    if (!(H > L)) return res;
  }
  std::vector<double> breaks{L, H};
  for (const auto& t : terms) {
    const double s = 1.0 / std::sqrt(t.width());
    for (double k : {-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0}) {
      const double x = t.center() + k * s;
      if (x > L && x < H) breaks.push_back(x);
    }
  }
  QuadOptions inner = opt;
  inner.abs_tol = std::max(opt.abs_tol - tail_err, 0.5 * opt.abs_tol);
  res = integrate([&f](double x) { return f(x); }, std::move(breaks), inner);
  res.error += tail_err;
  return res;
}

// ---------------------------------------------------------------------------
// Plemelj functionals on [lo, hi]

/// Complex-valued function of a real variable.
using RealToComplex = std::function<Complex(double)>;

struct PoleOptions {
  QuadOptions quad{};
  double max_window = 1.0;
  double edge_margin = 1e-9;  // |x0 - edge| below this is treated as "at the edge"
};

namespace detail {

inline double pole_window(double x0, double lo, double hi, const PoleOptions& opt) {
  if (std::abs(x0 - lo) <= opt.edge_margin || std::abs(x0 - hi) <= opt.edge_margin)
    throw Error(ErrorKind::unsupported_input, "pole at a support endpoint (one-sided PV not implemented)");
  if (x0 < lo || x0 > hi) return 0.0;
  return std::min({opt.max_window, 0.5 * (x0 - lo), 0.5 * (hi - x0)});
}

/// PV \int_{-w}^{w} h(x0+u)/u du = \int_0^w (h(x0+u) - h(x0-u))/u du.
inline QuadResult symmetric_pv(const RealToComplex& h, double x0, double w, const QuadOptions& opt) {
  return integrate(
      [&](double u) { return (h(x0 + u) - h(x0 - u)) / u; }, std::vector<double>{0.0, 0.25 * w, w}, opt);
}

}  // namespace detail

/// \int_lo^hi h(x) / (x - x0 - i0) dx  =  PV \int h/(x-x0) + i pi h(x0).
inline QuadResult pole1(const RealToComplex& h, double x0, double lo, double hi,
                        const PoleOptions& opt = {}) {
  const double w = detail::pole_window(x0, lo, hi, opt);
  auto g = [&](double x) { return h(x) / (x - x0); };
  if (w == 0.0) return integrate(g, lo, hi, opt.quad);
  QuadOptions part = opt.quad;
  part.abs_tol /= 3.0;
  auto left = integrate(g, lo, x0 - w, part);
  auto right = integrate(g, x0 + w, hi, part);
  auto mid = detail::symmetric_pv(h, x0, w, part);
  QuadResult r;
  r.value = left.value + mid.value + right.value + I * pi * h(x0);
  r.error = left.error + mid.error + right.error;
  r.evaluations = left.evaluations + mid.evaluations + right.evaluations + 1;
  return r;
}

/// \int_lo^hi h(x) / (x - x0 - i0)^2 dx, reduced by parts inside a window
/// around x0 to a first-order pole against h'.
inline QuadResult pole2(const RealToComplex& h, const RealToComplex& dh, double x0, double lo,
                        double hi, const PoleOptions& opt = {}) {
  const double w = detail::pole_window(x0, lo, hi, opt);
  auto g = [&](double x) {
    const double u = x - x0;
    return h(x) / (u * u);
  };
  if (w == 0.0) return integrate(g, lo, hi, opt.quad);
  QuadOptions part = opt.quad;
  part.abs_tol /= 3.0;
  auto left = integrate(g, lo, x0 - w, part);
  auto right = integrate(g, x0 + w, hi, part);
  auto mid = detail::symmetric_pv(dh, x0, w, part);
  QuadResult r;
  r.value = left.value + right.value - (h(x0 + w) + h(x0 - w)) / w + mid.value + I * pi * dh(x0);
  r.error = left.error + mid.error + right.error;
  r.evaluations = left.evaluations + mid.evaluations + right.evaluations + 4;
  return r;
}

}  // namespace stochlim
