#pragma once

// Indefinite-metric one-particle space and its truncated symmetric Fock space.
//
// One-particle vectors are stored as samples of
//   F(tau) = \int e^{-i tau t} f(t) dt   on   tau_j = -T + (j + 1/2) dtau,
// so that both forms are diagonal:
//   Hilbert     (f, g) = (1/2pi) sum_j |tau_j| conj(F_j) G_j dtau
//   indefinite  <f, g> = (1/2pi) sum_j  tau_j  conj(F_j) G_j dtau  = i \int conj(f') g dt
// and the metric operator eta is multiplication by sign(tau_j); <f, g> = (f, eta g).
//
// n-particle components are symmetric tensors over the grid; only sorted
// multi-indices i_1 <= ... <= i_n are stored (the tensor value at that index).

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include "stochlim/core/error.hpp"
#include "stochlim/funcspace/gauss_poly.hpp"

namespace stochlim {

class OneParticleGrid {
 public:
  explicit OneParticleGrid(double extent = 8.0, int points = 64) : T_(extent), n_(points) {
    if (!(extent > 0.0)) throw Error(ErrorKind::config, "grid extent must be positive");
    if (points < 2 || points % 2 != 0) throw Error(ErrorKind::config, "grid size must be even and >= 2");
    dtau_ = 2.0 * T_ / n_;
  }

  int size() const { return n_; }
  double extent() const { return T_; }
  double step() const { return dtau_; }
  double tau(int j) const { return -T_ + (j + 0.5) * dtau_; }
  double sign(int j) const { return j < n_ / 2 ? -1.0 : 1.0; }
  /// Hilbert weight |tau_j| dtau / 2pi; the indefinite weight is sign(j) times this.
  double weight(int j) const { return std::abs(tau(j)) * dtau_ / (2.0 * pi); }

  bool operator==(const OneParticleGrid& o) const { return T_ == o.T_ && n_ == o.n_; }

 private:
  double T_;
  int n_;
  double dtau_;
};

class OneParticleVector {
 public:
  OneParticleVector(OneParticleGrid grid, std::vector<Complex> amps) : grid_(grid), a_(std::move(amps)) {
    if (static_cast<int>(a_.size()) != grid_.size())
      throw Error(ErrorKind::grid_mismatch, "amplitude count does not match grid size");
  }

  static OneParticleVector zero(const OneParticleGrid& grid) {
    return {grid, std::vector<Complex>(static_cast<std::size_t>(grid.size()), Complex{})};
  }

  /// Samples of \int e^{-i tau t} f(t) dt.
  static OneParticleVector from_time_domain(const GaussPolySum& f, const OneParticleGrid& grid) {
    const auto ft = f.fourier();  // \int e^{i tau t} f(t) dt
    std::vector<Complex> a(static_cast<std::size_t>(grid.size()));
    for (int j = 0; j < grid.size(); ++j) a[static_cast<std::size_t>(j)] = ft(-grid.tau(j));
    return {grid, std::move(a)};
  }

  const OneParticleGrid& grid() const { return grid_; }
  const std::vector<Complex>& amplitudes() const { return a_; }
  Complex operator[](int j) const { return a_[static_cast<std::size_t>(j)]; }

 private:
  OneParticleGrid grid_;
  std::vector<Complex> a_;
};

namespace detail {

inline void same_grid(const OneParticleGrid& a, const OneParticleGrid& b) {
  if (!(a == b)) throw Error(ErrorKind::grid_mismatch, "vectors live on different grids");
}

}  // namespace detail

inline Complex hilbert_inner(const OneParticleVector& f, const OneParticleVector& g) {
  detail::same_grid(f.grid(), g.grid());
  Complex s{};
  for (int j = 0; j < f.grid().size(); ++j) s += f.grid().weight(j) * std::conj(f[j]) * g[j];
  return s;
}

inline Complex indefinite_inner(const OneParticleVector& f, const OneParticleVector& g) {
  detail::same_grid(f.grid(), g.grid());
  Complex s{};
  for (int j = 0; j < f.grid().size(); ++j)
    s += f.grid().sign(j) * f.grid().weight(j) * std::conj(f[j]) * g[j];
  return s;
}

inline OneParticleVector eta_apply(const OneParticleVector& f) {
  std::vector<Complex> a = f.amplitudes();
  for (int j = 0; j < f.grid().size(); ++j) a[static_cast<std::size_t>(j)] *= f.grid().sign(j);
  return {f.grid(), std::move(a)};
}

/// Diagonal sign(tau_j); eta^2 = 1.
class MetricOperator {
 public:
  explicit MetricOperator(const OneParticleGrid& grid) : grid_(grid) {
    for (int j = 0; j < grid.size(); ++j) signs_.push_back(grid.sign(j));
  }
  const std::vector<double>& signs() const { return signs_; }
  OneParticleVector apply(const OneParticleVector& f) const {
    detail::same_grid(f.grid(), grid_);
    return eta_apply(f);
  }

 private:
  OneParticleGrid grid_;
  std::vector<double> signs_;
};

/// Continuum value i \int conj(f'(t)) g(t) dt in closed form.
inline Complex indefinite_inner_exact(const GaussPolySum& f, const GaussPolySum& g) {
  return I * (f.derivative().conj() * g).integral();
}

// ---------------------------------------------------------------------------
// Symmetric Fock space

/// Index tables for levels 0..M over a grid of G points.
class FockSpace {
 public:
  FockSpace(OneParticleGrid grid, int levels) : grid_(grid), M_(levels) {
    if (levels < 1) throw Error(ErrorKind::config, "Fock truncation level must be >= 1");
    const int G = grid.size();
    binom_.assign(static_cast<std::size_t>(G + M_ + 1), std::vector<std::size_t>(static_cast<std::size_t>(M_ + 2), 0));
    for (std::size_t n = 0; n < binom_.size(); ++n) {
      binom_[n][0] = 1;
      for (std::size_t k = 1; k < binom_[n].size() && k <= n; ++k)
        binom_[n][k] = binom_[n - 1][k - 1] + (k < n ? binom_[n - 1][k] : 0);
    }
    index_.resize(static_cast<std::size_t>(M_) + 1);
    mult_.resize(static_cast<std::size_t>(M_) + 1);
    index_[0].push_back({});
    mult_[0].push_back(1.0);
    for (int n = 1; n <= M_; ++n) {
      std::vector<int> idx(static_cast<std::size_t>(n), 0);
      while (true) {
        index_[static_cast<std::size_t>(n)].push_back(idx);
        mult_[static_cast<std::size_t>(n)].push_back(multiplicity(idx));
        // next non-decreasing tuple in rank order (last coordinate varies slowest)
        int k = 0;
        while (k < n) {
          const int cap = (k + 1 < n) ? idx[static_cast<std::size_t>(k) + 1] : G - 1;
          if (idx[static_cast<std::size_t>(k)] < cap) break;
          ++k;
        }
        if (k == n) break;
        ++idx[static_cast<std::size_t>(k)];
        for (int r = 0; r < k; ++r) idx[static_cast<std::size_t>(r)] = 0;
      }
    }
  }

  const OneParticleGrid& grid() const { return grid_; }
  int levels() const { return M_; }
  std::size_t dim(int n) const { return index_[static_cast<std::size_t>(n)].size(); }
  const std::vector<int>& multi_index(int n, std::size_t r) const { return index_[static_cast<std::size_t>(n)][r]; }
  /// Number of ordered tuples represented by the sorted index (n! / prod m_v!).
  double multiplicity(int n, std::size_t r) const { return mult_[static_cast<std::size_t>(n)][r]; }

  /// Position of a sorted multi-index (combinatorial number system, c_k = i_k + k).
  std::size_t rank(const std::vector<int>& sorted) const {
    std::size_t r = 0;
    for (std::size_t k = 0; k < sorted.size(); ++k)
      r += binom_[static_cast<std::size_t>(sorted[k]) + k][k + 1];
    return r;
  }

 private:
  static double multiplicity(const std::vector<int>& idx) {
    double m = 1.0;
    int run = 1;
    for (std::size_t k = 1; k <= idx.size(); ++k) {
      m *= static_cast<double>(k);
      if (k < idx.size() && idx[k] == idx[k - 1]) {
        ++run;
        m /= static_cast<double>(run);
      } else {
        run = 1;
      }
    }
    return m;
  }

  OneParticleGrid grid_;
  int M_;
  std::vector<std::vector<std::size_t>> binom_;
  std::vector<std::vector<std::vector<int>>> index_;
  std::vector<std::vector<double>> mult_;
};

class FockVector {
 public:
  explicit FockVector(std::shared_ptr<const FockSpace> space) : space_(std::move(space)) {
    for (int n = 0; n <= space_->levels(); ++n) c_.emplace_back(space_->dim(n), Complex{});
  }

  static FockVector vacuum(std::shared_ptr<const FockSpace> space) {
    FockVector v(std::move(space));
    v.c_[0][0] = 1.0;
    return v;
  }

  const FockSpace& space() const { return *space_; }
  const std::shared_ptr<const FockSpace>& space_ptr() const { return space_; }
  int levels() const { return space_->levels(); }
  const std::vector<Complex>& level(int n) const { return c_[static_cast<std::size_t>(n)]; }
  std::vector<Complex>& level(int n) { return c_[static_cast<std::size_t>(n)]; }

  bool level_is_zero(int n) const {
    const auto& l = level(n);
    return std::all_of(l.begin(), l.end(), [](Complex z) { return z == Complex{}; });
  }

  friend FockVector operator+(FockVector a, const FockVector& b) {
    for (std::size_t n = 0; n < a.c_.size(); ++n)
      for (std::size_t r = 0; r < a.c_[n].size(); ++r) a.c_[n][r] += b.c_[n][r];
    return a;
  }
  friend FockVector operator-(FockVector a, const FockVector& b) {
    for (std::size_t n = 0; n < a.c_.size(); ++n)
      for (std::size_t r = 0; r < a.c_[n].size(); ++r) a.c_[n][r] -= b.c_[n][r];
    return a;
  }
  friend FockVector operator*(Complex s, FockVector a) {
    for (auto& l : a.c_)
      for (auto& z : l) z *= s;
    return a;
  }

 private:
  std::shared_ptr<const FockSpace> space_;
  std::vector<std::vector<Complex>> c_;
};

namespace detail {

inline void same_space(const FockSpace& a, const FockSpace& b) {
  if (&a != &b && !(a.grid() == b.grid() && a.levels() == b.levels()))
    throw Error(ErrorKind::grid_mismatch, "Fock vectors live on different spaces");
}

/// sum over levels of sum_{full tuples} prod weight conj(a) b, with sign(tau) factors if indefinite.
inline Complex fock_form(const FockVector& a, const FockVector& b, bool indefinite) {
  same_space(a.space(), b.space());
  const auto& sp = a.space();
  const auto& grid = sp.grid();
  Complex s{};
  for (int n = 0; n <= sp.levels(); ++n) {
    const auto& la = a.level(n);
    const auto& lb = b.level(n);
    for (std::size_t r = 0; r < la.size(); ++r) {
      if (la[r] == Complex{} || lb[r] == Complex{}) continue;
      double w = sp.multiplicity(n, r);
      for (int i : sp.multi_index(n, r)) w *= grid.weight(i) * (indefinite ? grid.sign(i) : 1.0);
      s += w * std::conj(la[r]) * lb[r];
    }
  }
  return s;
}

}  // namespace detail

inline Complex hilbert_inner(const FockVector& a, const FockVector& b) { return detail::fock_form(a, b, false); }
/// Level-wise (f_n, eta^{(x)n} g_n).
inline Complex indefinite_inner(const FockVector& a, const FockVector& b) { return detail::fock_form(a, b, true); }
inline double hilbert_norm(const FockVector& a) { return std::sqrt(std::max(hilbert_inner(a, a).real(), 0.0)); }

/// (c_f^+ phi)_{n+1} = sqrt(n+1) Sym(f (x) phi_n).
inline FockVector create(const OneParticleVector& f, const FockVector& phi) {
  const auto& sp = phi.space();
  detail::same_grid(f.grid(), sp.grid());
  const int M = sp.levels();
  if (!phi.level_is_zero(M))
    throw Error(ErrorKind::truncation_overflow, "creation would push the top Fock level out of the truncation");
  FockVector out(phi.space_ptr());
  std::vector<int> rest;
  for (int n = 0; n < M; ++n) {
    if (phi.level_is_zero(n)) continue;
    const auto& src = phi.level(n);
    auto& dst = out.level(n + 1);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n + 1));
    for (std::size_t r = 0; r < dst.size(); ++r) {
      const auto& J = sp.multi_index(n + 1, r);
      Complex s{};
      for (std::size_t k = 0; k < J.size(); ++k) {
        rest.assign(J.begin(), J.end());
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
        s += f[J[k]] * src[sp.rank(rest)];
      }
      dst[r] = norm * s;
    }
  }
  return out;
}

/// (c_f phi)_{n-1}(x) = sqrt(n) sum_j <f, delta_j> phi_n(j, x)  (indefinite pairing in one slot).
inline FockVector annihilate(const OneParticleVector& f, const FockVector& phi) {
  const auto& sp = phi.space();
  const auto& grid = sp.grid();
  detail::same_grid(f.grid(), grid);
  FockVector out(phi.space_ptr());
  std::vector<Complex> pair(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j)
    pair[static_cast<std::size_t>(j)] = grid.sign(j) * grid.weight(j) * std::conj(f[j]);
  std::vector<int> merged;
  for (int n = 1; n <= sp.levels(); ++n) {
    if (phi.level_is_zero(n)) continue;
    const auto& src = phi.level(n);
    auto& dst = out.level(n - 1);
    const double norm = std::sqrt(static_cast<double>(n));
    for (std::size_t r = 0; r < dst.size(); ++r) {
      const auto& Iv = sp.multi_index(n - 1, r);
      Complex s{};
      for (int j = 0; j < grid.size(); ++j) {
        merged.assign(Iv.begin(), Iv.end());
        merged.insert(std::upper_bound(merged.begin(), merged.end(), j), j);
        s += pair[static_cast<std::size_t>(j)] * src[sp.rank(merged)];
      }
      dst[r] = norm * s;
    }
  }
  return out;
}

/// || (c_f c_g^+ - c_g^+ c_f - <f,g>) phi ||  (Hilbert norm).
inline double ccr_defect(const OneParticleVector& f, const OneParticleVector& g, const FockVector& phi) {
  const FockVector lhs = annihilate(f, create(g, phi));
  const FockVector rhs = create(g, annihilate(f, phi));
  return hilbert_norm(lhs - rhs - indefinite_inner(f, g) * phi);
}

/// | <c_f phi, psi> - <phi, c_f^+ psi> |  (indefinite Fock form).
inline double adjoint_defect(const OneParticleVector& f, const FockVector& phi, const FockVector& psi) {
  return std::abs(indefinite_inner(annihilate(f, phi), psi) - indefinite_inner(phi, create(f, psi)));
}

}  // namespace stochlim
