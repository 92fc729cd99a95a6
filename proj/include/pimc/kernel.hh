/*
 * kernel.hh
 *
 * Stochastic kernels P(x,.): exact matrix kernels for finite chains,
 * the built-in density families of the case studies, and their
 * closed-form analytics (drift h, moments b, expected squared norm Pg).
 */

#ifndef PIMC_KERNEL_HH_
#define PIMC_KERNEL_HH_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pimc/detail/quadrature.hh"
#include "pimc/space.hh"

namespace pimc {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

/* Row-stochastic matrix kernel. Storage switches to CSR when the row
 * density drops below 25%; summation order is ascending column index in
 * both layouts, so results do not depend on the layout. */
class MatrixKernel {
 public:
  explicit MatrixKernel(std::vector<std::vector<double>> rows) {
    n_ = rows.size();
    if (n_ == 0) throw std::invalid_argument("MatrixKernel: empty matrix");
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (rows[i].size() != n_)
        throw std::invalid_argument("MatrixKernel: row length mismatch");
      double sum = 0.0;
      for (double p : rows[i]) {
        if (p < -1e-15) throw std::invalid_argument("MatrixKernel: negative entry");
        if (p > 0.0) ++nnz;
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("MatrixKernel: row does not sum to 1");
    }
    const bool sparse = static_cast<double>(nnz) < 0.25 * static_cast<double>(n_ * n_);
    if (sparse) {
      rowptr_.assign(n_ + 1, 0);
      vals_.reserve(nnz);
      cols_.reserve(nnz);
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
          if (rows[i][j] > 0.0) {
            vals_.push_back(rows[i][j]);
            cols_.push_back(j);
          }
        }
        rowptr_[i + 1] = vals_.size();
      }
    } else {
      dense_.resize(n_ * n_);
      for (std::size_t i = 0; i < n_; ++i)
        std::copy(rows[i].begin(), rows[i].end(), dense_.begin() + i * n_);
    }
  }

  /* dense row-major constructor used by the discretizer */
  MatrixKernel(std::size_t n, std::vector<double> dense_rows)
      : n_(n), dense_(std::move(dense_rows)) {
    if (dense_.size() != n_ * n_)
      throw std::invalid_argument("MatrixKernel: dense size mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (dense_[i * n_ + j] < -1e-15)
          throw std::invalid_argument("MatrixKernel: negative entry");
        sum += dense_[i * n_ + j];
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("MatrixKernel: row does not sum to 1");
    }
  }

  std::size_t size() const { return n_; }
  StateSpace space() const { return StateSpace::finite(n_); }
  bool is_sparse() const { return dense_.empty(); }

  double entry(std::size_t i, std::size_t j) const {
    if (!dense_.empty()) return dense_[i * n_ + j];
    for (std::size_t k = rowptr_[i]; k < rowptr_[i + 1]; ++k)
      if (cols_[k] == j) return vals_[k];
    return 0.0;
  }

  /* visits the row in ascending column order */
  template <typename Fn>
  void for_row(std::size_t i, Fn&& fn) const {
    if (!dense_.empty()) {
      const double* r = dense_.data() + i * n_;
      for (std::size_t j = 0; j < n_; ++j)
        if (r[j] != 0.0) fn(j, r[j]);
    } else {
      for (std::size_t k = rowptr_[i]; k < rowptr_[i + 1]; ++k) fn(cols_[k], vals_[k]);
    }
  }

  /* P(i, R); ascending-index summation */
  double prob(std::size_t i, const Region& R) const {
    double s = 0.0;
    for_row(i, [&](std::size_t j, double p) {
      if (R.contains(j)) s += p;
    });
    return s;
  }

  /* mass leaving R from state i (more accurate than 1 - prob for
   * probability-one tests) */
  double leak(std::size_t i, const Region& R) const {
    double s = 0.0;
    for_row(i, [&](std::size_t j, double p) {
      if (!R.contains(j)) s += p;
    });
    return s;
  }

  double dot_row(std::size_t i, const double* f) const {
    double s = 0.0;
    if (!dense_.empty()) {
      const double* r = dense_.data() + i * n_;
      for (std::size_t j = 0; j < n_; ++j) s += r[j] * f[j];
    } else {
      for (std::size_t k = rowptr_[i]; k < rowptr_[i + 1]; ++k)
        s += vals_[k] * f[cols_[k]];
    }
    return s;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> dense_;                // row-major when dense
  std::vector<double> vals_;                 // CSR otherwise
  std::vector<std::size_t> cols_, rowptr_;
};

inline double transition_prob(const MatrixKernel& k, std::size_t i, const Region& R) {
  if (R.space() != k.space())
    throw std::invalid_argument("transition_prob: space mismatch");
  return k.prob(i, R);
}

/* E log|mu + sigma*xi|, xi ~ N(0,1). Integrable log-singularity at
 * xi = -mu/sigma is placed at a panel boundary. */
inline double affine_gauss_drift(double mu, double sigma, double tol = 1e-8) {
  if (sigma <= 0.0) throw std::invalid_argument("affine_gauss_drift: sigma must be > 0");
  auto f = [mu, sigma](double t) {
    const double a = std::abs(mu + sigma * t);
    if (a == 0.0) return 0.0;  // never sampled at the singular node; belt and braces
    return std::log(a) * normal_pdf(t);
  };
  const double R = 40.0;
  double t0 = -mu / sigma;
  if (t0 <= -R || t0 >= R)
    return detail::integrate_adaptive(f, -R, R, tol);
  return detail::integrate_adaptive(f, -R, t0, 0.5 * tol) +
         detail::integrate_adaptive(f, t0, R, 0.5 * tol);
}

/* b(q) = E|mu + sigma*xi|^q; b(0) = 1 exactly */
inline double affine_gauss_moment(double mu, double sigma, double q, double tol = 1e-8) {
  if (sigma <= 0.0) throw std::invalid_argument("affine_gauss_moment: sigma must be > 0");
  if (q < 0.0) throw std::invalid_argument("affine_gauss_moment: q must be >= 0");
  if (q == 0.0) return 1.0;
  auto f = [mu, sigma, q](double t) {
    return std::pow(std::abs(mu + sigma * t), q) * normal_pdf(t);
  };
  const double R = 40.0;
  double t0 = -mu / sigma;
  if (t0 <= -R || t0 >= R)
    return detail::integrate_adaptive(f, -R, R, tol);
  return detail::integrate_adaptive(f, -R, t0, 0.5 * tol) +
         detail::integrate_adaptive(f, t0, R, 0.5 * tol);
}

/* Closed form of E||x_{n+1}||^2 for the 2d nonlinear system. */
inline double nonlinear2d_pg(double x1, double x2) {
  const double x12 = x1 * x1, x2sq = x2 * x2;
  return (1.0 / 200.0) *
         (144.0 * x12 + 197.0 * x2sq - 474.0 * x12 * x2sq +
          1098.0 * x12 * x12 * x2sq - 648.0 * x1 * x2sq * x2 +
          2592.0 * x12 * x1 * x2sq * x2 - 586.0 * x2sq * x2sq +
          5136.0 * x12 * x2sq * x2sq + 3888.0 * x1 * x2sq * x2sq * x2 +
          1658.0 * x2sq * x2sq * x2sq);
}

/* Built-in density kernels. Both families are integral kernels with full
 * support away from their single absorbing point (the origin), where the
 * kernel degenerates to a point mass. */
class DensityKernel {
 public:
  enum class Family { AffineGauss1D, Nonlinear2D };

  static DensityKernel affine_gauss_1d(double mu, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("AffineGauss1D: sigma must be > 0");
    DensityKernel k;
    k.family_ = Family::AffineGauss1D;
    k.mu_ = mu;
    k.sigma_ = sigma;
    return k;
  }

  static DensityKernel nonlinear_2d() {
    DensityKernel k;
    k.family_ = Family::Nonlinear2D;
    return k;
  }

  Family family() const { return family_; }
  std::size_t dim() const { return family_ == Family::AffineGauss1D ? 1 : 2; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

  std::vector<Point> absorbing_points() const { return {Point{0.0, 0.0}}; }

  bool is_absorbing(const Point& x) const {
    if (family_ == Family::AffineGauss1D) return x[0] == 0.0;
    return x[0] == 0.0 && x[1] == 0.0;
  }

  /* conditional mean and per-coordinate noise scale at x */
  void moments(const Point& x, Point& mean, double& scale) const {
    if (family_ == Family::AffineGauss1D) {
      mean = {mu_ * x[0], 0.0};
      scale = sigma_ * std::abs(x[0]);
    } else {
      const double a = x[0], b = x[1];
      mean = {0.5 * b * (3.0 * a * a + 2.0 * b * b - 0.5),
              0.9 * b * (2.0 * a * a + 4.0 * a * b + 3.0 * b * b - 0.5)};
      scale = 0.6 * std::hypot(a, b);
    }
  }

  /* one step of the dynamical form; xi/eta are N(0,1) draws */
  Point step(const Point& x, double xi, double eta = 0.0) const {
    if (is_absorbing(x)) return x;
    Point m;
    double s;
    moments(x, m, s);
    if (family_ == Family::AffineGauss1D) return {m[0] + s * xi, 0.0};
    return {m[0] + s * xi, m[1] + s * eta};
  }

  /* exact transition probability into an axis-aligned box */
  double box_prob(const Point& x, const std::array<Interval, 2>& box) const {
    if (is_absorbing(x)) {
      bool in = true;
      for (std::size_t a = 0; a < dim(); ++a)
        in = in && (x[a] >= box[a].lo && x[a] < box[a].hi);
      return in ? 1.0 : 0.0;
    }
    Point m;
    double s;
    moments(x, m, s);
    double p = 1.0;
    for (std::size_t a = 0; a < dim(); ++a)
      p *= normal_cdf((box[a].hi - m[a]) / s) - normal_cdf((box[a].lo - m[a]) / s);
    return std::clamp(p, 0.0, 1.0);
  }

  double density(const Point& x, const Point& y) const {
    if (is_absorbing(x))
      throw std::invalid_argument("density: kernel is a point mass at an absorbing state");
    Point m;
    double s;
    moments(x, m, s);
    double d = 1.0;
    for (std::size_t a = 0; a < dim(); ++a) d *= normal_pdf((y[a] - m[a]) / s) / s;
    return d;
  }

  /* P(x, R) for a union-of-cells Region on a grid of matching dimension */
  double transition_prob(const Point& x, const Region& R) const {
    const StateSpace& g = R.space();
    if (!g.is_grid() || g.dim() != dim())
      throw std::invalid_argument("transition_prob: region dimension mismatch");
    if (is_absorbing(x)) {
      auto c = g.cell_of(x);
      return (c && R.contains(*c)) ? 1.0 : 0.0;
    }
    Point m;
    double s;
    moments(x, m, s);
    // per-axis cell probabilities, then sum the products over the mask
    std::vector<double> p0(g.resolution(0));
    {
      double prev = normal_cdf((g.bounds(0).lo - m[0]) / s);
      for (std::size_t j = 0; j < g.resolution(0); ++j) {
        double edge = g.bounds(0).lo + g.cell_width(0) * static_cast<double>(j + 1);
        double c = normal_cdf((edge - m[0]) / s);
        p0[j] = std::max(0.0, c - prev);
        prev = c;
      }
    }
    if (dim() == 1) {
      double sum = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j)
        if (R.contains(j)) sum += p0[j];
      return std::min(sum, 1.0);
    }
    std::vector<double> p1(g.resolution(1));
    {
      double prev = normal_cdf((g.bounds(1).lo - m[1]) / s);
      for (std::size_t j = 0; j < g.resolution(1); ++j) {
        double edge = g.bounds(1).lo + g.cell_width(1) * static_cast<double>(j + 1);
        double c = normal_cdf((edge - m[1]) / s);
        p1[j] = std::max(0.0, c - prev);
        prev = c;
      }
    }
    double sum = 0.0;
    for (std::size_t j0 = 0; j0 < g.resolution(0); ++j0)
      for (std::size_t j1 = 0; j1 < g.resolution(1); ++j1)
        if (R.contains(g.index_of(j0, j1))) sum += p0[j0] * p1[j1];
    return std::min(sum, 1.0);
  }

 private:
  Family family_ = Family::AffineGauss1D;
  double mu_ = 0.0;
  double sigma_ = 1.0;
};

inline double transition_prob(const DensityKernel& k, const Point& x, const Region& R) {
  return k.transition_prob(x, R);
}

}  // namespace pimc

#endif  // PIMC_KERNEL_HH_
