/*
 * horizon.hh
 *
 * Contraction analysis: m(A) and rho(A), the geometric tail bound
 *   || w - w_n || <= m/(1-rho) * rho^floor(n/m),
 * and horizon planning that certifies a target precision for
 * infinite-horizon problems.
 */

#ifndef PIMC_HORIZON_HH_
#define PIMC_HORIZON_HH_

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "pimc/engine.hh"
#include "pimc/space.hh"

namespace pimc {

struct Certificate {
  std::size_t m = 0;
  double rho = 0.0;          // = ||u_m||; 1 when status is Unknown
  std::size_t horizon = 0;
  double tail = 0.0;
  enum class Status { Certified, Unknown } status = Status::Unknown;

  bool certified() const { return status == Status::Certified; }
};

/* min(1, m/(1-rho) * rho^floor(n/m)); the raw bound can exceed 1 for
 * small n, while value functions live in [0,1]. m = 0 certifies w = w_0. */
inline double tail_bound(std::size_t m, double rho, std::size_t n) {
  if (rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("tail_bound: rho must be in [0,1)");
  if (m == 0) return 0.0;
  const double k = std::floor(static_cast<double>(n) / static_cast<double>(m));
  const double raw = static_cast<double>(m) / (1.0 - rho) * std::pow(rho, k);
  return std::min(1.0, raw);
}

/* First index m with ||u_m|| < 1 (with margin eta = 1e-9 against
 * floating-point hovering at 1-ulp) and rho = ||u_m||. Unknown when no
 * such index <= m_max exists. */
inline Certificate compute_m_rho(const MatrixKernel& P, const Region& A,
                                 std::size_t m_max, const ExecPolicy& ex = {}) {
  if (m_max < 1) throw std::invalid_argument("compute_m_rho: m_max must be >= 1");
  if (A.space() != P.space()) throw std::invalid_argument("compute_m_rho: space mismatch");
  constexpr double eta = 1e-9;
  Certificate c;
  ValueFn u = ValueFn::indicator(A);
  for (std::size_t m = 0; m <= m_max; ++m) {
    if (m > 0) u = apply_invariance_op(P, A, u, ex);
    const double norm = u.max_norm();
    if (norm < 1.0 - eta) {
      c.m = m;
      c.rho = norm;
      c.status = Certificate::Status::Certified;
      return c;
    }
  }
  c.m = m_max;
  c.rho = 1.0;
  c.status = Certificate::Status::Unknown;
  return c;
}

/* Smallest n with tail_bound(m, rho, n) <= eps. The bound is a staircase
 * in floor(n/m); the closed-form start is verified by direct evaluation. */
inline std::size_t plan_horizon(std::size_t m, double rho, double eps) {
  if (rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("plan_horizon: rho must be in [0,1)");
  if (eps <= 0.0 || eps >= 1.0)
    throw std::invalid_argument("plan_horizon: eps must be in (0,1)");
  if (m == 0) return 0;
  if (rho == 0.0) return m;
  const double md = static_cast<double>(m);
  double k = std::ceil(std::log(eps * (1.0 - rho) / md) / std::log(rho));
  if (k < 0.0) k = 0.0;
  std::size_t n = m * static_cast<std::size_t>(k);
  while (tail_bound(m, rho, n) > eps) n += m;           // guard rounding
  while (n >= m && tail_bound(m, rho, n - m) <= eps) n -= m;
  return n;
}

/* Raised when a contraction certificate cannot be established; carries
 * the set whose largest absorbing subset should be inspected. */
class NonContractiveError : public std::runtime_error {
 public:
  NonContractiveError(std::string what, Region suspect)
      : std::runtime_error(std::move(what)), suspect_(std::move(suspect)) {}
  const Region& suspect_set() const { return suspect_; }

 private:
  Region suspect_;
};

struct CertifiedValue {
  ValueFn lower;
  ValueFn upper;
  Certificate cert;
};

/* Certified sandwich for w(.;A,B): runs the contraction analysis on A\B,
 * plans the horizon for the target precision and returns
 * lower = w_n <= w <= min(1, w_n + tail) = upper. */
inline CertifiedValue unbounded_reach_avoid(const MatrixKernel& P, const Region& A,
                                            const Region& B, double eps,
                                            std::size_t m_max = 0,
                                            const ExecPolicy& ex = {}) {
  if (eps <= 0.0 || eps >= 1.0)
    throw std::invalid_argument("unbounded_reach_avoid: eps must be in (0,1)");
  Region At = difference(A, B);
  if (B.is_empty()) {
    Certificate c;
    c.status = Certificate::Status::Certified;
    ValueFn zero = ValueFn::constant(P.space(), 0.0);
    return {zero, zero, c};
  }
  if (m_max == 0) m_max = At.count() + 1;
  Certificate c = compute_m_rho(P, At, m_max, ex);
  if (!c.certified())
    throw NonContractiveError(
        "unbounded_reach_avoid: no contraction certificate within m_max = " +
            std::to_string(m_max) + " (A\\B possibly non-simple)",
        At);
  c.horizon = plan_horizon(c.m, c.rho, eps);
  c.tail = tail_bound(c.m, c.rho, c.horizon);
  ValueFn w = bounded_reach_avoid(P, At, B, c.horizon, ex);
  std::vector<double> up(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) up[i] = std::min(1.0, w[i] + c.tail);
  return {w, ValueFn(P.space(), std::move(up)), c};
}

}  // namespace pimc

#endif  // PIMC_HORIZON_HH_
