/*
 * mclinear.hh
 *
 * Exact finite-chain backend: reach-avoid through the restricted linear
 * system (I - P~) w = b after removing the largest absorbing subset, and
 * the five-way equivalence battery used as a structural self-check.
 */

#ifndef PIMC_MCLINEAR_HH_
#define PIMC_MCLINEAR_HH_

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pimc/absorbing.hh"
#include "pimc/engine.hh"
#include "pimc/horizon.hh"
#include "pimc/kernel.hh"

namespace pimc {

namespace detail {

/* Nonsingularity with a conditioning tolerance. Eigen's rcond() estimate
 * is unreliable on exactly singular factorizations (NaN propagation in
 * the norm estimator), so the pivot ratio guards it. */
inline bool nonsingular(const Eigen::MatrixXd& M, double tol = 1e-12) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
  const double maxp = d.maxCoeff();
  const double minp = d.minCoeff();
  if (!std::isfinite(maxp) || maxp <= 0.0) return false;
  if (minp <= tol * maxp) return false;
  const double rc = lu.rcond();
  return std::isfinite(rc) && rc > tol;
}

/* restricted matrix (p_ij) for i,j in S, in ascending state order */
inline Eigen::MatrixXd restricted_matrix(const MatrixKernel& P,
                                         const std::vector<std::size_t>& S) {
  const std::size_t k = S.size();
  std::vector<std::ptrdiff_t> pos(P.size(), -1);
  for (std::size_t a = 0; a < k; ++a) pos[S[a]] = static_cast<std::ptrdiff_t>(a);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    P.for_row(S[a], [&](std::size_t j, double p) {
      if (pos[j] >= 0) M(static_cast<Eigen::Index>(a), pos[j]) = p;
    });
  }
  return M;
}

/* stationary iterate of u_{n+1} = I_A u_n; stops on ||du|| <= 1e-14 */
inline ValueFn invariance_stationary(const MatrixKernel& P, const Region& A,
                                     std::size_t iter_cap) {
  ValueFn u = ValueFn::indicator(A);
  for (std::size_t k = 0; k < iter_cap; ++k) {
    ValueFn next = apply_invariance_op(P, A, u);
    double d = max_norm_diff(next, u);
    u = std::move(next);
    if (d <= 1e-14) break;
  }
  return u;
}

}  // namespace detail

/* w = 1 on B, 0 on (A u B)^c and on l.a.s.(A\B); on the remainder solves
 * (I - P~) w = b by LU for up to 2000 unknowns, by Richardson iteration
 * with the contraction tail bound beyond that. Residual <= 1e-10. */
inline ValueFn solve_reach_avoid_exact(const MatrixKernel& P, const Region& A,
                                       const Region& B) {
  if (A.space() != P.space() || B.space() != P.space())
    throw std::invalid_argument("solve_reach_avoid_exact: space mismatch");
  Region Ad = difference(A, B);
  Region las = las_finite(P, Ad).las;
  Region At = difference(Ad, las);
  const std::vector<std::size_t> S = At.states();
  const std::size_t k = S.size();

  std::vector<double> w(P.size(), 0.0);
  for (std::size_t i = 0; i < P.size(); ++i)
    if (B.contains(i)) w[i] = 1.0;
  if (k == 0 || B.is_empty()) {
    // nothing to solve: either no transient part or the target is empty
    if (B.is_empty()) std::fill(w.begin(), w.end(), 0.0);
    return ValueFn(P.space(), std::move(w));
  }

  Eigen::VectorXd b(k);
  for (std::size_t a = 0; a < k; ++a) b(static_cast<Eigen::Index>(a)) = P.prob(S[a], B);
  Eigen::MatrixXd Pt = detail::restricted_matrix(P, S);
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(k, k) - Pt;

  Eigen::VectorXd x;
  bool solved = false;
  if (k <= 2000) {
    if (!detail::nonsingular(M, 1e-14))
      throw std::logic_error(
          "solve_reach_avoid_exact: singular system after l.a.s. excision");
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    x = lu.solve(b);
    solved = (M * x - b).lpNorm<Eigen::Infinity>() <= 1e-10;
  }
  if (!solved) {
    // contraction guarantees geometric convergence of x <- b + P~ x
    Region AtR = At;
    Certificate c = compute_m_rho(P, AtR, At.count() + 1);
    if (!c.certified())
      throw std::logic_error(
          "solve_reach_avoid_exact: transient part not contracting after excision");
    std::size_t n = plan_horizon(c.m, c.rho, 1e-11);
    x = Eigen::VectorXd::Zero(k);
    for (std::size_t it = 0; it < n; ++it) x = b + Pt * x;
    if ((M * x - b).lpNorm<Eigen::Infinity>() > 1e-10)
      throw std::logic_error("solve_reach_avoid_exact: iterative refinement stalled");
  }
  for (std::size_t a = 0; a < k; ++a)
    w[S[a]] = std::clamp(x(static_cast<Eigen::Index>(a)), 0.0, 1.0);
  return ValueFn(P.space(), std::move(w));
}

/* exact infinite-horizon invariance: u = 1 on l.a.s.(A), elsewhere the
 * probability of reaching l.a.s.(A) while staying in A */
inline ValueFn solve_invariance_exact(const MatrixKernel& P, const Region& A) {
  Region las = las_finite(P, A).las;
  return solve_reach_avoid_exact(P, A, las);
}

struct Theorem1Report {
  bool m_finite;       // (1) m(A) < inf by DP iteration
  bool contractive;    // (2) ||I_A^n|| < 1 for some n <= |A|+1, via matrix powers
  bool unique;         // (3) I - P_A nonsingular
  bool trivial;        // (4) stationary u is identically 0
  bool simple;         // (5) l.a.s.(A) empty
  bool agree() const {
    return m_finite == contractive && contractive == unique && unique == trivial &&
           trivial == simple;
  }
};

/* The five statements are evaluated through independent routes; they must
 * agree on finite chains. */
inline Theorem1Report theorem1_battery(const MatrixKernel& P, const Region& A) {
  if (A.space() != P.space())
    throw std::invalid_argument("theorem1_battery: space mismatch");
  Theorem1Report r{};
  const std::size_t cap = A.count() + 1;

  r.m_finite = compute_m_rho(P, A, std::max<std::size_t>(cap, 1)).certified();

  // (2): operator norm of I_A^n on the sup-normed function space is the
  // max row sum of the restricted matrix power
  {
    const std::vector<std::size_t> S = A.states();
    if (S.empty()) {
      r.contractive = true;
    } else {
      Eigen::MatrixXd M = detail::restricted_matrix(P, S);
      Eigen::MatrixXd Mk = Eigen::MatrixXd::Identity(S.size(), S.size());
      r.contractive = false;
      for (std::size_t n = 1; n <= cap; ++n) {
        Mk = Mk * M;
        if (Mk.cwiseAbs().rowwise().sum().maxCoeff() < 1.0 - 1e-9) {
          r.contractive = true;
          break;
        }
      }
    }
  }

  // (3): nonsingularity with a conditioning tolerance
  {
    const std::vector<std::size_t> S = A.states();
    if (S.empty()) {
      r.unique = true;
    } else {
      r.unique = detail::nonsingular(Eigen::MatrixXd::Identity(S.size(), S.size()) -
                                     detail::restricted_matrix(P, S));
    }
  }

  // (4): stationary iterate
  {
    ValueFn u = detail::invariance_stationary(P, A, std::max<std::size_t>(20000, 20 * cap));
    r.trivial = u.max_norm() <= 1e-9;
  }

  r.simple = las_finite(P, A).las.is_empty();
  return r;
}

/* (uniqueness of the invariance fixpoint, triviality of u); the Appendix
 * claim is that the two always coincide, with no continuity assumptions. */
inline std::pair<bool, bool> uniqueness_iff_trivial(const MatrixKernel& P, const Region& A) {
  if (A.space() != P.space())
    throw std::invalid_argument("uniqueness_iff_trivial: space mismatch");
  bool unique = true;
  const std::vector<std::size_t> S = A.states();
  if (!S.empty())
    unique = detail::nonsingular(Eigen::MatrixXd::Identity(S.size(), S.size()) -
                                 detail::restricted_matrix(P, S));
  ValueFn u = detail::invariance_stationary(
      P, A, std::max<std::size_t>(20000, 20 * (A.count() + 1)));
  return {unique, u.max_norm() <= 1e-9};
}

}  // namespace pimc

#endif  // PIMC_MCLINEAR_HH_
