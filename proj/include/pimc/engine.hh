/*
 * engine.hh
 *
 * Transition/invariance operators and the finite-horizon DP recursions
 * for reach-avoid and invariance value functions on finite (or
 * abstracted) chains.
 *
 * Determinism contract: operator application parallelizes over output
 * indices; each output reduces its own row in ascending index order, so
 * serial and parallel runs agree bitwise.
 */

#ifndef PIMC_ENGINE_HH_
#define PIMC_ENGINE_HH_

#include <cstdio>
#include <string>
#include <vector>

#include "pimc/detail/parallel.hh"
#include "pimc/kernel.hh"
#include "pimc/space.hh"

namespace pimc {

/* map state/cell index -> probability in [0,1] */
class ValueFn {
 public:
  ValueFn(StateSpace space, std::vector<double> values)
      : space_(std::move(space)), v_(std::move(values)) {
    if (v_.size() != space_.size())
      throw std::invalid_argument("ValueFn: length does not match space");
  }

  static ValueFn constant(const StateSpace& s, double c) {
    return ValueFn(s, std::vector<double>(s.size(), c));
  }
  static ValueFn indicator(const Region& r) {
    std::vector<double> v(r.size(), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) v[i] = r.contains(i) ? 1.0 : 0.0;
    return ValueFn(r.space(), std::move(v));
  }

  const StateSpace& space() const { return space_; }
  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  double max_norm() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  StateSpace space_;
  std::vector<double> v_;
};

inline double max_norm_diff(const ValueFn& a, const ValueFn& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct EngineDiagnostics {
  std::size_t clamp_events = 0;  // clamps larger than 1e-9
  double max_clamp = 0.0;
};

struct ExecPolicy {
  int threads = 1;
  EngineDiagnostics* diag = nullptr;
};

namespace detail {
/* out = 1_A(i) * dot(P_i, f), clamped to [0,1] */
inline void invariance_apply(const MatrixKernel& P, const Region& A,
                             const std::vector<double>& f, std::vector<double>& out,
                             const ExecPolicy& ex) {
  const double* fp = f.data();
  std::vector<double> clamps;
  if (ex.diag) clamps.assign(P.size(), 0.0);
  parallel_for(P.size(), ex.threads, [&](std::size_t i) {
    if (!A.contains(i)) {
      out[i] = 0.0;
      return;
    }
    double v = P.dot_row(i, fp);
    double c = std::clamp(v, 0.0, 1.0);
    if (ex.diag) clamps[i] = std::abs(v - c);
    out[i] = c;
  });
  if (ex.diag) {
    for (double c : clamps) {
      if (c > 1e-9) {
        ++ex.diag->clamp_events;
        ex.diag->max_clamp = std::max(ex.diag->max_clamp, c);
      }
    }
  }
}
}  // namespace detail

/* I_A f(x) = 1_A(x) P f(x) */
inline ValueFn apply_invariance_op(const MatrixKernel& P, const Region& A,
                                   const ValueFn& f, const ExecPolicy& ex = {}) {
  if (A.space() != P.space() || f.space() != P.space())
    throw std::invalid_argument("apply_invariance_op: space mismatch");
  std::vector<double> out(P.size());
  detail::invariance_apply(P, A, f.values(), out, ex);
  return ValueFn(P.space(), std::move(out));
}

/* w_0 = 1_B;  w_{k+1} = 1_B + I_{A\B} w_k;  returns w_n.
 * A and B need not be disjoint: the recursion runs on A\B by construction. */
inline ValueFn bounded_reach_avoid(const MatrixKernel& P, const Region& A,
                                   const Region& B, std::size_t n,
                                   const ExecPolicy& ex = {}) {
  if (A.space() != P.space() || B.space() != P.space())
    throw std::invalid_argument("bounded_reach_avoid: space mismatch");
  Region AmB = difference(A, B);
  std::vector<double> w(P.size()), next(P.size());
  for (std::size_t i = 0; i < P.size(); ++i) w[i] = B.contains(i) ? 1.0 : 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    detail::invariance_apply(P, AmB, w, next, ex);
    for (std::size_t i = 0; i < P.size(); ++i) {
      double v = (B.contains(i) ? 1.0 : 0.0) + next[i];
      w[i] = std::clamp(v, 0.0, 1.0);
    }
  }
  return ValueFn(P.space(), std::move(w));
}

/* u_0 = 1_A;  u_{k+1} = I_A u_k;  returns u_n */
inline ValueFn bounded_invariance(const MatrixKernel& P, const Region& A,
                                  std::size_t n, const ExecPolicy& ex = {}) {
  if (A.space() != P.space())
    throw std::invalid_argument("bounded_invariance: space mismatch");
  std::vector<double> u(P.size()), next(P.size());
  for (std::size_t i = 0; i < P.size(); ++i) u[i] = A.contains(i) ? 1.0 : 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    detail::invariance_apply(P, A, u, next, ex);
    std::swap(u, next);
  }
  return ValueFn(P.space(), std::move(u));
}

/* residual of the fixpoint equation w = 1_B + I_{A\B} w */
inline double bellman_residual(const MatrixKernel& P, const Region& A, const Region& B,
                               const ValueFn& w, const ExecPolicy& ex = {}) {
  Region AmB = difference(A, B);
  std::vector<double> img(P.size());
  detail::invariance_apply(P, AmB, w.values(), img, ex);
  double r = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    double rhs = (B.contains(i) ? 1.0 : 0.0) + img[i];
    r = std::max(r, std::abs(std::min(rhs, 1.0) - w[i]));
  }
  return r;
}

/* CSV export: index, coordinate(s), value; %.17g keeps round-trips exact */
inline std::string value_csv(const ValueFn& f) {
  const StateSpace& s = f.space();
  std::string out = s.is_grid() ? (s.dim() == 2 ? "index,x1,x2,value\n" : "index,x1,value\n")
                                : "index,value\n";
  char buf[128];
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (s.is_grid()) {
      Point c = s.cell_center(i);
      if (s.dim() == 2)
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i, c[0], c[1], f[i]);
      else
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, c[0], f[i]);
    } else {
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, f[i]);
    }
    out += buf;
  }
  return out;
}

}  // namespace pimc

#endif  // PIMC_ENGINE_HH_
