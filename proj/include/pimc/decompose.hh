/*
 * decompose.hh
 *
 * Reach-avoid and invariance over non-simple sets by excising a
 * neighborhood of the largest absorbing subset. The excision error is
 * certified through a delta-locally excessive function g (a stochastic
 * Lyapunov function): excising {g < eps*delta} costs at most eps.
 */

#ifndef PIMC_DECOMPOSE_HH_
#define PIMC_DECOMPOSE_HH_

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "pimc/discretize.hh"
#include "pimc/engine.hh"
#include "pimc/horizon.hh"
#include "pimc/kernel.hh"
#include "pimc/space.hh"

namespace pimc {

using ScalarFn = std::function<double(const Point&)>;

/* candidate stochastic Lyapunov function: g >= 0, claimed zero set equal
 * to the l.a.s., excessive on {g < delta} */
struct ExcessiveCandidate {
  ScalarFn g;
  ScalarFn pg;       // x -> (P g)(x), closed form for the built-in families
  double delta;      // level of local excessivity
  Region zero_set;   // claimed {g = 0} at cell resolution
};

/* cells whose center satisfies (P g)(c) - g(c) <= 0 */
inline Region excessive_set(const StateSpace& space, const Region& sample,
                            const ScalarFn& g, const ScalarFn& pg) {
  if (!space.is_grid()) throw std::invalid_argument("excessive_set: grid space required");
  std::vector<std::uint8_t> m(space.size(), 0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!sample.contains(i)) continue;
    Point c = space.cell_center(i);
    double gv = g(c);
    if (gv < 0.0) throw std::invalid_argument("excessive_set: g negative at a sample point");
    m[i] = (pg(c) - gv <= 0.0) ? 1 : 0;
  }
  return Region(space, std::move(m));
}

struct ExcessivityReport {
  bool sublevel_in_A;        // (a) {g < delta} subset of A
  bool sublevel_excessive;   // (b) {g < delta} subset of E_g
  bool zero_set_matches;     // (c) {g = 0} equals the l.a.s. candidate
  bool verified() const { return sublevel_in_A && sublevel_excessive && zero_set_matches; }
  // cell-center sampling cannot certify a continuum claim
  std::string status() const { return verified() ? "numerically verified" : "failed"; }
};

/* Checks the delta-local excessivity conditions at cell-center
 * resolution. The sublevel set must also stay off the grid boundary
 * (sampled along the faces), since A lives inside the grid box. */
inline ExcessivityReport verify_local_excessivity(const StateSpace& space,
                                                  const ExcessiveCandidate& cand,
                                                  const Region& A,
                                                  const Region& las_candidate) {
  if (!space.is_grid())
    throw std::invalid_argument("verify_local_excessivity: grid space required");
  ExcessivityReport rep{true, true, true};
  for (std::size_t i = 0; i < space.size(); ++i) {
    Point c = space.cell_center(i);
    double gv = cand.g(c);
    if (gv < 0.0)
      throw std::invalid_argument("verify_local_excessivity: g negative at a sample point");
    if (gv < cand.delta) {
      if (!A.contains(i)) rep.sublevel_in_A = false;
      if (cand.pg(c) - gv > 0.0) rep.sublevel_excessive = false;
    }
    bool zero = cand.zero_set.contains(i);
    if (zero != las_candidate.contains(i)) rep.zero_set_matches = false;
  }
  // boundary faces: {g < delta} leaking out of the grid box fails (a)
  for (std::size_t a = 0; a < space.dim(); ++a) {
    for (double face : {space.bounds(a).lo, space.bounds(a).hi}) {
      if (space.dim() == 1) {
        if (cand.g(Point{face, 0.0}) < cand.delta) rep.sublevel_in_A = false;
      } else {
        std::size_t other = 1 - a;
        for (std::size_t j = 0; j < space.resolution(other); ++j) {
          double t = space.bounds(other).lo +
                     space.cell_width(other) * (static_cast<double>(j) + 0.5);
          Point p = a == 0 ? Point{face, t} : Point{t, face};
          if (cand.g(p) < cand.delta) rep.sublevel_in_A = false;
        }
      }
    }
  }
  return rep;
}

/* sublevel set {g < level} sampled at cell centers */
inline Region sublevel_region(const StateSpace& space, const ScalarFn& g, double level) {
  std::vector<std::uint8_t> m(space.size(), 0);
  for (std::size_t i = 0; i < space.size(); ++i)
    m[i] = (g(space.cell_center(i)) < level) ? 1 : 0;
  return Region(space, std::move(m));
}

/* cells intersecting the open ball of the given radius around the origin:
 * outward rounding (per-cell infimum of the norm), so the region covers
 * the continuum ball. Both built-in candidates have ball sublevel sets. */
inline Region outer_ball_region(const StateSpace& space, double radius) {
  if (!space.is_grid()) throw std::invalid_argument("outer_ball_region: grid required");
  std::vector<std::uint8_t> m(space.size(), 0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    double nsq = 0.0;
    Point c = space.cell_center(i);
    for (std::size_t a = 0; a < space.dim(); ++a) {
      double half = 0.5 * space.cell_width(a);
      double lo = c[a] - half, hi = c[a] + half;
      double closest = (lo <= 0.0 && 0.0 <= hi) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
      nsq += closest * closest;
    }
    m[i] = (std::sqrt(nsq) < radius) ? 1 : 0;
  }
  return Region(space, std::move(m));
}

struct DecompositionResult {
  CertifiedValue value;      // sandwich for w(.; A\C, B)
  Region excision;           // C
  double excision_error;     // bound on sup_{y in C} w(y;A,B); 1 when uncertified
  bool conditionally_certified;  // true when C is only an l.a.s. superset candidate
  ErrorLedger ledger;
};

/* Lower/upper bounds for w(.;A,B) after excising C from A:
 *   value.lower <= w(.;A,B) <= min(1, value.upper + excision_error).
 * eps_claim is the caller's bound on sup_{y in C} w(y;A,B) (eps when C =
 * {g < eps*delta} for a verified candidate); pass nullopt when no
 * certificate exists, which records the honest bound 1. */
inline DecompositionResult decompose_reach_avoid(
    const MatrixKernel& P, const Region& A, const Region& B, const Region& C,
    std::optional<double> eps_claim, double eps_horizon, double lambda = 0.0,
    bool conditionally_certified = false, const ExecPolicy& ex = {}) {
  if (!subset(C, A)) throw std::invalid_argument("decompose_reach_avoid: C must be inside A");
  Region Ar = difference(A, C);
  CertifiedValue v = unbounded_reach_avoid(P, Ar, B, eps_horizon, 0, ex);
  double excision_error = eps_claim ? std::min(1.0, *eps_claim) : 1.0;
  ErrorLedger ledger = total_error(lambda, v.cert.horizon, v.cert.tail, excision_error);
  return {std::move(v), C, excision_error, conditionally_certified, ledger};
}

/* Doob lower bound u(x; {g<delta}) >= 1 - g(x)/delta for a verified
 * candidate; trivial (0) once g(x) >= delta */
inline double doob_lower_bound(const ExcessiveCandidate& cand, const Point& x) {
  double gv = cand.g(x);
  if (gv < 0.0) throw std::invalid_argument("doob_lower_bound: g negative");
  return std::max(0.0, 1.0 - gv / cand.delta);
}

/* checked form: the bound is only claimed for candidates that passed the
 * local-excessivity verification */
inline double doob_lower_bound(const ExcessiveCandidate& cand,
                               const ExcessivityReport& verification, const Point& x) {
  if (!verification.verified())
    throw std::invalid_argument("doob_lower_bound: unverified candidate");
  return doob_lower_bound(cand, x);
}

class NoExcessiveCandidate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/* Golden-section scan of b(q) = E|mu + sigma xi|^q over q in (0,4]; the
 * family g_q = |x|^q is locally excessive iff b(q) < 1, which exists only
 * in the negative-drift regime. */
inline double find_excessive_exponent(double mu, double sigma) {
  const double lo0 = 1e-3, hi0 = 4.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo0, b = hi0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = affine_gauss_moment(mu, sigma, x1), f2 = affine_gauss_moment(mu, sigma, x2);
  for (int it = 0; it < 80 && (b - a) > 1e-6; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = affine_gauss_moment(mu, sigma, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = affine_gauss_moment(mu, sigma, x2);
    }
  }
  double q = 0.5 * (a + b);
  if (affine_gauss_moment(mu, sigma, q) >= 1.0 - 1e-3)
    throw NoExcessiveCandidate(
        "find_excessive_exponent: no q in (0,4] with b(q) < 1 - 1e-3 "
        "(drift h(mu,sigma) is likely non-negative)");
  return q;
}

/* built-in candidate g_q = |x|^q for the 1d affine-Gaussian family */
inline ExcessiveCandidate affine_gauss_candidate(const DensityKernel& k,
                                                 const StateSpace& grid, double q,
                                                 double delta) {
  if (k.family() != DensityKernel::Family::AffineGauss1D)
    throw std::invalid_argument("affine_gauss_candidate: wrong kernel family");
  const double bq = affine_gauss_moment(k.mu(), k.sigma(), q);
  ScalarFn g = [q](const Point& x) { return std::pow(std::abs(x[0]), q); };
  ScalarFn pg = [q, bq](const Point& x) { return bq * std::pow(std::abs(x[0]), q); };
  Region zero = Region::empty(grid);
  if (auto c = grid.cell_of(Point{0.0, 0.0}))
    zero = Region::of_states(grid, {*c});
  return {std::move(g), std::move(pg), delta, std::move(zero)};
}

/* built-in candidate g = ||x||^2 for the 2d nonlinear family */
inline ExcessiveCandidate nonlinear2d_candidate(const StateSpace& grid,
                                                double delta = 0.25) {
  ScalarFn g = [](const Point& x) { return x[0] * x[0] + x[1] * x[1]; };
  ScalarFn pg = [](const Point& x) { return nonlinear2d_pg(x[0], x[1]); };
  Region zero = Region::empty(grid);
  if (auto c = grid.cell_of(Point{0.0, 0.0}))
    zero = Region::of_states(grid, {*c});
  return {std::move(g), std::move(pg), delta, std::move(zero)};
}

}  // namespace pimc

#endif  // PIMC_DECOMPOSE_HH_
