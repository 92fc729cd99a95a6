/*
 * absorbing.hh
 *
 * Largest-absorbing-subset computation and simplicity verification:
 * exact fixpoint iteration on finite chains, supersatisfaction-set
 * iteration with a precision delta otherwise, and the density-support
 * criterion for the built-in families.
 */

#ifndef PIMC_ABSORBING_HH_
#define PIMC_ABSORBING_HH_

#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

#include "pimc/kernel.hh"
#include "pimc/space.hh"

namespace pimc {

enum class SimplicityVerdict { Simple, NonSimple, Inconclusive };

inline const char* to_string(SimplicityVerdict v) {
  switch (v) {
    case SimplicityVerdict::Simple: return "Simple";
    case SimplicityVerdict::NonSimple: return "NonSimple";
    default: return "Inconclusive";
  }
}

struct AbsorbingReport {
  Region las;                 // exact l.a.s., or a superset candidate when inconclusive
  SimplicityVerdict verdict;
  std::size_t iterations;
  double delta_used;          // 0 for exact computations
};

/* Exact greatest fixpoint of A_{k+1} = {x in A : P(x, A_k) = 1} on a
 * finite chain; stabilizes within |A| steps. Probability-one is tested
 * as leaked mass <= 1e-12. */
inline AbsorbingReport las_finite(const MatrixKernel& P, const Region& A) {
  if (A.space() != P.space()) throw std::invalid_argument("las_finite: space mismatch");
  Region cur = A;
  std::size_t iters = 0;
  for (;;) {
    ++iters;
    std::vector<std::uint8_t> next(cur.size(), 0);
    bool changed = false;
    for (std::size_t i = 0; i < A.size(); ++i) {
      if (!A.contains(i)) continue;
      bool stays = P.leak(i, cur) <= 1e-12;
      next[i] = stays ? 1 : 0;
      if (next[i] != (cur.contains(i) ? 1 : 0)) changed = true;
    }
    Region r(A.space(), std::move(next));
    if (!changed) {
      SimplicityVerdict v =
          r.is_empty() ? SimplicityVerdict::Simple : SimplicityVerdict::NonSimple;
      return {r, v, iters, 0.0};
    }
    cur = r;
  }
}

/* Supersatisfaction-set iteration A*_{k+1} = {x in A*_k : P(x, A*_k) >= 1-delta}.
 * Sound for simplicity (A_k is contained in A*_k); never reports NonSimple.
 * TransitionFn: (index, Region) -> probability. */
template <typename TransitionFn>
inline AbsorbingReport an_sequence_approx_fn(const StateSpace& space, const Region& A,
                                             double delta, std::size_t n_max,
                                             const TransitionFn& tp) {
  if (delta < 0.0 || delta >= 1.0)
    throw std::invalid_argument("an_sequence_approx: delta must be in [0,1)");
  // delta = 0 means exact: fall back to the same probability-one slack as
  // las_finite, since floating-point row sums cannot certify >= 1 literally.
  const double thr = (delta == 0.0) ? 1.0 - 1e-12 : 1.0 - delta;
  Region cur = A;
  for (std::size_t k = 1; k <= n_max; ++k) {
    std::vector<std::uint8_t> next(cur.size(), 0);
    bool changed = false;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (!cur.contains(i)) continue;
      next[i] = (tp(i, cur) >= thr) ? 1 : 0;
      if (!next[i]) changed = true;
    }
    Region r(space, std::move(next));
    if (r.is_empty()) return {r, SimplicityVerdict::Simple, k, delta};
    if (!changed) return {r, SimplicityVerdict::Inconclusive, k, delta};
    cur = r;
  }
  return {cur, SimplicityVerdict::Inconclusive, n_max, delta};
}

inline AbsorbingReport an_sequence_approx(const MatrixKernel& P, const Region& A,
                                          double delta, std::size_t n_max) {
  return an_sequence_approx_fn(P.space(), A, delta, n_max,
                               [&](std::size_t i, const Region& R) { return P.prob(i, R); });
}

/* Density kernel on a grid: evaluates the exact kernel at cell centers.
 * A cell containing an absorbing point of the family is never dropped
 * while it stays in the candidate set (the point itself has P(x, .) = 1
 * there), which keeps the Simple verdict sound at cell granularity. */
inline AbsorbingReport an_sequence_approx(const DensityKernel& k, const Region& A,
                                          double delta, std::size_t n_max) {
  const StateSpace& g = A.space();
  if (!g.is_grid() || g.dim() != k.dim())
    throw std::invalid_argument("an_sequence_approx: grid/kernel mismatch");
  std::vector<std::uint8_t> pinned(g.size(), 0);
  for (const Point& p : k.absorbing_points())
    if (auto c = g.cell_of(p)) pinned[*c] = 1;
  return an_sequence_approx_fn(g, A, delta, n_max, [&](std::size_t i, const Region& R) {
    if (pinned[i] && R.contains(i)) return 1.0;
    return k.transition_prob(g.cell_center(i), R);
  });
}

/* Support criterion: the built-in families have full support at every
 * non-absorbing state, so a bounded A is simple iff it contains no
 * absorbing point of the family. */
inline AbsorbingReport simplicity_by_support(const DensityKernel& k, const Region& A) {
  const StateSpace& g = A.space();
  if (!g.is_grid() || g.dim() != k.dim())
    throw std::invalid_argument("simplicity_by_support: grid/kernel mismatch");
  std::vector<std::uint8_t> m(A.size(), 0);
  bool any = false;
  for (const Point& p : k.absorbing_points()) {
    auto c = g.cell_of(p);
    if (c && A.contains(*c)) {
      m[*c] = 1;
      any = true;
    }
  }
  Region las(g, std::move(m));
  return {las, any ? SimplicityVerdict::NonSimple : SimplicityVerdict::Simple, 1, 0.0};
}

inline constexpr std::size_t kInfSteps = std::numeric_limits<std::size_t>::max();

/* sup over i in A of the shortest positive-probability path length from i
 * to A^c; kInfSteps iff some state of A cannot reach A^c. One backward BFS
 * from A^c over reversed edges. */
inline std::size_t m_upper_bound_graph(const MatrixKernel& P, const Region& A) {
  if (A.space() != P.space())
    throw std::invalid_argument("m_upper_bound_graph: space mismatch");
  const std::size_t n = P.size();
  if (A.is_empty()) return 0;
  // reversed adjacency
  std::vector<std::vector<std::size_t>> preds(n);
  for (std::size_t i = 0; i < n; ++i)
    P.for_row(i, [&](std::size_t j, double) { preds[j].push_back(i); });
  std::vector<std::size_t> dist(n, kInfSteps);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (!A.contains(i)) {
      dist[i] = 0;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    std::size_t j = queue.front();
    queue.pop_front();
    for (std::size_t i : preds[j]) {
      if (dist[i] == kInfSteps) {
        dist[i] = dist[j] + 1;
        queue.push_back(i);
      }
    }
  }
  std::size_t worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!A.contains(i)) continue;
    if (dist[i] == kInfSteps) return kInfSteps;
    worst = std::max(worst, dist[i]);
  }
  return worst;
}

}  // namespace pimc

#endif  // PIMC_ABSORBING_HH_
