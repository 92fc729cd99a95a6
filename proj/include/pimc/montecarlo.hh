/*
 * montecarlo.hh
 *
 * Trajectory simulation and statistical estimates of reach-avoid and
 * invariance probabilities. Per-path generators are keyed by
 * (seed, path index), so estimates do not depend on thread scheduling,
 * and event counts reduce by integer sums.
 */

#ifndef PIMC_MONTECARLO_HH_
#define PIMC_MONTECARLO_HH_

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pimc/detail/parallel.hh"
#include "pimc/kernel.hh"
#include "pimc/space.hh"

namespace pimc {

namespace detail {
inline std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t path) {
  std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  return std::mt19937_64(ss);
}

/* ascending cumulative walk; ties broken toward the lower index */
template <typename Rng>
inline std::size_t categorical_step(const MatrixKernel& P, std::size_t i, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double cum = 0.0;
  std::size_t last = i;
  bool found = false;
  P.for_row(i, [&](std::size_t j, double p) {
    if (found) return;
    cum += p;
    last = j;
    if (u < cum) found = true;
  });
  return last;  // rounding fallthrough lands on the last positive entry
}
}  // namespace detail

struct Path {
  std::vector<std::size_t> states;  // finite chains
  std::vector<Point> points;        // density kernels
  bool finite = true;

  std::size_t length() const { return finite ? states.size() : points.size(); }

  /* first index with state in R; nullopt encodes infinity */
  std::optional<std::size_t> hitting_time(const Region& R) const {
    if (finite) {
      for (std::size_t t = 0; t < states.size(); ++t)
        if (R.contains(states[t])) return t;
      return std::nullopt;
    }
    for (std::size_t t = 0; t < points.size(); ++t) {
      auto c = R.space().cell_of(points[t]);
      if (c && R.contains(*c)) return t;
    }
    return std::nullopt;
  }
};

inline Path simulate(const MatrixKernel& P, std::size_t x0, std::size_t steps,
                     std::uint64_t seed, std::uint64_t path_index = 0) {
  if (x0 >= P.size()) throw std::invalid_argument("simulate: initial state out of range");
  auto rng = detail::path_rng(seed, path_index);
  Path p;
  p.finite = true;
  p.states.reserve(steps + 1);
  std::size_t x = x0;
  p.states.push_back(x);
  for (std::size_t t = 0; t < steps; ++t) {
    x = detail::categorical_step(P, x, rng);
    p.states.push_back(x);
  }
  return p;
}

inline Path simulate(const DensityKernel& k, const Point& x0, std::size_t steps,
                     std::uint64_t seed, std::uint64_t path_index = 0) {
  auto rng = detail::path_rng(seed, path_index);
  std::normal_distribution<double> normal(0.0, 1.0);
  Path p;
  p.finite = false;
  p.points.reserve(steps + 1);
  Point x = x0;
  p.points.push_back(x);
  for (std::size_t t = 0; t < steps; ++t) {
    if (k.is_absorbing(x)) {
      p.points.push_back(x);  // absorbing points stay fixed forever
      continue;
    }
    double xi = normal(rng);
    double eta = k.dim() == 2 ? normal(rng) : 0.0;
    x = k.step(x, xi, eta);
    p.points.push_back(x);
  }
  return p;
}

/* mean, binomial 95% half-width, and the certified interval after
 * cutoff-widening for unbounded queries */
struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double lo = 0.0;  // interval including the cutoff widening
  double hi = 0.0;
};

namespace detail {

inline Estimate finish_estimate(std::uint64_t seed, std::size_t n, std::size_t hits,
                                double widen_lo, double widen_hi) {
  Estimate e;
  e.samples = n;
  e.seed = seed;
  e.mean = static_cast<double>(hits) / static_cast<double>(n);
  e.half_width = 1.96 * std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
  e.lo = std::max(0.0, e.mean - e.half_width - widen_lo);
  e.hi = std::min(1.0, e.mean + e.half_width + widen_hi);
  return e;
}

enum class Outcome { Hit, Miss };

/* reach-avoid event on one path: hit B within the horizon while staying
 * in A; undecided-at-horizon counts as a miss (the tail widening covers
 * the censored mass for unbounded queries) */
template <typename StepFn, typename InA, typename InB, typename Absorbed>
inline Outcome run_until(std::size_t horizon, const StepFn& step, const InA& inA,
                         const InB& inB, const Absorbed& absorbed) {
  for (std::size_t t = 0;; ++t) {
    if (inB()) return Outcome::Hit;
    if (!inA()) return Outcome::Miss;
    if (t >= horizon) return Outcome::Miss;
    if (absorbed()) return Outcome::Miss;  // stuck in A\B forever
    step();
  }
}
}  // namespace detail

/* empirical frequency of A U^{<=n} B over N paths; for unbounded queries
 * pass the cutoff plus the horizon module's tail bound, which widens the
 * interval from above: w_cutoff <= w <= w_cutoff + tail */
inline Estimate estimate_reach_avoid(const MatrixKernel& P, std::size_t x0,
                                     const Region& A, const Region& B,
                                     std::size_t horizon, std::size_t N,
                                     std::uint64_t seed, double tail_widen = 0.0,
                                     int threads = 1) {
  if (N < 1) throw std::invalid_argument("estimate_reach_avoid: N must be >= 1");
  std::vector<std::uint8_t> hit(N, 0);
  detail::parallel_for(N, threads, [&](std::size_t p) {
    auto rng = detail::path_rng(seed, p);
    std::size_t x = x0;
    auto out = detail::run_until(
        horizon, [&] { x = detail::categorical_step(P, x, rng); },
        [&] { return A.contains(x); }, [&] { return B.contains(x); },
        [&] { return P.entry(x, x) == 1.0; });
    hit[p] = out == detail::Outcome::Hit ? 1 : 0;
  });
  std::size_t hits = 0;
  for (auto h : hit) hits += h;
  return detail::finish_estimate(seed, N, hits, 0.0, tail_widen);
}

inline Estimate estimate_reach_avoid(const DensityKernel& k, const Point& x0,
                                     const Region& A, const Region& B,
                                     std::size_t horizon, std::size_t N,
                                     std::uint64_t seed, double tail_widen = 0.0,
                                     int threads = 1) {
  if (N < 1) throw std::invalid_argument("estimate_reach_avoid: N must be >= 1");
  std::vector<std::uint8_t> hit(N, 0);
  const StateSpace& g = A.space();
  detail::parallel_for(N, threads, [&](std::size_t p) {
    auto rng = detail::path_rng(seed, p);
    std::normal_distribution<double> normal(0.0, 1.0);
    Point x = x0;
    auto in = [&](const Region& R) {
      auto c = g.cell_of(x);
      return c && R.contains(*c);
    };
    auto out = detail::run_until(
        horizon,
        [&] {
          double xi = normal(rng);
          double eta = k.dim() == 2 ? normal(rng) : 0.0;
          x = k.step(x, xi, eta);
        },
        [&] { return in(A); }, [&] { return in(B); }, [&] { return k.is_absorbing(x); });
    hit[p] = out == detail::Outcome::Hit ? 1 : 0;
  });
  std::size_t hits = 0;
  for (auto h : hit) hits += h;
  return detail::finish_estimate(seed, N, hits, 0.0, tail_widen);
}

/* invariance event: stay in A for n steps (or until the cutoff); an
 * absorbing point inside A decides the path immediately. Unbounded
 * queries widen below: u_cutoff - tail <= u <= u_cutoff. */
inline Estimate estimate_invariance(const MatrixKernel& P, std::size_t x0, const Region& A,
                                    std::size_t horizon, std::size_t N, std::uint64_t seed,
                                    double tail_widen = 0.0, int threads = 1) {
  if (N < 1) throw std::invalid_argument("estimate_invariance: N must be >= 1");
  std::vector<std::uint8_t> ok(N, 0);
  detail::parallel_for(N, threads, [&](std::size_t p) {
    auto rng = detail::path_rng(seed, p);
    std::size_t x = x0;
    bool inv = true;
    for (std::size_t t = 0; t < horizon; ++t) {
      if (!A.contains(x)) {
        inv = false;
        break;
      }
      if (P.entry(x, x) == 1.0) break;  // absorbing state inside A
      x = detail::categorical_step(P, x, rng);
    }
    if (inv && !A.contains(x)) inv = false;
    ok[p] = inv ? 1 : 0;
  });
  std::size_t hits = 0;
  for (auto h : ok) hits += h;
  return detail::finish_estimate(seed, N, hits, tail_widen, 0.0);
}

inline Estimate estimate_invariance(const DensityKernel& k, const Point& x0,
                                    const Region& A, std::size_t horizon, std::size_t N,
                                    std::uint64_t seed, double tail_widen = 0.0,
                                    int threads = 1) {
  if (N < 1) throw std::invalid_argument("estimate_invariance: N must be >= 1");
  const StateSpace& g = A.space();
  std::vector<std::uint8_t> ok(N, 0);
  detail::parallel_for(N, threads, [&](std::size_t p) {
    auto rng = detail::path_rng(seed, p);
    std::normal_distribution<double> normal(0.0, 1.0);
    Point x = x0;
    bool inv = true;
    for (std::size_t t = 0; t < horizon; ++t) {
      auto c = g.cell_of(x);
      if (!c || !A.contains(*c)) {
        inv = false;
        break;
      }
      if (k.is_absorbing(x)) break;  // stays inside A forever
      double xi = normal(rng);
      double eta = k.dim() == 2 ? normal(rng) : 0.0;
      x = k.step(x, xi, eta);
    }
    if (inv) {
      auto c = g.cell_of(x);
      if (!c || !A.contains(*c)) inv = false;
    }
    ok[p] = inv ? 1 : 0;
  });
  std::size_t hits = 0;
  for (auto h : ok) hits += h;
  return detail::finish_estimate(seed, N, hits, tail_widen, 0.0);
}

}  // namespace pimc

#endif  // PIMC_MONTECARLO_HH_
