/*
 * quadrature.hh
 *
 * Adaptive Gauss-Kronrod (7-15) integration with bisection refinement
 * to a fixed absolute tolerance. Deterministic: fixed node schedule,
 * no sampling.
 */

#ifndef PIMC_DETAIL_QUADRATURE_HH_
#define PIMC_DETAIL_QUADRATURE_HH_

#include <cmath>
#include <stdexcept>

namespace pimc {
namespace detail {

// QUADPACK 15-point Kronrod rule on [-1,1]; odd-index nodes form the
// embedded 7-point Gauss rule.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kGK15WeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGK7WeightsG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <typename F>
inline void gk15(const F& f, double a, double b, double& value, double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = kGK15WeightsK[7] * f(c);
  double resg = kGK7WeightsG[3] * f(c);
  for (int j = 0; j < 7; ++j) {
    const double x = h * kGK15Nodes[j];
    const double fsum = f(c - x) + f(c + x);
    resk += kGK15WeightsK[j] * fsum;
    if (j % 2 == 1) resg += kGK7WeightsG[j / 2] * fsum;
  }
  value = resk * h;
  error = std::abs((resk - resg) * h);
}

/* adaptive bisection until the GK error estimate is below tol */
template <typename F>
inline double integrate_adaptive(const F& f, double a, double b, double tol,
                                 int depth = 0) {
  double v, e;
  gk15(f, a, b, v, e);
  if (e <= tol || b - a < 1e-14 * (std::abs(a) + std::abs(b) + 1.0)) {
    if (depth >= 60 && e > tol)
      throw std::runtime_error("quadrature: failed to converge to tolerance");
    return v;
  }
  if (depth >= 60) throw std::runtime_error("quadrature: failed to converge to tolerance");
  const double m = 0.5 * (a + b);
  return integrate_adaptive(f, a, m, 0.5 * tol, depth + 1) +
         integrate_adaptive(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace detail
}  // namespace pimc

#endif  // PIMC_DETAIL_QUADRATURE_HH_
