/*
 * discretize.hh
 *
 * Grid abstraction of a density kernel: a finite chain over cell centers
 * plus one absorbing sink for the mass escaping the grid, together with
 * the per-step abstraction error constant lambda used by the error
 * ledger.
 */

#ifndef PIMC_DISCRETIZE_HH_
#define PIMC_DISCRETIZE_HH_

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "pimc/detail/parallel.hh"
#include "pimc/engine.hh"
#include "pimc/kernel.hh"
#include "pimc/space.hh"

namespace pimc {

enum class LambdaProvenance { UserSupplied, LipschitzDerived };

struct DiscretizeOptions {
  std::optional<double> lambda;     // per-step sup-norm error, if known
  std::optional<double> lipschitz;  // else lambda = lipschitz * max cell diameter
  int threads = 1;
};

/* finite-chain surrogate: chain state i < cells() is grid cell i, the
 * last state is the absorbing off-grid sink */
class Abstraction {
 public:
  Abstraction(StateSpace grid, MatrixKernel chain, double lambda,
              LambdaProvenance prov)
      : grid_(std::move(grid)), chain_(std::move(chain)), lambda_(lambda), prov_(prov) {}

  const StateSpace& grid() const { return grid_; }
  const MatrixKernel& chain() const { return chain_; }
  std::size_t cells() const { return grid_.size(); }
  std::size_t sink() const { return grid_.size(); }
  double lambda() const { return lambda_; }
  LambdaProvenance provenance() const { return prov_; }

  /* grid Region -> chain Region; the sink joins only when the set is meant
   * to contain the off-grid part of the state space */
  Region lift(const Region& cells_region, bool include_sink = false) const {
    if (cells_region.space() != grid_)
      throw std::invalid_argument("Abstraction::lift: region not over this grid");
    std::vector<std::uint8_t> m(chain_.size(), 0);
    for (std::size_t i = 0; i < cells(); ++i) m[i] = cells_region.contains(i) ? 1 : 0;
    m[sink()] = include_sink ? 1 : 0;
    return Region(chain_.space(), std::move(m));
  }

  /* chain ValueFn -> grid ValueFn (drops the sink entry) */
  ValueFn restrict_to_grid(const ValueFn& chain_fn) const {
    std::vector<double> v(cells());
    for (std::size_t i = 0; i < cells(); ++i) v[i] = chain_fn[i];
    return ValueFn(grid_, std::move(v));
  }

  /* debugging dump of the abstract transition matrix */
  std::string matrix_csv() const {
    std::string out = "row,col,p\n";
    char buf[96];
    for (std::size_t i = 0; i < chain_.size(); ++i) {
      chain_.for_row(i, [&](std::size_t j, double p) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", i, j, p);
        out += buf;
      });
    }
    return out;
  }

 private:
  StateSpace grid_;
  MatrixKernel chain_;
  double lambda_;
  LambdaProvenance prov_;
};

/* p_ij = exact transition probability from the center of cell i into cell
 * j (CDF differences; products of them in 2d); escaping mass goes to the
 * sink. A center that coincides with an absorbing point keeps its point
 * mass. */
inline Abstraction discretize(const DensityKernel& k, const StateSpace& grid,
                              const DiscretizeOptions& opts = {}) {
  if (!grid.is_grid() || grid.dim() != k.dim())
    throw std::invalid_argument("discretize: grid/kernel dimension mismatch");
  double lambda;
  LambdaProvenance prov;
  if (opts.lambda) {
    lambda = *opts.lambda;
    prov = LambdaProvenance::UserSupplied;
  } else if (opts.lipschitz) {
    lambda = *opts.lipschitz * grid.cell_diameter();
    prov = LambdaProvenance::LipschitzDerived;
  } else {
    throw std::invalid_argument(
        "discretize: need a user lambda or a Lipschitz constant for the error ledger");
  }
  if (lambda < 0.0) throw std::invalid_argument("discretize: lambda must be >= 0");

  const std::size_t nc = grid.size();
  const std::size_t n = nc + 1;
  std::vector<double> rows(n * n, 0.0);

  const std::size_t n0 = grid.resolution(0);
  const std::size_t n1 = grid.dim() == 2 ? grid.resolution(1) : 1;

  detail::parallel_for(nc, opts.threads, [&](std::size_t i) {
    double* row = rows.data() + i * n;
    const Point c = grid.cell_center(i);
    if (k.is_absorbing(c)) {
      row[i] = 1.0;
      return;
    }
    Point m;
    double s;
    k.moments(c, m, s);
    std::vector<double> p0(n0), p1(n1, 1.0);
    double prev = normal_cdf((grid.bounds(0).lo - m[0]) / s);
    for (std::size_t j = 0; j < n0; ++j) {
      double edge = grid.bounds(0).lo + grid.cell_width(0) * static_cast<double>(j + 1);
      double cd = normal_cdf((edge - m[0]) / s);
      p0[j] = std::max(0.0, cd - prev);
      prev = cd;
    }
    if (grid.dim() == 2) {
      prev = normal_cdf((grid.bounds(1).lo - m[1]) / s);
      for (std::size_t j = 0; j < n1; ++j) {
        double edge = grid.bounds(1).lo + grid.cell_width(1) * static_cast<double>(j + 1);
        double cd = normal_cdf((edge - m[1]) / s);
        p1[j] = std::max(0.0, cd - prev);
        prev = cd;
      }
    }
    double total = 0.0;
    if (grid.dim() == 1) {
      for (std::size_t j = 0; j < n0; ++j) {
        row[j] = p0[j];
        total += p0[j];
      }
    } else {
      for (std::size_t j0 = 0; j0 < n0; ++j0)
        for (std::size_t j1 = 0; j1 < n1; ++j1) {
          double p = p0[j0] * p1[j1];
          row[grid.index_of(j0, j1)] = p;
          total += p;
        }
    }
    row[nc] = std::max(0.0, 1.0 - total);  // sink absorbs escaping mass
  });
  rows[nc * n + nc] = 1.0;  // sink is absorbing

  return Abstraction(grid, MatrixKernel(n, std::move(rows)), lambda, prov);
}

/* additive error ledger; every entry is capped at 1 because the value
 * functions live in [0,1] */
struct ErrorLedger {
  double discretization = 0.0;  // min(1, lambda * n)
  double tail = 0.0;
  double excision = 0.0;
  double total = 0.0;
};

inline ErrorLedger total_error(double lambda, std::size_t horizon, double tail,
                               double excision) {
  if (lambda < 0.0 || tail < 0.0 || excision < 0.0)
    throw std::invalid_argument("total_error: components must be non-negative");
  ErrorLedger l;
  l.discretization = std::min(1.0, lambda * static_cast<double>(horizon));
  l.tail = tail;
  l.excision = excision;
  l.total = std::min(1.0, l.discretization + l.tail + l.excision);
  return l;
}

inline ErrorLedger total_error(const Abstraction& a, std::size_t horizon, double tail,
                               double excision) {
  return total_error(a.lambda(), horizon, tail, excision);
}

}  // namespace pimc

#endif  // PIMC_DISCRETIZE_HH_
