/*
 * checker.hh
 *
 * Bottom-up verification of nested PCTL formulae through sub- and
 * super-satisfaction sets. Value functions come from a backend: exact
 * solves on finite chains, certified sandwiches on grid abstractions
 * (with the absorbing-set analysis and the excision route for
 * non-simple sets).
 *
 * Soundness contract: for every subformula, sub <= satisfaction set <=
 * super, relative to the backend's model semantics (the finite chain, or
 * the grid abstraction with its error ledger).
 */

#ifndef PIMC_CHECKER_HH_
#define PIMC_CHECKER_HH_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pimc/absorbing.hh"
#include "pimc/decompose.hh"
#include "pimc/discretize.hh"
#include "pimc/engine.hh"
#include "pimc/formula.hh"
#include "pimc/horizon.hh"
#include "pimc/kernel.hh"
#include "pimc/mclinear.hh"
#include "pimc/space.hh"

namespace pimc {

/* inner and outer approximations of a satisfaction set */
struct ThreeValuedSet {
  Region sub;
  Region super;
};

/* a state set as the checker tracks it: a union of cells plus a flag for
 * the off-grid remainder (complements of grid sets include it) */
struct CheckedSet {
  Region cells;
  bool offgrid = false;
};

enum class EvalStatus { Exact, Certified, Inconclusive };

/* pointwise bounds lower <= w <= upper produced by a backend, plus
 * certification bookkeeping for the report */
struct PathValue {
  ValueFn lower;
  ValueFn upper;
  EvalStatus status = EvalStatus::Exact;
  std::string note;
  std::optional<Certificate> cert;
  std::optional<ErrorLedger> ledger;
  std::optional<AbsorbingReport> absorbing;
};

class ValueBackend {
 public:
  virtual ~ValueBackend() = default;
  virtual const StateSpace& space() const = 0;
  virtual PathValue eval_next(const CheckedSet& S) = 0;
  virtual PathValue eval_bounded_until(const CheckedSet& A, const CheckedSet& B,
                                       std::size_t n) = 0;
  virtual PathValue eval_until(const CheckedSet& A, const CheckedSet& B) = 0;
};

/* ---- exact finite-chain backend (delta = 0) ---- */

class ExactFiniteBackend final : public ValueBackend {
 public:
  explicit ExactFiniteBackend(const MatrixKernel& P, const ExecPolicy& ex = {})
      : P_(P), space_(P.space()), ex_(ex) {}

  const StateSpace& space() const override { return space_; }

  PathValue eval_next(const CheckedSet& S) override {
    std::vector<double> w(P_.size());
    for (std::size_t i = 0; i < P_.size(); ++i) w[i] = P_.prob(i, S.cells);
    ValueFn v(space_, std::move(w));
    return {v, v, EvalStatus::Exact, "next: exact row sums", {}, {}, {}};
  }

  PathValue eval_bounded_until(const CheckedSet& A, const CheckedSet& B,
                               std::size_t n) override {
    ValueFn w = bounded_reach_avoid(P_, A.cells, B.cells, n, ex_);
    return {w, w, EvalStatus::Exact, "bounded until: exact recursion", {}, {}, {}};
  }

  PathValue eval_until(const CheckedSet& A, const CheckedSet& B) override {
    ValueFn w = solve_reach_avoid_exact(P_, A.cells, B.cells);
    return {w, w, EvalStatus::Exact, "until: exact linear solve after l.a.s. excision",
            {}, {}, {}};
  }

 private:
  const MatrixKernel& P_;
  StateSpace space_;
  ExecPolicy ex_;
};

/* ---- certified grid backend ---- */

struct GridCheckOptions {
  double epsilon = 0.01;       // horizon tail target and excision level
  std::size_t m_max = 0;       // 0: |cells|+1
  double an_delta = 1e-3;      // supersatisfaction iteration precision
  std::size_t an_n_max = 0;    // 0: number of cells
  int threads = 1;
  EngineDiagnostics* diag = nullptr;
};

class CertifiedGridBackend final : public ValueBackend {
 public:
  CertifiedGridBackend(const DensityKernel& k, Abstraction abs,
                       GridCheckOptions opts = {})
      : kernel_(k), abs_(std::move(abs)), grid_(abs_.grid()), opts_(opts) {
    ex_.threads = opts_.threads;
    ex_.diag = opts_.diag;
  }

  const StateSpace& space() const override { return grid_; }
  const Abstraction& abstraction() const { return abs_; }

  PathValue eval_next(const CheckedSet& S) override {
    // abstraction rows are exact kernel evaluations at the cell centers;
    // the sink row carries the off-grid mass
    Region lifted = abs_.lift(S.cells, S.offgrid);
    std::vector<double> w(abs_.cells());
    for (std::size_t i = 0; i < abs_.cells(); ++i) w[i] = abs_.chain().prob(i, lifted);
    ValueFn v(grid_, std::move(w));
    PathValue out{v, v, EvalStatus::Exact, "next: exact kernel at cell centers",
                  {}, {}, {}};
    out.ledger = total_error(abs_.lambda(), 1, 0.0, 0.0);
    return out;
  }

  PathValue eval_bounded_until(const CheckedSet& A, const CheckedSet& B,
                               std::size_t n) override {
    // the constraint set never includes the sink (analysis regions exclude
    // it); the target does when the set extends off the grid
    ValueFn w = bounded_reach_avoid(abs_.chain(), abs_.lift(A.cells, false),
                                    abs_.lift(B.cells, B.offgrid), n, ex_);
    ValueFn v = abs_.restrict_to_grid(w);
    PathValue out{v, v, EvalStatus::Exact, "bounded until: recursion on the abstraction",
                  {}, {}, {}};
    out.ledger = total_error(abs_.lambda(), n, 0.0, 0.0);
    return out;
  }

  /* Unbounded until. On a simple constraint set: plain certified
   * sandwich. A non-simple set routes through the excision of a
   * neighborhood C of the l.a.s. candidate:
   *   w(.;A\C,B)  <=  w(.;A,B)  <=  w(.;A\C, B u C)
   * (a path realizing A U B either avoids C or hits C while still inside
   * A). With a verified locally excessive candidate the upper bound
   * tightens to w(.;A\C,B) + tail + sup_C g/delta.
   *
   * Semantics of the bounds: the chain runs certify the abstraction's
   * value functions; the excessivity cost certifies against the
   * underlying density kernel, where g was verified. Near a degenerate
   * absorbing point the two can differ at infinite horizon no matter how
   * fine the grid (the chain drains mass the true process keeps), which
   * is exactly why the excision route exists; the discretization entry
   * of the ledger accounts for the per-step kernel gap. */
  PathValue eval_until(const CheckedSet& A, const CheckedSet& B) override {
    Region constraint = difference(A.cells, B.cells);
    Region liftA = abs_.lift(A.cells, false);
    Region liftB = abs_.lift(B.cells, B.offgrid);

    AbsorbingReport rep = simplicity_by_support(kernel_, constraint);
    if (rep.verdict == SimplicityVerdict::Simple) {
      try {
        CertifiedValue v =
            unbounded_reach_avoid(abs_.chain(), liftA, liftB, opts_.epsilon, m_max(), ex_);
        PathValue out{abs_.restrict_to_grid(v.lower), abs_.restrict_to_grid(v.upper),
                      EvalStatus::Certified,
                      "until: contraction certificate on a simple set",
                      v.cert, {}, rep};
        out.ledger = total_error(abs_.lambda(), v.cert.horizon, v.cert.tail, 0.0);
        return out;
      } catch (const NonContractiveError&) {
        // grid-level artifact (near-absorbing cells); retry below with the
        // approximate l.a.s. candidate
        rep = an_sequence_approx(kernel_, constraint, opts_.an_delta, an_n_max());
        if (rep.verdict == SimplicityVerdict::Simple)
          return inconclusive(
              "until: simple set, but no contraction certificate on the abstraction");
      }
    }

    // non-simple (or unresolved): excise a neighborhood of the candidate
    Region C = rep.las;
    std::optional<double> excision_cost;
    std::string route = "until: bare excision of the l.a.s. candidate (uncertified cost)";
    if (auto cand = excessive_candidate(constraint)) {
      ExcessivityReport er = verify_local_excessivity(grid_, *cand, constraint, rep.las);
      if (er.verified()) {
        double r_thr = radius_of_sublevel(*cand, opts_.epsilon * cand->delta);
        Region Clyap = outer_ball_region(grid_, r_thr);
        C = unite(Clyap, rep.las);
        // pointwise bound w <= g/delta prices any excised cell
        double worst = 0.0;
        for (std::size_t i = 0; i < grid_.size(); ++i)
          if (C.contains(i)) worst = std::max(worst, cell_sup_g(*cand, i) / cand->delta);
        excision_cost = std::min(1.0, worst);
        route = "until: excision of {g < eps*delta} with a verified excessive candidate";
      }
    }
    if (C.is_empty() || !subset(C, constraint))
      return inconclusive("until: no usable excision candidate inside the constraint set");

    Region liftC = abs_.lift(C, false);
    Region liftAmC = difference(liftA, liftC);
    try {
      CertifiedValue lo = unbounded_reach_avoid(abs_.chain(), liftAmC, liftB,
                                                opts_.epsilon, m_max(), ex_);
      CertifiedValue hi = unbounded_reach_avoid(abs_.chain(), liftAmC,
                                                unite(liftB, liftC), opts_.epsilon,
                                                m_max(), ex_);
      std::vector<double> up(abs_.cells());
      for (std::size_t i = 0; i < abs_.cells(); ++i) {
        double retarget = hi.upper[i];
        double lyap = excision_cost ? std::min(1.0, lo.upper[i] + *excision_cost) : 1.0;
        up[i] = std::min(retarget, lyap);
      }
      PathValue out{abs_.restrict_to_grid(lo.lower), ValueFn(grid_, std::move(up)),
                    EvalStatus::Certified, route, lo.cert, {}, rep};
      out.ledger = total_error(abs_.lambda(), std::max(lo.cert.horizon, hi.cert.horizon),
                               std::max(lo.cert.tail, hi.cert.tail),
                               excision_cost.value_or(1.0));
      if (rep.verdict == SimplicityVerdict::Inconclusive)
        out.note += " [conditionally certified: candidate is only a superset]";
      return out;
    } catch (const NonContractiveError&) {
      return inconclusive("until: constraint set minus excision still not contracting");
    }
  }

 private:
  std::size_t m_max() const { return opts_.m_max ? opts_.m_max : abs_.cells() + 1; }
  std::size_t an_n_max() const { return opts_.an_n_max ? opts_.an_n_max : abs_.cells(); }

  PathValue inconclusive(std::string why) {
    return {ValueFn::constant(grid_, 0.0), ValueFn::constant(grid_, 1.0),
            EvalStatus::Inconclusive, std::move(why), {}, {}, {}};
  }

  /* Built-in locally excessive candidates per kernel family. The level
   * delta shrinks to the ball that fits inside the constraint set, which
   * keeps {g < delta} inside A; excessivity restricts to any smaller
   * level. */
  std::optional<ExcessiveCandidate> excessive_candidate(const Region& constraint) {
    double r = inradius(constraint);
    if (r <= 0.0) return std::nullopt;
    if (kernel_.family() == DensityKernel::Family::Nonlinear2D)
      return nonlinear2d_candidate(grid_, std::min(0.25, r * r));
    // 1d affine-Gaussian: g_q = |x|^q works iff the drift is negative
    try {
      double q = find_excessive_exponent(kernel_.mu(), kernel_.sigma());
      return affine_gauss_candidate(kernel_, grid_, q, std::pow(r, q));
    } catch (const NoExcessiveCandidate&) {
      return std::nullopt;
    }
  }

  /* both built-in candidates are radial, so {g < level} is the open ball
   * of this radius */
  double radius_of_sublevel(const ExcessiveCandidate& cand, double level) const {
    if (kernel_.family() == DensityKernel::Family::Nonlinear2D)
      return std::sqrt(level);  // g = ||x||^2
    // g = |x|^q with q recovered from the probe g(2) = 2^q
    double q = std::log(cand.g(Point{2.0, 0.0})) / std::log(2.0);
    return std::pow(level, 1.0 / q);
  }

  /* both built-in candidates are radial and monotone in the norm, so the
   * supremum over a cell is g at the farthest corner */
  double cell_sup_g(const ExcessiveCandidate& cand, std::size_t i) const {
    Point c = grid_.cell_center(i);
    Point far{0.0, 0.0};
    for (std::size_t a = 0; a < grid_.dim(); ++a) {
      double half = 0.5 * grid_.cell_width(a);
      far[a] = std::max(std::abs(c[a] - half), std::abs(c[a] + half));
    }
    return cand.g(far);
  }

  /* largest r such that the open ball of radius r around the origin stays
   * inside the cell-union of R (and inside the grid box) */
  double inradius(const Region& R) const {
    auto c0 = grid_.cell_of(Point{0.0, 0.0});
    if (!c0 || !R.contains(*c0)) return 0.0;
    double r = 1e300;
    for (std::size_t a = 0; a < grid_.dim(); ++a)
      r = std::min(r, std::min(-grid_.bounds(a).lo, grid_.bounds(a).hi));
    if (r <= 0.0) return 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (R.contains(i)) continue;
      double nsq = 0.0;
      Point c = grid_.cell_center(i);
      for (std::size_t a = 0; a < grid_.dim(); ++a) {
        double half = 0.5 * grid_.cell_width(a);
        double lo = c[a] - half, hi = c[a] + half;
        double closest = (lo <= 0.0 && 0.0 <= hi) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
        nsq += closest * closest;
      }
      r = std::min(r, std::sqrt(nsq));
    }
    return r;
  }

  const DensityKernel& kernel_;
  Abstraction abs_;
  StateSpace grid_;
  GridCheckOptions opts_;
  ExecPolicy ex_;
};

/* ---- threshold rule ----
 * delta > 0: boundary states fall outside sub and inside super, so the
 * implications hold with the sup-norm error delta.
 * delta = 0 with an exact backend: plain comparator semantics. */
inline ThreeValuedSet threshold_sets(const ValueFn& w_sub_route,
                                     const ValueFn& w_super_route, Cmp cmp, double p,
                                     double delta, bool exact) {
  const StateSpace& s = w_sub_route.space();
  std::vector<std::uint8_t> sub(s.size(), 0), super(s.size(), 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    double ws = w_sub_route[i], wS = w_super_route[i];
    bool in_sub, in_super;
    if (exact && delta == 0.0) {
      in_sub = compare(ws, cmp, p);
      in_super = compare(wS, cmp, p);
    } else {
      switch (cmp) {
        case Cmp::GE:
          in_sub = ws > p + delta;
          in_super = wS >= p - delta;
          break;
        case Cmp::GT:
          in_sub = ws > p + delta;
          in_super = wS > p - delta;
          break;
        case Cmp::LE:
          in_sub = ws < p - delta;
          in_super = wS <= p + delta;
          break;
        default:  // LT
          in_sub = ws < p - delta;
          in_super = wS < p + delta;
          break;
      }
    }
    sub[i] = in_sub ? 1 : 0;
    super[i] = in_super ? 1 : 0;
  }
  return {Region(s, std::move(sub)), Region(s, std::move(super))};
}

/* ---- verification driver ---- */

struct NodeReport {
  std::string text;
  ThreeValuedSet sets;
  EvalStatus status = EvalStatus::Exact;
  std::string note;
  std::optional<Certificate> cert;
  std::optional<ErrorLedger> ledger;
  std::optional<AbsorbingReport> absorbing;
};

struct VerifyResult {
  std::vector<NodeReport> nodes;  // post-order; root last
  const NodeReport& root() const { return nodes.back(); }
  bool inconclusive() const {
    for (const auto& n : nodes)
      if (n.status == EvalStatus::Inconclusive) return true;
    return false;
  }
};

class UnboundAtomError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct CheckerCtx {
  const std::map<std::string, Region>& atoms;
  ValueBackend& backend;
  double delta;
  VerifyResult* out;
};

struct SetPair {
  CheckedSet sub;
  CheckedSet super;
};

inline PathValue eval_path(const PathFormula& p, const CheckedSet& l, const CheckedSet& r,
                           CheckerCtx& ctx) {
  switch (p.kind) {
    case PathFormula::Kind::Next:
      return ctx.backend.eval_next(l);
    case PathFormula::Kind::BoundedUntil:
      return ctx.backend.eval_bounded_until(l, r, p.bound);
    case PathFormula::Kind::Until:
      return ctx.backend.eval_until(l, r);
    default:
      throw std::invalid_argument(
          "verify: invariance sugar must be desugared before checking");
  }
}

inline SetPair verify_rec(const FormulaPtr& f, CheckerCtx& ctx) {
  const StateSpace& sp = ctx.backend.space();
  NodeReport rep{print(f), {Region::empty(sp), Region::full(sp)}, EvalStatus::Exact,
                 "", {}, {}, {}};
  SetPair result{{Region::empty(sp), false}, {Region::empty(sp), false}};

  switch (f->kind) {
    case Formula::Kind::Atom: {
      if (f->name == "true") {
        CheckedSet full{Region::full(sp), true};
        result = {full, full};
      } else {
        auto it = ctx.atoms.find(f->name);
        if (it == ctx.atoms.end())
          throw UnboundAtomError("verify: unbound atom '" + f->name + "'");
        if (it->second.space() != sp)
          throw std::invalid_argument("verify: atom region over a different space");
        CheckedSet s{it->second, false};
        result = {s, s};
      }
      rep.note = "atom";
      break;
    }
    case Formula::Kind::Not: {
      SetPair c = verify_rec(f->left, ctx);
      result.sub = {c.super.cells.complement(), !c.super.offgrid};
      result.super = {c.sub.cells.complement(), !c.sub.offgrid};
      rep.note = "negation: complement and swap";
      break;
    }
    case Formula::Kind::And: {
      SetPair a = verify_rec(f->left, ctx);
      SetPair b = verify_rec(f->right, ctx);
      result.sub = {intersect(a.sub.cells, b.sub.cells), a.sub.offgrid && b.sub.offgrid};
      result.super = {intersect(a.super.cells, b.super.cells),
                      a.super.offgrid && b.super.offgrid};
      rep.note = "conjunction: componentwise intersection";
      break;
    }
    case Formula::Kind::Prob: {
      const PathFormula& p = *f->path;
      SetPair l = p.left ? verify_rec(p.left, ctx)
                         : SetPair{{Region::empty(sp), false}, {Region::empty(sp), false}};
      SetPair r = p.right ? verify_rec(p.right, ctx)
                          : SetPair{{Region::empty(sp), false}, {Region::empty(sp), false}};
      // value functions are monotone in the child sets; >=/> comparisons
      // take the sub route from sub children, <=/< the other way round
      const bool increasing = (f->cmp == Cmp::GE || f->cmp == Cmp::GT);
      const CheckedSet& l_lo = increasing ? l.sub : l.super;
      const CheckedSet& r_lo = increasing ? r.sub : r.super;
      const CheckedSet& l_hi = increasing ? l.super : l.sub;
      const CheckedSet& r_hi = increasing ? r.super : r.sub;

      PathValue v_lo = eval_path(p, l_lo, r_lo, ctx);
      const bool same_children = l_lo.cells == l_hi.cells &&
                                 l_lo.offgrid == l_hi.offgrid &&
                                 r_lo.cells == r_hi.cells && r_lo.offgrid == r_hi.offgrid;
      PathValue v_hi = same_children ? v_lo : eval_path(p, l_hi, r_hi, ctx);

      rep.status = v_lo.status;
      if (v_hi.status == EvalStatus::Inconclusive) rep.status = EvalStatus::Inconclusive;
      else if (v_lo.status == EvalStatus::Certified ||
               v_hi.status == EvalStatus::Certified)
        if (rep.status != EvalStatus::Inconclusive) rep.status = EvalStatus::Certified;
      rep.note = v_lo.note;
      rep.cert = v_lo.cert;
      rep.ledger = v_lo.ledger;
      rep.absorbing = v_lo.absorbing;

      if (rep.status == EvalStatus::Inconclusive) {
        result.sub = {Region::empty(sp), false};
        result.super = {Region::full(sp), true};
        break;
      }

      // sup-norm accuracy achieved by the backend across both routes
      double achieved = 0.0;
      for (std::size_t i = 0; i < sp.size(); ++i) {
        achieved = std::max(achieved, 0.5 * (v_lo.upper[i] - v_lo.lower[i]));
        achieved = std::max(achieved, 0.5 * (v_hi.upper[i] - v_hi.lower[i]));
      }
      const bool exact = achieved == 0.0;
      if (!exact && achieved > ctx.delta + 1e-15) {
        rep.status = EvalStatus::Inconclusive;
        rep.note += " [requested delta " + std::to_string(ctx.delta) +
                    " unavailable: achieved " + std::to_string(achieved) + "]";
        result.sub = {Region::empty(sp), false};
        result.super = {Region::full(sp), true};
        break;
      }

      // midpoints of the certified intervals act as the delta-accurate
      // value functions of the construction
      std::vector<double> mid_lo(sp.size()), mid_hi(sp.size());
      for (std::size_t i = 0; i < sp.size(); ++i) {
        mid_lo[i] = 0.5 * (v_lo.lower[i] + v_lo.upper[i]);
        mid_hi[i] = 0.5 * (v_hi.lower[i] + v_hi.upper[i]);
      }
      ThreeValuedSet t =
          threshold_sets(ValueFn(sp, std::move(mid_lo)), ValueFn(sp, std::move(mid_hi)),
                         f->cmp, f->p, ctx.delta, exact);
      // off-grid states carry an unknown value in [0,1]: they join sub only
      // when every value satisfies the comparison, and leave super only
      // when none does
      bool off_sub = (f->cmp == Cmp::GE && f->p == 0.0) || (f->cmp == Cmp::LE && f->p == 1.0);
      bool off_super = !((f->cmp == Cmp::GT && f->p == 1.0) ||
                         (f->cmp == Cmp::LT && f->p == 0.0));
      result.sub = {t.sub, off_sub};
      result.super = {t.super, off_super};
      break;
    }
  }

  rep.sets = {result.sub.cells, result.super.cells};
  if (!subset(rep.sets.sub, rep.sets.super))
    throw std::logic_error("verify: sub set escaped the super set");
  ctx.out->nodes.push_back(rep);
  return result;
}

}  // namespace detail

/* Bottom-up evaluation; delta is the uniform per-level precision. Atoms
 * are exact; Prob nodes compare against p +- delta (plain comparator
 * semantics when the backend is exact and delta = 0). Invariance sugar
 * is desugared first. */
inline VerifyResult verify(const FormulaPtr& formula,
                           const std::map<std::string, Region>& atom_bindings,
                           ValueBackend& backend, double delta) {
  if (delta < 0.0 || delta >= 1.0)
    throw std::invalid_argument("verify: delta must be in [0,1)");
  VerifyResult out;
  detail::CheckerCtx ctx{atom_bindings, backend, delta, &out};
  FormulaPtr f = desugar_invariance(formula);
  detail::verify_rec(f, ctx);
  return out;
}

}  // namespace pimc

#endif  // PIMC_CHECKER_HH_
