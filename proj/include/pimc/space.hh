/*
 * space.hh
 *
 * State spaces (finite index sets, uniform 1d/2d grids) and Regions,
 * the measurable-set representation shared by all modules.
 */

#ifndef PIMC_SPACE_HH_
#define PIMC_SPACE_HH_

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pimc {

using Point = std::array<double, 2>;

struct Interval {
  double lo;
  double hi;
};

/* Finite index set or a uniform grid over a box in R^1 or R^2.
 * Grid cells follow the closed-open convention [lo, hi) per axis,
 * so every point of the box belongs to exactly one cell. */
class StateSpace {
 public:
  enum class Kind { Finite, Grid };

  static StateSpace finite(std::size_t count) {
    if (count < 1) throw std::invalid_argument("StateSpace: count must be >= 1");
    StateSpace s;
    s.kind_ = Kind::Finite;
    s.count_ = count;
    return s;
  }

  static StateSpace grid(std::size_t dim, std::array<Interval, 2> bounds,
                         std::array<std::size_t, 2> resolution) {
    if (dim < 1 || dim > 2) throw std::invalid_argument("StateSpace: dim must be 1 or 2");
    StateSpace s;
    s.kind_ = Kind::Grid;
    s.dim_ = dim;
    s.bounds_ = bounds;
    s.res_ = resolution;
    s.count_ = 1;
    for (std::size_t a = 0; a < dim; ++a) {
      if (!(bounds[a].lo < bounds[a].hi))
        throw std::invalid_argument("StateSpace: degenerate bounds on axis " + std::to_string(a));
      if (resolution[a] < 1)
        throw std::invalid_argument("StateSpace: resolution must be >= 1");
      s.count_ *= resolution[a];
    }
    return s;
  }

  static StateSpace grid1d(Interval b, std::size_t cells) {
    return grid(1, {b, Interval{0.0, 1.0}}, {cells, 1});
  }

  static StateSpace grid2d(Interval bx, Interval by, std::size_t nx, std::size_t ny) {
    return grid(2, {bx, by}, {nx, ny});
  }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_grid() const { return kind_ == Kind::Grid; }
  std::size_t size() const { return count_; }
  std::size_t dim() const { return is_grid() ? dim_ : 1; }
  Interval bounds(std::size_t axis) const { return bounds_[axis]; }
  std::size_t resolution(std::size_t axis) const { return res_[axis]; }

  double cell_width(std::size_t axis) const {
    return (bounds_[axis].hi - bounds_[axis].lo) / static_cast<double>(res_[axis]);
  }

  /* max cell diameter */
  double cell_diameter() const {
    double w0 = cell_width(0);
    if (dim_ == 1) return w0;
    double w1 = cell_width(1);
    return std::sqrt(w0 * w0 + w1 * w1);
  }

  /* cell index <-> axis indices, x1-major */
  std::size_t index_of(std::size_t i0, std::size_t i1 = 0) const {
    return dim_ == 1 ? i0 : i0 * res_[1] + i1;
  }
  std::array<std::size_t, 2> axes_of(std::size_t idx) const {
    if (dim_ == 1) return {idx, 0};
    return {idx / res_[1], idx % res_[1]};
  }

  Point cell_center(std::size_t idx) const {
    auto ax = axes_of(idx);
    Point p{0.0, 0.0};
    for (std::size_t a = 0; a < dim_; ++a)
      p[a] = bounds_[a].lo + cell_width(a) * (static_cast<double>(ax[a]) + 0.5);
    return p;
  }

  /* cell containing a point, or nullopt if outside the grid box */
  std::optional<std::size_t> cell_of(const Point& p) const {
    std::array<std::size_t, 2> ax{0, 0};
    for (std::size_t a = 0; a < dim_; ++a) {
      if (p[a] < bounds_[a].lo || p[a] >= bounds_[a].hi) return std::nullopt;
      auto i = static_cast<std::size_t>((p[a] - bounds_[a].lo) / cell_width(a));
      if (i >= res_[a]) i = res_[a] - 1;  // guard rounding at the top edge
      ax[a] = i;
    }
    return index_of(ax[0], ax[1]);
  }

  bool operator==(const StateSpace& o) const {
    if (kind_ != o.kind_ || count_ != o.count_) return false;
    if (kind_ == Kind::Finite) return true;
    if (dim_ != o.dim_) return false;
    for (std::size_t a = 0; a < dim_; ++a)
      if (bounds_[a].lo != o.bounds_[a].lo || bounds_[a].hi != o.bounds_[a].hi ||
          res_[a] != o.res_[a])
        return false;
    return true;
  }
  bool operator!=(const StateSpace& o) const { return !(*this == o); }

 private:
  Kind kind_ = Kind::Finite;
  std::size_t count_ = 1;
  std::size_t dim_ = 1;
  std::array<Interval, 2> bounds_{Interval{0, 1}, Interval{0, 1}};
  std::array<std::size_t, 2> res_{1, 1};
};

/* A measurable set: membership mask over the state/cell index set.
 * Immutable after construction; the set algebra matches bitwise semantics. */
class Region {
 public:
  Region(StateSpace space, std::vector<std::uint8_t> mask)
      : space_(std::move(space)), mask_(std::move(mask)) {
    if (mask_.size() != space_.size())
      throw std::invalid_argument("Region: mask length does not match space size");
  }

  static Region empty(const StateSpace& s) {
    return Region(s, std::vector<std::uint8_t>(s.size(), 0));
  }
  static Region full(const StateSpace& s) {
    return Region(s, std::vector<std::uint8_t>(s.size(), 1));
  }
  static Region of_states(const StateSpace& s, const std::vector<std::size_t>& states) {
    std::vector<std::uint8_t> m(s.size(), 0);
    for (auto i : states) {
      if (i >= s.size()) throw std::invalid_argument("Region: state index out of range");
      m[i] = 1;
    }
    return Region(s, std::move(m));
  }

  const StateSpace& space() const { return space_; }
  std::size_t size() const { return mask_.size(); }
  bool contains(std::size_t i) const { return mask_[i] != 0; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto b : mask_) c += b;
    return c;
  }
  bool is_empty() const { return count() == 0; }

  std::vector<std::size_t> states() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i]) out.push_back(i);
    return out;
  }

  Region complement() const {
    std::vector<std::uint8_t> m(mask_.size());
    for (std::size_t i = 0; i < mask_.size(); ++i) m[i] = mask_[i] ? 0 : 1;
    return Region(space_, std::move(m));
  }

  bool operator==(const Region& o) const { return space_ == o.space_ && mask_ == o.mask_; }
  bool operator!=(const Region& o) const { return !(*this == o); }

 private:
  StateSpace space_;
  std::vector<std::uint8_t> mask_;
};

namespace detail {
inline void require_same_space(const Region& a, const Region& b) {
  if (a.space() != b.space()) throw std::invalid_argument("Region: space mismatch");
}
}  // namespace detail

inline Region unite(const Region& a, const Region& b) {
  detail::require_same_space(a, b);
  std::vector<std::uint8_t> m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = (a.contains(i) || b.contains(i)) ? 1 : 0;
  return Region(a.space(), std::move(m));
}

inline Region intersect(const Region& a, const Region& b) {
  detail::require_same_space(a, b);
  std::vector<std::uint8_t> m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = (a.contains(i) && b.contains(i)) ? 1 : 0;
  return Region(a.space(), std::move(m));
}

inline Region difference(const Region& a, const Region& b) {
  detail::require_same_space(a, b);
  std::vector<std::uint8_t> m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = (a.contains(i) && !b.contains(i)) ? 1 : 0;
  return Region(a.space(), std::move(m));
}

/* subset(a,b) <=> a∩b = a */
inline bool subset(const Region& a, const Region& b) {
  detail::require_same_space(a, b);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.contains(i) && !b.contains(i)) return false;
  return true;
}

/* cells whose center lies in the box, closed-open per axis */
inline Region region_from_box(const StateSpace& space, std::array<Interval, 2> box) {
  if (!space.is_grid()) throw std::invalid_argument("region_from_box: finite space given");
  for (std::size_t a = 0; a < space.dim(); ++a) {
    if (box[a].lo < space.bounds(a).lo - 1e-12 || box[a].hi > space.bounds(a).hi + 1e-12)
      throw std::invalid_argument("region_from_box: box outside grid bounds");
  }
  std::vector<std::uint8_t> m(space.size(), 0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    Point c = space.cell_center(i);
    bool in = true;
    for (std::size_t a = 0; a < space.dim(); ++a)
      in = in && (c[a] >= box[a].lo && c[a] < box[a].hi);
    m[i] = in ? 1 : 0;
  }
  return Region(space, std::move(m));
}

inline Region region_from_box(const StateSpace& space, Interval box) {
  return region_from_box(space, {box, Interval{-1e300, 1e300}});
}

}  // namespace pimc

#endif  // PIMC_SPACE_HH_
