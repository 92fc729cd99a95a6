/*
 * model.hh
 *
 * Model files: UTF-8 JSON describing the state space (finite or grid),
 * the kernel (explicit stochastic matrix or a built-in density family),
 * and the labelled Regions the formulae refer to.
 *
 * {
 *   "space":  {"kind":"finite","count":3}
 *           | {"kind":"grid","bounds":[[-1,1]],"resolution":[512]}
 *           | {"kind":"grid","bounds":[[-0.6,0.6],[-0.6,0.6]],"resolution":[60,60]},
 *   "kernel": {"kind":"matrix","rows":[[...],...]}
 *           | {"kind":"affine_gauss_1d","mu":0.0,"sigma":1.0}
 *           | {"kind":"nonlinear_2d"},
 *   "labels": {"safe":{"states":[0,1]}, "goal":{"boxes":[[[lo,hi],[lo,hi]]]}},
 *   "lambda": 0.002,        // optional per-step abstraction error
 *   "lipschitz": 9.7        // optional; lambda = lipschitz * cell diameter
 * }
 */

#ifndef PIMC_MODEL_HH_
#define PIMC_MODEL_HH_

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "pimc/kernel.hh"
#include "pimc/space.hh"

namespace pimc {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Model {
  StateSpace space;
  std::variant<MatrixKernel, DensityKernel> kernel;
  std::map<std::string, Region> labels;
  std::optional<double> lambda;
  std::optional<double> lipschitz;

  bool is_finite() const { return std::holds_alternative<MatrixKernel>(kernel); }
  const MatrixKernel& matrix() const { return std::get<MatrixKernel>(kernel); }
  const DensityKernel& density() const { return std::get<DensityKernel>(kernel); }
};

namespace detail {

inline StateSpace space_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "finite") return StateSpace::finite(j.at("count").get<std::size_t>());
  if (kind == "grid") {
    const auto& bounds = j.at("bounds");
    const auto& res = j.at("resolution");
    if (!bounds.is_array() || bounds.empty() || bounds.size() > 2 ||
        res.size() != bounds.size())
      throw ModelError("model: grid bounds/resolution must have 1 or 2 axes");
    std::array<Interval, 2> b{Interval{0, 1}, Interval{0, 1}};
    std::array<std::size_t, 2> r{1, 1};
    for (std::size_t a = 0; a < bounds.size(); ++a) {
      b[a] = {bounds[a].at(0).get<double>(), bounds[a].at(1).get<double>()};
      r[a] = res[a].get<std::size_t>();
    }
    return StateSpace::grid(bounds.size(), b, r);
  }
  throw ModelError("model: unknown space kind '" + kind + "'");
}

inline Region label_from_json(const StateSpace& space, const std::string& name,
                              const nlohmann::json& j) {
  if (j.contains("states")) {
    if (!space.is_finite())
      throw ModelError("model: label '" + name + "' uses states on a grid space");
    std::vector<std::size_t> s = j.at("states").get<std::vector<std::size_t>>();
    for (auto i : s)
      if (i >= space.size())
        throw ModelError("model: label '" + name + "' references state out of range");
    return Region::of_states(space, s);
  }
  if (j.contains("boxes")) {
    if (!space.is_grid())
      throw ModelError("model: label '" + name + "' uses boxes on a finite space");
    Region r = Region::empty(space);
    for (const auto& bj : j.at("boxes")) {
      if (bj.size() != space.dim())
        throw ModelError("model: label '" + name + "' box dimension mismatch");
      std::array<Interval, 2> box{Interval{-1e300, 1e300}, Interval{-1e300, 1e300}};
      for (std::size_t a = 0; a < space.dim(); ++a)
        box[a] = {bj[a].at(0).get<double>(), bj[a].at(1).get<double>()};
      try {
        r = unite(r, region_from_box(space, box));
      } catch (const std::invalid_argument& e) {
        throw ModelError("model: label '" + name + "': " + e.what());
      }
    }
    return r;
  }
  throw ModelError("model: label '" + name + "' needs \"states\" or \"boxes\"");
}

}  // namespace detail

inline Model model_from_json(const nlohmann::json& j) {
  StateSpace space = detail::space_from_json(j.at("space"));
  const auto& kj = j.at("kernel");
  const std::string kind = kj.at("kind").get<std::string>();

  std::optional<std::variant<MatrixKernel, DensityKernel>> kernel;
  if (kind == "matrix") {
    if (!space.is_finite()) throw ModelError("model: matrix kernel needs a finite space");
    auto rows = kj.at("rows").get<std::vector<std::vector<double>>>();
    if (rows.size() != space.size())
      throw ModelError("model: matrix size does not match the state count");
    try {
      kernel = MatrixKernel(std::move(rows));
    } catch (const std::invalid_argument& e) {
      throw ModelError(std::string("model: ") + e.what());
    }
  } else if (kind == "affine_gauss_1d") {
    if (!space.is_grid() || space.dim() != 1)
      throw ModelError("model: affine_gauss_1d needs a 1d grid space");
    kernel = DensityKernel::affine_gauss_1d(kj.at("mu").get<double>(),
                                            kj.at("sigma").get<double>());
  } else if (kind == "nonlinear_2d") {
    if (!space.is_grid() || space.dim() != 2)
      throw ModelError("model: nonlinear_2d needs a 2d grid space");
    kernel = DensityKernel::nonlinear_2d();
  } else {
    throw ModelError("model: unknown kernel kind '" + kind + "'");
  }

  Model m{space, std::move(*kernel), {}, std::nullopt, std::nullopt};
  if (j.contains("labels")) {
    for (auto it = j.at("labels").begin(); it != j.at("labels").end(); ++it) {
      if (it.key() == "true")
        throw ModelError("model: 'true' is reserved for the whole space");
      m.labels.emplace(it.key(), detail::label_from_json(space, it.key(), it.value()));
    }
  }
  if (j.contains("lambda")) m.lambda = j.at("lambda").get<double>();
  if (j.contains("lipschitz")) m.lipschitz = j.at("lipschitz").get<double>();
  return m;
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("model: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("model: '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("model: '" + path + "': " + e.what());
  }
}

}  // namespace pimc

#endif  // PIMC_MODEL_HH_
