/*
 * pimc.cc
 *
 * Batch front end: model and property files in, certified reports and
 * value-function dumps out.
 *
 * Exit codes: 0 success, 2 file/parse/flag errors, 3 inconclusive
 * subformula (partial report is still written), 4 internal assertion.
 */

#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pimc/pimc.hh"

namespace {

struct CommonOpts {
  std::string model_path;
  std::string out_path;
  double delta = 1e-3;
  double epsilon = 0.01;
  std::size_t max_m = 0;
  std::string grid_override;
  std::uint64_t seed = 0;
  int threads = 1;
  bool emit_masks = false;
};

void write_out(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw pimc::ModelError("cannot open output file '" + out_path + "'");
  out << text;
}

/* "--grid NxM" resolution override */
pimc::Model apply_grid_override(pimc::Model m, const std::string& text) {
  if (text.empty()) return m;
  if (!m.space.is_grid())
    throw pimc::ModelError("--grid override requires a grid-space model");
  std::size_t nx = 0, ny = 0;
  if (std::sscanf(text.c_str(), "%zux%zu", &nx, &ny) == 2 && m.space.dim() == 2) {
  } else if (std::sscanf(text.c_str(), "%zu", &nx) == 1 && m.space.dim() == 1) {
    ny = 1;
  } else {
    throw pimc::ModelError("--grid: expected N (1d) or NxM (2d)");
  }
  std::array<pimc::Interval, 2> b{m.space.bounds(0),
                                  m.space.dim() == 2 ? m.space.bounds(1)
                                                     : pimc::Interval{0, 1}};
  pimc::StateSpace ns = pimc::StateSpace::grid(m.space.dim(), b, {nx, ny});
  // relabel: boxes were resolved against the old grid; rebuild from states
  // is not possible, so labels must be re-derived. Keep it simple: the
  // override is only valid when the model labels are box-based, which the
  // loader guarantees for grid spaces; reload cannot happen here, so we
  // translate each label through its cell centers.
  std::map<std::string, pimc::Region> labels;
  for (const auto& [name, region] : m.labels) {
    std::vector<std::uint8_t> mask(ns.size(), 0);
    for (std::size_t i = 0; i < ns.size(); ++i) {
      auto c = m.space.cell_of(ns.cell_center(i));
      mask[i] = (c && region.contains(*c)) ? 1 : 0;
    }
    labels.emplace(name, pimc::Region(ns, std::move(mask)));
  }
  m.space = ns;
  m.labels = std::move(labels);
  return m;
}

pimc::DiscretizeOptions discretize_opts(const pimc::Model& m, int threads) {
  pimc::DiscretizeOptions d;
  d.lambda = m.lambda;
  d.lipschitz = m.lipschitz;
  d.threads = threads;
  return d;
}

/* resolve a boolean (Prob-free) state formula to an exact set */
pimc::CheckedSet resolve_boolean(const pimc::FormulaPtr& f, const pimc::Model& m) {
  using K = pimc::Formula::Kind;
  const pimc::StateSpace& sp = m.space;
  switch (f->kind) {
    case K::Atom: {
      if (f->name == "true") return {pimc::Region::full(sp), true};
      auto it = m.labels.find(f->name);
      if (it == m.labels.end())
        throw pimc::UnboundAtomError("unbound atom '" + f->name + "'");
      return {it->second, false};
    }
    case K::Not: {
      auto c = resolve_boolean(f->left, m);
      return {c.cells.complement(), !c.offgrid};
    }
    case K::And: {
      auto a = resolve_boolean(f->left, m);
      auto b = resolve_boolean(f->right, m);
      return {pimc::intersect(a.cells, b.cells), a.offgrid && b.offgrid};
    }
    default:
      throw pimc::ModelError(
          "value: path operands must be boolean formulae over labels");
  }
}

int cmd_check(const CommonOpts& o, const std::string& formula_text) {
  pimc::Model model = apply_grid_override(pimc::load_model(o.model_path), o.grid_override);
  pimc::FormulaPtr f = pimc::parse(formula_text);

  auto t0 = std::chrono::steady_clock::now();
  pimc::EngineDiagnostics diag;
  pimc::VerifyResult result;
  if (model.is_finite()) {
    pimc::ExecPolicy ex;
    ex.threads = o.threads;
    ex.diag = &diag;
    pimc::ExactFiniteBackend backend(model.matrix(), ex);
    result = pimc::verify(f, model.labels, backend, o.delta);
  } else {
    pimc::Abstraction abs =
        pimc::discretize(model.density(), model.space, discretize_opts(model, o.threads));
    pimc::GridCheckOptions g;
    g.epsilon = o.epsilon;
    g.m_max = o.max_m;
    g.threads = o.threads;
    g.diag = &diag;
    pimc::CertifiedGridBackend backend(model.density(), std::move(abs), g);
    result = pimc::verify(f, model.labels, backend, o.delta);
  }
  auto t1 = std::chrono::steady_clock::now();
  std::chrono::duration<double> dt = t1 - t0;
  std::fprintf(stderr, "check: %.3fs\n", dt.count());
  if (diag.clamp_events > 0)
    std::fprintf(stderr, "warning: %zu value clamps above 1e-9 (max %.3e)\n",
                 diag.clamp_events, diag.max_clamp);

  pimc::OrderedJson rep = pimc::report_json(formula_text, o.delta, result, o.emit_masks);
  write_out(o.out_path, rep.dump(2) + "\n");
  return result.inconclusive() ? 3 : 0;
}

int cmd_value(const CommonOpts& o, const std::string& path_text,
              std::optional<std::size_t> horizon, const std::string& dump_abstraction) {
  pimc::Model model = apply_grid_override(pimc::load_model(o.model_path), o.grid_override);
  if (!dump_abstraction.empty()) {
    if (model.is_finite())
      throw pimc::ModelError("value: --dump-abstraction needs a grid model");
    pimc::Abstraction abs =
        pimc::discretize(model.density(), model.space, discretize_opts(model, o.threads));
    std::ofstream out(dump_abstraction, std::ios::binary);
    if (!out) throw pimc::ModelError("cannot open '" + dump_abstraction + "'");
    out << abs.matrix_csv();
  }
  pimc::FormulaPtr wrapped = pimc::parse("P[>=0](" + path_text + ")");
  wrapped = pimc::desugar_invariance(wrapped);
  const pimc::PathFormula& p = *wrapped->path;

  pimc::CheckedSet l = p.left ? resolve_boolean(p.left, model)
                              : pimc::CheckedSet{pimc::Region::empty(model.space), false};
  pimc::CheckedSet r = p.right ? resolve_boolean(p.right, model)
                               : pimc::CheckedSet{pimc::Region::empty(model.space), false};

  std::unique_ptr<pimc::ValueBackend> backend;
  pimc::ExecPolicy ex;
  ex.threads = o.threads;
  if (model.is_finite()) {
    backend = std::make_unique<pimc::ExactFiniteBackend>(model.matrix(), ex);
  } else {
    pimc::Abstraction abs =
        pimc::discretize(model.density(), model.space, discretize_opts(model, o.threads));
    pimc::GridCheckOptions g;
    g.epsilon = o.epsilon;
    g.m_max = o.max_m;
    g.threads = o.threads;
    backend = std::make_unique<pimc::CertifiedGridBackend>(model.density(), std::move(abs), g);
  }

  pimc::PathValue v = [&] {
    switch (p.kind) {
      case pimc::PathFormula::Kind::Next:
        return backend->eval_next(l);
      case pimc::PathFormula::Kind::BoundedUntil:
        return backend->eval_bounded_until(l, r, horizon.value_or(p.bound));
      case pimc::PathFormula::Kind::Until:
        return backend->eval_until(l, r);
      default:
        throw pimc::ModelError("value: unexpected path kind");
    }
  }();
  if (v.status == pimc::EvalStatus::Inconclusive) {
    std::fprintf(stderr, "value: inconclusive: %s\n", v.note.c_str());
    return 3;
  }

  const pimc::StateSpace& sp = v.lower.space();
  std::string csv = sp.is_grid() ? (sp.dim() == 2 ? "index,x1,x2,lower,upper\n"
                                                  : "index,x1,lower,upper\n")
                                 : "index,lower,upper\n";
  char buf[160];
  for (std::size_t i = 0; i < sp.size(); ++i) {
    if (sp.is_grid()) {
      pimc::Point c = sp.cell_center(i);
      if (sp.dim() == 2)
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", i, c[0], c[1],
                      v.lower[i], v.upper[i]);
      else
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i, c[0], v.lower[i],
                      v.upper[i]);
    } else {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, v.lower[i], v.upper[i]);
    }
    csv += buf;
  }
  write_out(o.out_path, csv);
  return 0;
}

int cmd_las(const CommonOpts& o, const std::string& label, double an_delta,
            std::size_t n_max) {
  pimc::Model model = apply_grid_override(pimc::load_model(o.model_path), o.grid_override);
  auto it = model.labels.find(label);
  if (it == model.labels.end())
    throw pimc::UnboundAtomError("las: unknown label '" + label + "'");
  pimc::OrderedJson j;
  j["label"] = label;
  if (model.is_finite()) {
    j["exact"] = pimc::to_json(pimc::las_finite(model.matrix(), it->second));
  } else {
    j["support_criterion"] =
        pimc::to_json(pimc::simplicity_by_support(model.density(), it->second));
    std::size_t cap = n_max ? n_max : model.space.size();
    j["supersatisfaction_iteration"] =
        pimc::to_json(pimc::an_sequence_approx(model.density(), it->second, an_delta, cap));
  }
  write_out(o.out_path, j.dump(2) + "\n");
  return 0;
}

int cmd_plan(std::size_t m, double rho, double eps) {
  std::size_t n = pimc::plan_horizon(m, rho, eps);
  char buf[96];
  std::snprintf(buf, sizeof buf, "n=%zu\ntail=%.17g\n", n, pimc::tail_bound(m, rho, n));
  std::cout << buf;
  return 0;
}

int cmd_simulate(const CommonOpts& o, std::optional<std::size_t> state,
                 const std::string& x0_text, std::size_t steps, std::size_t paths) {
  pimc::Model model = apply_grid_override(pimc::load_model(o.model_path), o.grid_override);
  std::string csv;
  char buf[160];
  if (model.is_finite()) {
    if (!state) throw pimc::ModelError("simulate: finite models need --state");
    csv = "path,step,state\n";
    for (std::size_t p = 0; p < paths; ++p) {
      pimc::Path path = pimc::simulate(model.matrix(), *state, steps, o.seed, p);
      for (std::size_t t = 0; t < path.states.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%zu\n", p, t, path.states[t]);
        csv += buf;
      }
    }
  } else {
    pimc::Point x0{0.0, 0.0};
    const std::size_t d = model.space.dim();
    if (d == 2) {
      if (std::sscanf(x0_text.c_str(), "%lf,%lf", &x0[0], &x0[1]) != 2)
        throw pimc::ModelError("simulate: --x0 expects \"x1,x2\" for 2d models");
    } else {
      if (std::sscanf(x0_text.c_str(), "%lf", &x0[0]) != 1)
        throw pimc::ModelError("simulate: --x0 expects a number for 1d models");
    }
    csv = d == 2 ? "path,step,x1,x2\n" : "path,step,x1\n";
    for (std::size_t p = 0; p < paths; ++p) {
      pimc::Path path = pimc::simulate(model.density(), x0, steps, o.seed, p);
      for (std::size_t t = 0; t < path.points.size(); ++t) {
        if (d == 2)
          std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", p, t, path.points[t][0],
                        path.points[t][1]);
        else
          std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g\n", p, t, path.points[t][0]);
        csv += buf;
      }
    }
  }
  write_out(o.out_path, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pimc: PCTL model checking for discrete-time Markov processes"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string formula_text, property_path, path_text, label, x0_text;
  std::optional<std::size_t> horizon, state;
  std::size_t steps = 10, paths = 1, plan_m = 1, n_max = 0;
  double plan_rho = 0.0, an_delta = 1e-3;

  auto add_common = [&](CLI::App* c, bool needs_model) {
    auto* m = c->add_option("--model", o.model_path, "model file (JSON)");
    if (needs_model) m->required();
    c->add_option("--out", o.out_path, "output file (default: stdout)");
    c->add_option("--delta", o.delta, "formula-level precision");
    c->add_option("--epsilon", o.epsilon, "horizon/excision precision target");
    c->add_option("--max-m", o.max_m, "cap for the contraction index m (0: auto)");
    c->add_option("--grid", o.grid_override, "grid resolution override: N or NxM");
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--threads", o.threads, "worker threads");
  };

  auto* check = app.add_subcommand("check", "verify a PCTL formula");
  add_common(check, true);
  check->add_option("--formula", formula_text, "PCTL formula text");
  check->add_option("--property", property_path, "file containing the formula");
  check->add_flag("--emit-masks", o.emit_masks, "include full sub/super masks");

  auto* value = app.add_subcommand("value", "dump a value function as CSV");
  add_common(value, true);
  value->add_option("--path", path_text, "path formula, e.g. \"a U b\"")->required();
  value->add_option("--horizon", horizon, "override the bounded horizon");
  std::string dump_abstraction;
  value->add_option("--dump-abstraction", dump_abstraction,
                    "also write the abstract transition matrix as CSV");

  auto* las = app.add_subcommand("las", "largest absorbing subset of a label");
  add_common(las, true);
  las->add_option("--label", label, "label to analyse")->required();
  las->add_option("--an-delta", an_delta, "supersatisfaction iteration precision");
  las->add_option("--n-max", n_max, "iteration cap (0: number of cells)");

  auto* plan = app.add_subcommand("plan", "horizon for a target precision");
  plan->add_option("--m", plan_m, "contraction index m")->required();
  plan->add_option("--rho", plan_rho, "contraction factor rho")->required();
  plan->add_option("--epsilon", o.epsilon, "target precision")->required();

  auto* sim = app.add_subcommand("simulate", "sample trajectories as CSV");
  add_common(sim, true);
  sim->add_option("--state", state, "initial state (finite models)");
  sim->add_option("--x0", x0_text, "initial point, e.g. \"0.5\" or \"0.1,0.2\"");
  sim->add_option("--steps", steps, "steps per path");
  sim->add_option("--paths", paths, "number of paths");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) {
      if (formula_text.empty() == property_path.empty())
        throw pimc::ModelError("check: give exactly one of --formula / --property");
      if (!property_path.empty()) {
        std::ifstream in(property_path);
        if (!in) throw pimc::ModelError("check: cannot open '" + property_path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        formula_text = ss.str();
        while (!formula_text.empty() &&
               std::isspace(static_cast<unsigned char>(formula_text.back())))
          formula_text.pop_back();
      }
      return cmd_check(o, formula_text);
    }
    if (value->parsed()) return cmd_value(o, path_text, horizon, dump_abstraction);
    if (las->parsed()) return cmd_las(o, label, an_delta, n_max);
    if (plan->parsed()) return cmd_plan(plan_m, plan_rho, o.epsilon);
    if (sim->parsed()) return cmd_simulate(o, state, x0_text, steps, paths);
  } catch (const pimc::ParseError& e) {
    std::fprintf(stderr, "error: formula: %s\n", e.what());
    return 2;
  } catch (const pimc::ModelError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const pimc::UnboundAtomError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
