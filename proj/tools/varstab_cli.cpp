// Command-line front end: equilibrium solves on the demo models,
// benchmark bifurcation/stability solves, and the phase-diagram sweep.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "varstab/config.hpp"
#include "varstab/sweep.hpp"

namespace {

using namespace varstab;
using nlohmann::json;

json to_json(const Vector& v) {
  return json(std::vector<Real>(v.data(), v.data() + v.size()));
}

void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << doc.dump(2) << '\n';
}

int run_solve(const std::string& model_name, Index n_cells,
              const std::string& config_path, const std::string& out_path) {
  config::Config cfg = config_path.empty()
                           ? config::Config::parse_string("")
                           : config::Config::parse_file(config_path);
  const hybrid::HybridParams params = config::hybrid_params(cfg);

  std::unique_ptr<models::EnergyModel> model;
  models::Bounds bounds = models::Bounds::unbounded(0);
  if (model_name == "obstacle") {
    auto m = config::make_obstacle_demo(cfg, n_cells);
    bounds = m->bounds();
    model = std::move(m);
  } else {
    auto m = config::make_coupled_demo(cfg, n_cells);
    bounds = m->bounds();
    model = std::move(m);
  }

  const Vector z0 = bounds.lower.cwiseMax(Vector::Zero(model->dim()))
                        .cwiseMin(bounds.upper);
  const hybrid::SolveReport report =
      hybrid::solve_equilibrium(*model, z0, bounds, params);

  const fem1d::BlockState state =
      fem1d::split_state(report.final_state, model->layout());
  json doc;
  doc["model"] = model_name;
  doc["n_cells"] = n_cells;
  doc["converged"] = report.converged;
  doc["iterations_phase1"] = report.iterations_phase1;
  doc["iterations_phase2"] = report.iterations_phase2;
  if (report.switch_index) doc["switch_index"] = *report.switch_index;
  doc["residual_history"] = report.residual_history;
  doc["energy_history"] = report.energy_history;
  doc["final_residual"] = report.residual_history.back();
  doc["state"]["first"] = to_json(state.first.values);
  doc["state"]["second"] = to_json(state.second.values);
  write_json(out_path, doc);

  std::cout << (report.converged ? "converged" : "NOT converged") << " in "
            << report.iterations_phase1 << "+" << report.iterations_phase2
            << " iterations, residual " << report.residual_history.back()
            << "\n";
  return report.converged ? 0 : 1;
}

int run_bifurcation(Real a, Real b, Real c, Index n_cells, int k,
                    const std::string& out_path) {
  const models::RayleighQuotientModel model{a, b, c};
  const auto solve = sweep::solve_rayleigh_space(model, n_cells, k);
  const auto ref = reference::closed_form_reference(a, b, c);

  json doc;
  doc["a"] = a;
  doc["b"] = b;
  doc["c"] = c;
  doc["n_cells"] = n_cells;
  doc["k"] = k;
  doc["eigenvalues"] = solve.spectrum.eigenvalues;
  doc["is_positive_definite"] = solve.spectrum.is_positive_definite;
  doc["R_space_ref"] = ref.R_space;
  doc["relative_error"] =
      std::abs(solve.lambda - ref.R_space) / std::abs(ref.R_space);
  write_json(out_path, doc);

  std::cout << "lambda_min = " << solve.lambda << "  (reference "
            << ref.R_space << ")\n";
  return 0;
}

int run_stability(Real a, Real b, Real c, Index n_cells, Real tol_lambda,
                  Real tol_x, int max_iter, const std::string& history_path,
                  const std::string& out_path, const std::string& init,
                  unsigned seed) {
  const models::RayleighQuotientModel model{a, b, c};
  const auto ref = reference::closed_form_reference(a, b, c);

  sweep::RayleighConeOptions options;
  options.fine.tol_lambda = tol_lambda;
  options.fine.tol_x = tol_x;
  options.fine.max_iter = max_iter;
  options.fine.record_history = !history_path.empty();
  options.fine.seed = seed;
  options.coarse.seed = seed;
  if (init == "cold") {
    options.n_coarse_max = n_cells;  // no cascade: cold start at n_cells
    options.coarse = options.fine;
    options.coarse.init = stability::ConeParams::Init::uniform_positive;
  }

  const auto solve = sweep::solve_rayleigh_cone(model, n_cells, options);
  if (!history_path.empty())
    sweep::write_history_csv(history_path, solve.result.history);

  const Real D = reference::support_size(solve.state.second, 1e-6);
  json doc;
  doc["a"] = a;
  doc["b"] = b;
  doc["c"] = c;
  doc["n_cells"] = n_cells;
  doc["lambda_star"] = solve.lambda;
  doc["converged"] = solve.result.converged;
  doc["iterations"] = solve.result.iterations;
  doc["total_iterations"] = solve.total_iterations;
  doc["complementarity"] = solve.result.complementarity;
  doc["dual_feasibility_violation"] = solve.result.dual_feasibility_violation;
  doc["residual_norm"] = solve.result.residual_norm;
  doc["support_D"] = D;
  doc["R_cone_ref"] = ref.R_cone;
  doc["D_ref"] = ref.D_star;
  doc["beta"] = to_json(solve.state.second.values);
  doc["v"] = to_json(solve.state.first.values);
  write_json(out_path, doc);

  std::cout << "lambda_star = " << solve.lambda << "  (reference "
            << ref.R_cone << "), D = " << D << "  (reference " << ref.D_star
            << "), " << (solve.result.converged ? "converged" : "NOT converged")
            << "\n";
  return solve.result.converged ? 0 : 1;
}

int run_sweep_cmd(const std::string& pi2a_spec, const std::string& bc2_spec,
                  Index n_cells, const std::string& out_path) {
  sweep::SweepConfig config;
  config.pi2a_grid = sweep::parse_grid_spec(pi2a_spec);
  config.bc2_grid = sweep::parse_grid_spec(bc2_spec);
  config.n_cells = n_cells;

  const auto records = sweep::run_sweep(config);
  sweep::write_sweep_csv(out_path, records);
  sweep::write_sweep_json(out_path + ".json", records);

  int nonconverged = 0;
  for (const auto& r : records)
    if (!r.converged_space || !r.converged_cone) ++nonconverged;
  std::cout << records.size() << " grid points written to " << out_path
            << " (" << nonconverged << " flagged nonconvergent)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solvers for irreversibly-constrained variational problems"};
  app.require_subcommand(1);

  // solve
  std::string model_name = "obstacle", config_path, out_path = "solve.json";
  Index n_cells = 50;
  auto* solve = app.add_subcommand("solve", "equilibrium solve (hybrid)");
  solve->add_option("--model", model_name, "obstacle|coupled")
      ->check(CLI::IsMember({"obstacle", "coupled"}));
  solve->add_option("--n-cells", n_cells, "mesh cells");
  solve->add_option("--config", config_path, "parameter file");
  solve->add_option("--out", out_path, "JSON report path");

  // bifurcation
  Real a = 1.0, b = 1.0, c = 4.0;
  int k = 1;
  Index n_bif = 1000;
  std::string bif_out = "bifurcation.json";
  auto* bif = app.add_subcommand("bifurcation", "space minimum (eigensolve)");
  bif->add_option("--a", a, "coefficient a > 0");
  bif->add_option("--b", b, "coefficient b > 0");
  bif->add_option("--c", c, "coefficient c != 0");
  bif->add_option("--n-cells", n_bif, "mesh cells");
  bif->add_option("--k", k, "number of eigenpairs");
  bif->add_option("--out", bif_out, "JSON report path");

  // stability
  Real sa = 1.0, sb = 1.0, sc = 4.0, tol_lambda = 1e-9, tol_x = 5e-9;
  int max_iter = 2000000;
  Index n_stab = 1000;
  unsigned seed = 24601;
  std::string history_path, stab_out = "stability.json", init = "cascade";
  auto* stab = app.add_subcommand("stability", "cone minimum (projection-scaling)");
  stab->add_option("--a", sa, "coefficient a > 0");
  stab->add_option("--b", sb, "coefficient b > 0");
  stab->add_option("--c", sc, "coefficient c != 0");
  stab->add_option("--n-cells", n_stab, "mesh cells");
  stab->add_option("--tol-lambda", tol_lambda, "eigenvalue increment tolerance");
  stab->add_option("--tol-x", tol_x, "iterate increment tolerance");
  stab->add_option("--max-iter", max_iter, "iteration cap (finest level)");
  stab->add_option("--history", history_path, "per-iteration CSV path");
  stab->add_option("--out", stab_out, "JSON report path");
  stab->add_option("--init", init, "cascade|cold")
      ->check(CLI::IsMember({"cascade", "cold"}));
  stab->add_option("--seed", seed, "seed for the cold-start guess");

  // sweep
  std::string pi2a_spec = "0.5:16:5", bc2_spec = "0.5:16:5",
              sweep_out = "sweep.csv";
  Index n_sweep = 1000;
  auto* sw = app.add_subcommand("sweep", "phase-diagram sweep (CSV + JSON)");
  sw->add_option("--pi2a", pi2a_spec, "grid MIN:MAX:COUNT for pi^2 a");
  sw->add_option("--bc2", bc2_spec, "grid MIN:MAX:COUNT for b c^2");
  sw->add_option("--n-cells", n_sweep, "mesh cells");
  sw->add_option("--out", sweep_out, "CSV path (JSON mirror at <out>.json)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return run_solve(model_name, n_cells, config_path, out_path);
    if (bif->parsed()) return run_bifurcation(a, b, c, n_bif, k, bif_out);
    if (stab->parsed())
      return run_stability(sa, sb, sc, n_stab, tol_lambda, tol_x, max_iter,
                           history_path, stab_out, init, seed);
    if (sw->parsed())
      return run_sweep_cmd(pi2a_spec, bc2_spec, n_sweep, sweep_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
