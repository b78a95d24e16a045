#include "varstab/sweep.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace varstab::sweep {

namespace {

SparseMatrix sparse_restrict_interior(const Matrix& m) {
  // rows/cols 1..n-1 of an (n+1)x(n+1) operator
  const Index n = m.rows() - 1;
  Matrix inner = m.block(1, 1, n - 1, n - 1);
  return inner.sparseView();
}

}  // namespace

RayleighReducedPencil::RayleighReducedPencil(
    const models::RayleighQuotientModel& model, Index n_cells)
    : model_(model) {
  model_.validate();
  mesh_ = std::make_shared<const fem1d::IntervalMesh>(
      fem1d::build_mesh(n_cells));
  const fem1d::FemForms forms = fem1d::assemble_forms(*mesh_);
  K_ = forms.K.sparseView();
  M_ = forms.M.sparseView();
  Gr_ = Matrix(forms.G.middleRows(1, n_cells - 1)).sparseView();
  Kvv_.compute(sparse_restrict_interior(forms.K));
  if (Kvv_.info() != Eigen::Success)
    throw SolverError("RayleighReducedPencil: stiffness factorization failed");
}

Vector RayleighReducedPencil::apply_S(const Vector& w) const {
  const Real bc2 = model_.b * model_.c * model_.c;
  const Vector t = Gr_ * w;
  const Vector u = Kvv_.solve(t);
  return model_.a * (K_ * w) + bc2 * (M_ * w) - bc2 * (Gr_.transpose() * u);
}

Vector RayleighReducedPencil::apply_M(const Vector& w) const { return M_ * w; }

Matrix RayleighReducedPencil::dense_S() const {
  const Real bc2 = model_.b * model_.c * model_.c;
  const Matrix Gr = Matrix(Gr_);
  const Matrix W = Kvv_.solve(Gr);
  Matrix S = model_.a * Matrix(K_) + bc2 * (Matrix(M_) - Gr.transpose() * W);
  return 0.5 * (S + S.transpose());
}

Matrix RayleighReducedPencil::dense_M() const { return Matrix(M_); }

Vector RayleighReducedPencil::reconstruct_v(const Vector& beta) const {
  return model_.c * Kvv_.solve(Gr_ * beta);
}

stability::LinearOperator RayleighReducedPencil::S_operator() const {
  return {dim(), [this](const Vector& w) { return apply_S(w); }};
}

stability::LinearOperator RayleighReducedPencil::M_operator() const {
  return {dim(), [this](const Vector& w) { return apply_M(w); }};
}

RayleighConeOptions::RayleighConeOptions() {
  coarse.max_iter = 400000;
  coarse.tol_lambda = 1e-12;
  coarse.tol_x = 1e-10;
  coarse.record_history = false;

  mid = coarse;
  mid.tol_lambda = 1e-11;
  mid.tol_x = 1e-9;
  mid.init = stability::ConeParams::Init::given;

  fine.max_iter = 2000000;
  fine.tol_lambda = 1e-9;
  fine.tol_x = 5e-9;
  fine.init = stability::ConeParams::Init::given;
  fine.record_history = false;
}

RayleighConeSolve solve_rayleigh_cone(const models::RayleighQuotientModel& model,
                                      Index n_cells,
                                      const RayleighConeOptions& options) {
  model.validate();
  require(n_cells >= 1, "solve_rayleigh_cone: n_cells must be positive");
  require(options.level_factor >= 2,
          "solve_rayleigh_cone: level_factor must be >= 2");

  RayleighConeSolve out;
  std::vector<Index> levels{n_cells};
  while (levels.back() > options.n_coarse_max)
    levels.push_back(std::max<Index>(levels.back() / options.level_factor, 8));
  std::reverse(levels.begin(), levels.end());
  out.level_cells = levels;

  Vector beta;
  std::shared_ptr<const fem1d::IntervalMesh> prev_mesh;
  for (std::size_t lev = 0; lev < levels.size(); ++lev) {
    RayleighReducedPencil pencil(model, levels[lev]);
    const BlockLayout layout{0, pencil.dim(), {}};

    auto run = [&](const stability::ConeParams& params) {
      if (levels[lev] <= 128) {
        SymmetricPencil dense{pencil.dense_S(), pencil.dense_M()};
        return stability::solve_cone_eigen(dense, layout, params);
      }
      return stability::solve_cone_eigen(pencil.S_operator(),
                                         pencil.M_operator(), layout, params);
    };

    stability::ConeResult res;
    if (lev == 0) {
      // The cone problem has non-minimal critical points (interior and
      // multi-bump profiles). Multistart at the coarsest level and keep
      // the lowest eigenvalue; tilted guesses break the mirror symmetry.
      const Index nn = pencil.dim();
      Vector tilt_left(nn), tilt_right(nn);
      for (Index i = 0; i < nn; ++i) {
        const Real x = pencil.mesh()->nodes[i];
        tilt_left[i] = 1.25 - x;
        tilt_right[i] = 0.25 + x;
      }

      bool have = false;
      for (int cand = 0; cand < 3; ++cand) {
        stability::ConeParams params =
            levels.size() == 1 ? options.fine : options.coarse;
        if (cand == 0) {
          params.init = stability::ConeParams::Init::given;
          params.initial_guess = tilt_left;
        } else if (cand == 1) {
          params.init = stability::ConeParams::Init::given;
          params.initial_guess = tilt_right;
        } else {
          params.init = stability::ConeParams::Init::uniform_positive;
        }
        stability::ConeResult trial = run(params);
        out.total_iterations += trial.iterations;
        const bool better =
            !have || (trial.converged && !res.converged) ||
            (trial.converged == res.converged &&
             trial.lambda_star < res.lambda_star);
        if (better) {
          res = std::move(trial);
          have = true;
        }
      }
    } else {
      stability::ConeParams params =
          (lev + 1 == levels.size()) ? options.fine : options.mid;
      params.init = stability::ConeParams::Init::given;
      params.initial_guess =
          fem1d::interpolate_nodal(*prev_mesh, beta, *pencil.mesh());
      res = run(params);
      out.total_iterations += res.iterations;
    }
    beta = res.z_star;
    prev_mesh = pencil.mesh();

    if (lev + 1 == levels.size()) {
      out.result = std::move(res);
      out.lambda = out.result.lambda_star;
      Vector v_full = Vector::Zero(pencil.dim());
      v_full.segment(1, pencil.dim() - 2) = pencil.reconstruct_v(beta);
      out.state = fem1d::make_block_state(pencil.mesh(), v_full, beta);
    }
  }
  return out;
}

RayleighSpaceSolve solve_rayleigh_space(
    const models::RayleighQuotientModel& model, Index n_cells, int k,
    const bifurcation::BifurcationOptions& options) {
  const fem1d::IntervalMesh mesh = fem1d::build_mesh(n_cells);
  std::vector<fem1d::DirichletBC> bcs(1);
  bcs[0].block = fem1d::DirichletBC::Block::first;
  bcs[0].dofs = {0, n_cells};
  bcs[0].values = Vector::Zero(2);

  RayleighSpaceSolve out;
  out.system = models::rayleigh_pencil(model, mesh, bcs);
  std::vector<Index> all(out.system.pencil.dim());
  for (Index i = 0; i < out.system.pencil.dim(); ++i) all[i] = i;
  out.spectrum = bifurcation::solve_bifurcation(out.system.pencil, all, k,
                                                std::nullopt, options);
  out.lambda = out.spectrum.eigenvalues.front();
  return out;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
  require(config.b > 0, "run_sweep: b must be positive");
  std::vector<SweepRecord> records;
  const Real nan = std::numeric_limits<Real>::quiet_NaN();

  for (Real pi2a : config.pi2a_grid) {
    for (Real bc2 : config.bc2_grid) {
      SweepRecord rec;
      rec.pi2a = pi2a;
      rec.bc2 = bc2;
      rec.b = config.b;
      rec.a = pi2a / (M_PI * M_PI);
      rec.c = std::sqrt(bc2 / config.b);

      const auto ref = reference::closed_form_reference(rec.a, rec.b, rec.c);
      rec.R_space_ref = ref.R_space;
      rec.R_cone_ref = ref.R_cone;
      rec.D_ref = ref.D_star;
      rec.branch_ref = ref.branch;

      const models::RayleighQuotientModel model{rec.a, rec.b, rec.c};
      try {
        const auto space =
            solve_rayleigh_space(model, config.n_cells, 1, config.eig);
        rec.R_space_num = space.lambda;
        rec.converged_space = true;
      } catch (const std::exception&) {
        rec.R_space_num = nan;
        rec.converged_space = false;
      }

      try {
        const auto cone =
            solve_rayleigh_cone(model, config.n_cells, config.cone);
        rec.R_cone_num = cone.lambda;
        rec.iters_cone = cone.total_iterations;
        rec.converged_cone = cone.result.converged;
        rec.complementarity = cone.result.complementarity;
        rec.dual_violation = cone.result.dual_feasibility_violation;
        rec.residual_norm = cone.result.residual_norm;
        rec.D_num = cone.result.converged
                        ? reference::support_size(cone.state.second,
                                                  config.support_epsilon)
                        : nan;
      } catch (const std::exception&) {
        rec.R_cone_num = nan;
        rec.D_num = nan;
        rec.converged_cone = false;
      }

      records.push_back(rec);
    }
  }
  return records;
}

namespace {

std::string csv_num(Real v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + path);
  out << "a,b,c,pi2a,bc2,R_space_num,R_space_ref,R_cone_num,R_cone_ref,"
         "D_num,D_ref,branch_ref,converged_space,converged_cone,iters_cone\n";
  for (const auto& r : records) {
    out << csv_num(r.a) << ',' << csv_num(r.b) << ',' << csv_num(r.c) << ','
        << csv_num(r.pi2a) << ',' << csv_num(r.bc2) << ','
        << csv_num(r.R_space_num) << ',' << csv_num(r.R_space_ref) << ','
        << csv_num(r.R_cone_num) << ',' << csv_num(r.R_cone_ref) << ','
        << csv_num(r.D_num) << ',' << csv_num(r.D_ref) << ','
        << reference::branch_name(r.branch_ref) << ','
        << (r.converged_space ? 1 : 0) << ',' << (r.converged_cone ? 1 : 0)
        << ',' << r.iters_cone << '\n';
  }
}

void write_sweep_json(const std::string& path,
                      const std::vector<SweepRecord>& records) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j;
    j["a"] = r.a;
    j["b"] = r.b;
    j["c"] = r.c;
    j["pi2a"] = r.pi2a;
    j["bc2"] = r.bc2;
    j["R_space_num"] = r.R_space_num;
    j["R_space_ref"] = r.R_space_ref;
    j["R_cone_num"] = r.R_cone_num;
    j["R_cone_ref"] = r.R_cone_ref;
    j["D_num"] = r.D_num;
    j["D_ref"] = r.D_ref;
    j["branch_ref"] = reference::branch_name(r.branch_ref);
    j["converged_space"] = r.converged_space;
    j["converged_cone"] = r.converged_cone;
    j["iters_cone"] = r.iters_cone;
    j["complementarity"] = r.complementarity;
    j["dual_violation"] = r.dual_violation;
    j["residual_norm"] = r.residual_norm;
    j["stable"] = r.R_cone_num > 1.0;
    doc.push_back(std::move(j));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sweep_json: cannot open " + path);
  out << doc.dump(2) << '\n';
}

void write_history_csv(const std::string& path,
                       const std::vector<stability::ConeIterate>& history) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_history_csv: cannot open " + path);
  out << "iter,lambda,x_error,residual_norm\n";
  out.precision(16);
  for (const auto& h : history)
    out << h.iter << ',' << h.lambda << ',' << csv_num(h.x_error) << ','
        << h.residual_norm << '\n';
}

std::vector<Real> parse_grid_spec(const std::string& spec) {
  Real lo = 0, hi = 0;
  int count = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(spec);
  if (!(is >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' ||
      count < 1 || (is >> std::ws, !is.eof()))
    throw std::invalid_argument("grid spec must be MIN:MAX:COUNT, got '" +
                                spec + "'");
  std::vector<Real> grid(count);
  if (count == 1) {
    grid[0] = lo;
  } else {
    for (int i = 0; i < count; ++i)
      grid[i] = lo + (hi - lo) * static_cast<Real>(i) / (count - 1);
  }
  return grid;
}

}  // namespace varstab::sweep
