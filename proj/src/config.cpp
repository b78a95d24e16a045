#include "varstab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace varstab::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("Config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("Config: bad section header at line " +
                                    std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("Config: expected key = value at line " +
                                  std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("Config: empty key at line " +
                                  std::to_string(lineno));
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key); }

Real Config::get_real(const std::string& key, Real fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::size_t pos = 0;
  const Real v = std::stod(it->second, &pos);
  if (pos != it->second.size())
    throw std::invalid_argument("Config: '" + key + "' is not a number");
  return v;
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::size_t pos = 0;
  const int v = std::stoi(it->second, &pos);
  if (pos != it->second.size())
    throw std::invalid_argument("Config: '" + key + "' is not an integer");
  return v;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

hybrid::HybridParams hybrid_params(const Config& config) {
  hybrid::HybridParams p;
  p.max_it_amin = config.get_int("hybrid.max_it_amin", p.max_it_amin);
  p.max_it_newton = config.get_int("hybrid.max_it_newton", p.max_it_newton);
  p.tol_residual = config.get_real("hybrid.tol_residual", p.tol_residual);
  p.tol_alpha_increment =
      config.get_real("hybrid.tol_alpha_increment", p.tol_alpha_increment);
  p.switch_threshold =
      config.get_real("hybrid.switch_threshold", p.switch_threshold);
  p.validate();
  return p;
}

std::unique_ptr<models::ObstacleQuadraticModel> make_obstacle_demo(
    const Config& config, Index n_cells) {
  const Real amplitude = config.get_real("obstacle.load_amplitude", 1.0);
  const Real lower = config.get_real("obstacle.lower", 0.0);

  const fem1d::IntervalMesh mesh = fem1d::build_mesh(n_cells);
  const fem1d::FemForms forms = fem1d::assemble_forms(mesh);
  Vector profile(mesh.n_nodes());
  for (Index i = 0; i < mesh.n_nodes(); ++i)
    profile[i] = amplitude * std::sin(2.0 * M_PI * mesh.nodes[i]);

  return std::make_unique<models::ObstacleQuadraticModel>(
      forms.K + forms.M, forms.M * profile,
      Vector::Constant(mesh.n_nodes(), lower));
}

std::unique_ptr<models::CoupledQuadraticModel> make_coupled_demo(
    const Config& config, Index n_cells) {
  const Real gamma = config.get_real("coupled.gamma", 0.25);
  const Real load_u = config.get_real("coupled.load_u", 1.0);
  const Real load_alpha = config.get_real("coupled.load_alpha", 0.0);
  const Real alpha_lower = config.get_real("coupled.alpha_lower", 0.0);

  const fem1d::IntervalMesh mesh = fem1d::build_mesh(n_cells);
  const fem1d::FemForms forms = fem1d::assemble_forms(mesh);
  const Index n = n_cells;

  const Matrix Kvv = forms.K.block(1, 1, n - 1, n - 1);
  const Matrix C = forms.G.middleRows(1, n - 1);
  const Vector fu =
      (forms.M * Vector::Constant(n + 1, load_u)).segment(1, n - 1);
  const Vector fa = forms.M * Vector::Constant(n + 1, load_alpha);

  return std::make_unique<models::CoupledQuadraticModel>(
      Kvv, forms.K + forms.M, C, gamma, fu, fa,
      Vector::Constant(n + 1, alpha_lower));
}

}  // namespace varstab::config
