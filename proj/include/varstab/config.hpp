#pragma once

// Nested key-value configuration (INI-style sections) for model and
// solver parameters, plus config-driven builders for the demo
// equilibrium models exposed by the CLI.

#include <map>
#include <memory>
#include <string>

#include "varstab/hybrid.hpp"
#include "varstab/models.hpp"

namespace varstab::config {

/// Sections of `key = value` pairs:
///
///   [hybrid]
///   tol_residual = 1e-8   # comment
///
/// Lookup keys are "section.key". Unknown keys fall back to defaults.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  Real get_real(const std::string& key, Real fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

hybrid::HybridParams hybrid_params(const Config& config);

/// Demo obstacle model on a mesh: A = K + M, load f = M * (amplitude *
/// sin(2 pi x)) nodally, lower bound constant. All dofs form the
/// order-parameter block.
std::unique_ptr<models::ObstacleQuadraticModel> make_obstacle_demo(
    const Config& config, Index n_cells);

/// Demo coupled model: kinematic block on interior dofs (clamped ends)
/// with stiffness K_vv, order block on all nodes with K + M, mixed-form
/// coupling scaled by gamma (PD for |gamma| < 1), constant body loads.
std::unique_ptr<models::CoupledQuadraticModel> make_coupled_demo(
    const Config& config, Index n_cells);

}  // namespace varstab::config
