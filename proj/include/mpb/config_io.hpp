#pragma once

// JSON configuration files and learner-state snapshots.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpb/contextual.hpp"
#include "mpb/experiment.hpp"
#include "mpb/model.hpp"
#include "mpb/noncontextual.hpp"
#include "mpb/ridge.hpp"

namespace mpb {

/// A single fixed instance: catalog, consumer parameters and optionally a
/// ranking (1-based product indices).
struct ModelConfig {
  std::vector<double> revenues;
  std::vector<double> lambdas;
  double q = 0.0;
  double s = 0.0;
  double epsilon_q = kDefaultEpsilonQ;
  std::uint64_t seed = 0;
  std::optional<std::vector<std::size_t>> ranking;

  ProductCatalog catalog() const { return ProductCatalog(revenues); }
  ConsumerProfile profile() const { return ConsumerProfile(lambdas, q, s, epsilon_q); }
  /// The configured ranking, or the identity when none is given.
  RankingPolicy policy() const;
};

nlohmann::json load_json_file(const std::string& path);

/// Unknown keys are rejected so that typos do not silently fall back to
/// defaults.
ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::json model_config_to_json(const ModelConfig& config);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

/// A grid file holds {"base": {...experiment...}, "grid": {"xi_lambda": [...], ...}}.
GridSpec grid_spec_from_json(const nlohmann::json& j);
nlohmann::json grid_spec_to_json(const GridSpec& grid);

nlohmann::json noncontextual_state_to_json(const NonContextualState& state);
NonContextualState noncontextual_state_from_json(const nlohmann::json& j, const GlobalConfig& config);

nlohmann::json ridge_state_to_json(const RidgeState& state);
RidgeState ridge_state_from_json(const nlohmann::json& j);

nlohmann::json contextual_state_to_json(const ContextualState& state);
ContextualState contextual_state_from_json(const nlohmann::json& j, const ContextualConfig& config);

}  // namespace mpb
