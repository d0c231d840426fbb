#pragma once

// Synthetic data-generating processes, regret and revenue metrics, and the
// multi-seed experiment / grid-search runners.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "mpb/baselines.hpp"
#include "mpb/contextual.hpp"
#include "mpb/model.hpp"
#include "mpb/noncontextual.hpp"
#include "mpb/rng.hpp"

namespace mpb {

enum class Setting { noncontextual, contextual };
enum class Algorithm { mpb_ucb, single_purchase, keep_viewing, explore_exploit_a, explore_exploit_b };

std::string_view to_string(Setting s) noexcept;
std::string_view to_string(Algorithm a) noexcept;
Setting parse_setting(std::string_view text);
Algorithm parse_algorithm(std::string_view text);

struct ExperimentConfig {
  std::string name = "experiment";
  Setting setting = Setting::noncontextual;
  std::size_t n_products = 10;
  std::uint64_t horizon = 50000;
  std::size_t n_seeds = 5;
  std::uint64_t seed = 0;

  // Non-contextual data: r ~ U[0,1], lambda ~ U[0, lambda_max], fixed q and s.
  double q = 0.9;
  double s = 0.5;
  double lambda_max = 0.3;
  // Contextual data: population maxima after coefficient normalization.
  double q_max = 0.9;
  double s_max = 0.5;
  std::size_t m_x = 5;

  Algorithm algorithm = Algorithm::mpb_ucb;
  /// Exploration multipliers; unset means sqrt(2) (non-contextual) or 1
  /// (contextual).
  std::optional<double> xi_lambda;
  std::optional<double> xi_q;
  std::optional<double> xi_w;
  double delta = 1.0;
  double alpha_lambda = 1.0;
  double alpha_q = 1.0;
  double alpha_w = 1.0;
  double epsilon_q = kDefaultEpsilonQ;
  double u_bound = 1.0;

  std::size_t n_checkpoints = 50;
  std::size_t threads = 1;
  std::string output_dir;  // empty: results are returned but not written
  bool observe_at_list_end = true;
  bool dump_full_series = false;

  void validate() const;
  ExplorationWeights noncontextual_weights() const;
  ContextualWeights contextual_weights() const;
  ContextualConfig contextual_config() const;
  BaselineConfig baseline_config() const;
  GlobalConfig global_config() const;
};

struct NonContextualInstance {
  ProductCatalog catalog;
  ConsumerProfile profile;
};

NonContextualInstance generate_noncontextual_instance(std::size_t n, double q, double s,
                                                      double lambda_max, double epsilon_q,
                                                      RandomStream& rng);

/// Product features are fixed across consumers; every consumer in the stream
/// has its own feature vector.
struct ContextualInstance {
  ProductCatalog catalog;
  GroundTruthCoefficients coefficients;
  Eigen::MatrixXd product_features;   // m_x x N
  Eigen::MatrixXd consumer_features;  // m_x x n_consumers

  std::size_t n_consumers() const noexcept {
    return static_cast<std::size_t>(consumer_features.cols());
  }
  /// Features of consumer t (0-based).
  ContextFeatures features(std::size_t t) const;
};

/// Consumer coordinates ~ U[0.8/sqrt(m_x), 1/sqrt(m_x)], product coordinates
/// ~ U[0, 1/sqrt(m_x)], coefficients ~ U[0,1] rescaled so that the largest
/// lambda, q and s over the stream equal lambda_max, q_max and s_max.
ContextualInstance generate_contextual_stream(std::size_t n, std::size_t m_x,
                                              std::size_t n_consumers, double lambda_max,
                                              double q_max, double s_max, RandomStream& rng);

/// Expected-revenue gap between the optimal ranking for `profile` and `chosen`.
double per_round_regret(const RankingPolicy& chosen, const ConsumerProfile& profile,
                        const ProductCatalog& catalog);

/// count log-spaced rounds in [1, horizon], always including the horizon.
std::vector<std::uint64_t> log_checkpoints(std::uint64_t horizon, std::size_t count);

struct RunResult {
  std::size_t seed_index = 0;
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> cumulative_regret;
  std::vector<double> average_revenue;
  std::vector<double> revenue_ratio;
  double total_achieved = 0.0;
  double total_optimal = 0.0;
  double min_step_regret = 0.0;
  std::vector<double> step_regret;  // only with dump_full_series
  nlohmann::json final_estimates;
  double wall_clock_seconds = 0.0;

  double final_regret() const { return cumulative_regret.empty() ? 0.0 : cumulative_regret.back(); }
};

/// Online learner interface driven by the runner.
class Learner {
public:
  virtual ~Learner() = default;
  /// `features` is null in the non-contextual setting.
  virtual RankingPolicy choose(std::uint64_t t, const ContextFeatures* features) = 0;
  virtual void observe(const RankingPolicy& policy, const SessionOutcome& outcome,
                       const ContextFeatures* features) = 0;
  virtual nlohmann::json snapshot() const = 0;
};

std::unique_ptr<Learner> make_learner(const ExperimentConfig& config, const ProductCatalog& catalog);

/// Runs seed `seed_index` against a pre-generated instance.
RunResult run_noncontextual(const ExperimentConfig& config, const NonContextualInstance& instance,
                            std::size_t seed_index);
RunResult run_contextual(const ExperimentConfig& config, const ContextualInstance& instance,
                         std::size_t seed_index);

NonContextualInstance make_noncontextual_instance(const ExperimentConfig& config);
ContextualInstance make_contextual_instance(const ExperimentConfig& config);

/// Generates the instance once from config.seed, then runs every seed
/// (resampling only session randomness) on up to config.threads threads.
/// Writes <output_dir>/<name>.csv and .json when output_dir is set.
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

/// Columns t,regret_mean,regret_std,avg_revenue_mean,ratio_mean,seed_count.
void write_summary_csv(std::ostream& out, const std::vector<RunResult>& runs);
nlohmann::json results_to_json(const ExperimentConfig& config, const std::vector<RunResult>& runs);

struct GridSpec {
  std::vector<double> xi_lambda;
  std::vector<double> xi_q;
  std::vector<double> xi_w;
  std::vector<double> delta;
  std::vector<double> alpha;  // applied to all three ridge strengths
};

struct GridRow {
  ExperimentConfig config;
  std::vector<double> final_regrets;  // per seed
  double mean_regret = 0.0;
};

struct GridResult {
  std::vector<GridRow> rows;  // ascending mean regret
  std::size_t runs = 0;
  const GridRow& best() const { return rows.front(); }
};

/// Cartesian product over the non-empty axes of `grid`; empty axes keep the
/// base value. All configurations share one instance. Runs (config, seed)
/// pairs in parallel.
GridResult grid_search(const ExperimentConfig& base, const GridSpec& grid);
void write_grid_csv(std::ostream& out, const GridResult& result);

}  // namespace mpb
