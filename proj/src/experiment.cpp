#include "mpb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "mpb/config_io.hpp"
#include "mpb/consumer_sim.hpp"
#include "mpb/revenue.hpp"

namespace mpb {

std::string_view to_string(Setting s) noexcept {
  return s == Setting::contextual ? "contextual" : "noncontextual";
}

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::mpb_ucb: return "mpb_ucb";
    case Algorithm::single_purchase: return "single_purchase";
    case Algorithm::keep_viewing: return "keep_viewing";
    case Algorithm::explore_exploit_a: return "explore_exploit_a";
    case Algorithm::explore_exploit_b: return "explore_exploit_b";
  }
  return "unknown";
}

Setting parse_setting(std::string_view text) {
  if (text == "noncontextual" || text == "non-contextual") return Setting::noncontextual;
  if (text == "contextual") return Setting::contextual;
  throw ValidationError("unknown setting '" + std::string(text) + "'");
}

Algorithm parse_algorithm(std::string_view text) {
  for (Algorithm a : {Algorithm::mpb_ucb, Algorithm::single_purchase, Algorithm::keep_viewing,
                      Algorithm::explore_exploit_a, Algorithm::explore_exploit_b}) {
    if (text == to_string(a)) return a;
  }
  throw ValidationError("unknown algorithm '" + std::string(text) +
                        "' (expected mpb_ucb, single_purchase, keep_viewing, explore_exploit_a "
                        "or explore_exploit_b)");
}

void ExperimentConfig::validate() const {
  if (n_products < 1) throw ValidationError("n_products must be at least 1");
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  if (n_seeds < 1) throw ValidationError("n_seeds must be at least 1");
  if (n_checkpoints < 1) throw ValidationError("n_checkpoints must be at least 1");
  if (!(epsilon_q > 0.0 && epsilon_q < 1.0)) throw ValidationError("epsilon_q must lie in (0, 1)");
  if (!(lambda_max >= 0.0 && lambda_max <= 1.0)) throw ValidationError("lambda_max outside [0, 1]");
  if (setting == Setting::noncontextual) {
    if (!(q >= 0.0 && q <= 1.0 - epsilon_q)) throw ValidationError("q outside [0, 1 - epsilon_q]");
    if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("s outside [0, 1]");
  } else {
    if (m_x < 1) throw ValidationError("m_x must be at least 1");
    if (!(q_max > 0.0 && q_max <= 1.0 - epsilon_q)) {
      throw ValidationError("q_max outside (0, 1 - epsilon_q]");
    }
    if (!(s_max >= 0.0 && s_max <= 1.0)) throw ValidationError("s_max outside [0, 1]");
    contextual_config().validate();
  }
  noncontextual_weights().validate();
  baseline_config().validate();
}

ExplorationWeights ExperimentConfig::noncontextual_weights() const {
  const double d = std::sqrt(2.0);
  return {xi_lambda.value_or(d), xi_q.value_or(d), xi_w.value_or(d)};
}

ContextualWeights ExperimentConfig::contextual_weights() const {
  return {xi_lambda.value_or(1.0), xi_q.value_or(1.0), xi_w.value_or(1.0)};
}

ContextualConfig ExperimentConfig::contextual_config() const {
  return {epsilon_q, alpha_lambda, alpha_q, alpha_w, u_bound};
}

BaselineConfig ExperimentConfig::baseline_config() const {
  BaselineConfig b;
  switch (algorithm) {
    case Algorithm::explore_exploit_a: b.kind = BaselineKind::explore_exploit_a; break;
    case Algorithm::explore_exploit_b: b.kind = BaselineKind::explore_exploit_b; break;
    case Algorithm::keep_viewing: b.kind = BaselineKind::keep_viewing; break;
    default: b.kind = BaselineKind::single_purchase; break;
  }
  b.delta = delta;
  b.horizon = horizon;
  return b;
}

GlobalConfig ExperimentConfig::global_config() const { return {epsilon_q, seed}; }

NonContextualInstance generate_noncontextual_instance(std::size_t n, double q, double s,
                                                      double lambda_max, double epsilon_q,
                                                      RandomStream& rng) {
  if (n < 1) throw ValidationError("instance needs at least one product");
  std::vector<double> revenues(n), lambdas(n);
  for (std::size_t k = 0; k < n; ++k) revenues[k] = rng.uniform();
  for (std::size_t k = 0; k < n; ++k) lambdas[k] = rng.uniform(0.0, lambda_max);
  return {ProductCatalog(std::move(revenues)), ConsumerProfile(std::move(lambdas), q, s, epsilon_q)};
}

ContextFeatures ContextualInstance::features(std::size_t t) const {
  const Eigen::Index n = product_features.cols();
  const Eigen::Index mx = consumer_features.rows();
  const Eigen::VectorXd x = consumer_features.col(static_cast<Eigen::Index>(t));
  Eigen::MatrixXd y(2 * mx, n);
  for (Eigen::Index k = 0; k < n; ++k) y.col(k) = joint_feature(x, product_features.col(k));
  return ContextFeatures(x, std::move(y));
}

ContextualInstance generate_contextual_stream(std::size_t n, std::size_t m_x,
                                              std::size_t n_consumers, double lambda_max,
                                              double q_max, double s_max, RandomStream& rng) {
  if (n < 1 || m_x < 1 || n_consumers < 1) {
    throw ValidationError("contextual stream needs n, m_x and the consumer count >= 1");
  }
  const auto mx = static_cast<Eigen::Index>(m_x);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_x));

  std::vector<double> revenues(n);
  for (auto& r : revenues) r = rng.uniform();

  Eigen::MatrixXd products(mx, static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < products.cols(); ++k) {
    for (Eigen::Index i = 0; i < mx; ++i) products(i, k) = rng.uniform(0.0, scale);
  }
  Eigen::MatrixXd consumers(mx, static_cast<Eigen::Index>(n_consumers));
  for (Eigen::Index t = 0; t < consumers.cols(); ++t) {
    for (Eigen::Index i = 0; i < mx; ++i) consumers(i, t) = rng.uniform(0.8 * scale, scale);
  }

  GroundTruthCoefficients coef;
  coef.beta_lambda.resize(2 * mx);
  coef.beta_q.resize(mx);
  coef.beta_s.resize(mx);
  for (Eigen::Index i = 0; i < coef.beta_lambda.size(); ++i) coef.beta_lambda[i] = rng.uniform();
  for (Eigen::Index i = 0; i < mx; ++i) coef.beta_q[i] = rng.uniform();
  for (Eigen::Index i = 0; i < mx; ++i) coef.beta_s[i] = rng.uniform();

  // The joint feature is linear in (x, p), so the largest lambda over the
  // stream pairs the consumer and product maximizing each half separately.
  const double inv_sqrt2 = std::sqrt(0.5);
  const Eigen::VectorXd beta_consumer_part = coef.beta_lambda.head(mx) * inv_sqrt2;
  const Eigen::VectorXd beta_product_part = coef.beta_lambda.tail(mx) * inv_sqrt2;
  const double lambda_peak = (consumers.transpose() * beta_consumer_part).maxCoeff() +
                             (products.transpose() * beta_product_part).maxCoeff();
  const double q_peak = (consumers.transpose() * coef.beta_q).maxCoeff();
  const double s_peak = (consumers.transpose() * coef.beta_s).maxCoeff();
  if (!(lambda_peak > 0.0 && q_peak > 0.0 && s_peak > 0.0)) {
    throw std::runtime_error("degenerate coefficient draw");
  }
  coef.beta_lambda *= lambda_max / lambda_peak;
  coef.beta_q *= q_max / q_peak;
  coef.beta_s *= s_max / s_peak;

  return {ProductCatalog(std::move(revenues)), std::move(coef), std::move(products),
          std::move(consumers)};
}

double per_round_regret(const RankingPolicy& chosen, const ConsumerProfile& profile,
                        const ProductCatalog& catalog) {
  const RankingPolicy best = optimal_ranking(profile, catalog);
  return expected_revenue(profile, best, catalog) - expected_revenue(profile, chosen, catalog);
}

std::vector<std::uint64_t> log_checkpoints(std::uint64_t horizon, std::size_t count) {
  if (horizon < 1 || count < 1) throw ValidationError("checkpoints need horizon and count >= 1");
  std::vector<std::uint64_t> out;
  if (count > 1) {
    const double top = std::log(static_cast<double>(horizon));
    for (std::size_t i = 0; i < count; ++i) {
      const double e = top * static_cast<double>(i) / static_cast<double>(count - 1);
      auto t = static_cast<std::uint64_t>(std::llround(std::exp(e)));
      out.push_back(std::clamp<std::uint64_t>(t, 1, horizon));
    }
  }
  out.push_back(horizon);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

nlohmann::json estimates_json(const OptimisticEstimates& est) {
  return {{"lambdas", est.lambda}, {"q", est.q}, {"w", est.w}, {"s", est.s()}};
}

class NonContextualLearner final : public Learner {
public:
  NonContextualLearner(const ExperimentConfig& config, const ProductCatalog& catalog)
      : config_(config),
        catalog_(catalog),
        global_(config.global_config()),
        weights_(config.noncontextual_weights()),
        baseline_(config.baseline_config()),
        state_(catalog.size(), global_) {}

  RankingPolicy choose(std::uint64_t, const ContextFeatures*) override {
    switch (config_.algorithm) {
      case Algorithm::mpb_ucb: return mpb_ucb_policy(state_.estimates, catalog_);
      case Algorithm::single_purchase: return single_purchase_policy(state_.estimates, catalog_);
      case Algorithm::keep_viewing: return keep_viewing_policy(state_.estimates, catalog_);
      case Algorithm::explore_exploit_a:
      case Algorithm::explore_exploit_b:
        return explore_then_exploit_policy(state_.stats, catalog_, baseline_, global_);
    }
    throw std::logic_error("unhandled algorithm");
  }

  void observe(const RankingPolicy& policy, const SessionOutcome& outcome,
               const ContextFeatures*) override {
    update_stats(state_.stats, outcome, policy);
    ++state_.round;
    state_.estimates = optimistic_estimates(state_.stats, state_.round, weights_, global_);
  }

  nlohmann::json snapshot() const override {
    nlohmann::json j = noncontextual_state_to_json(state_);
    j["greedy"] = estimates_json(greedy_estimates(state_.stats, global_));
    return j;
  }

private:
  const ExperimentConfig& config_;
  const ProductCatalog& catalog_;
  GlobalConfig global_;
  ExplorationWeights weights_;
  BaselineConfig baseline_;
  NonContextualState state_;
};

class ContextualLearner final : public Learner {
public:
  ContextualLearner(const ExperimentConfig& config, const ProductCatalog& catalog)
      : config_(config),
        catalog_(catalog),
        ridge_config_(config.contextual_config()),
        weights_(config.contextual_weights()),
        baseline_(config.baseline_config()),
        state_(config.m_x, 2 * config.m_x, ridge_config_),
        displays_(catalog.size(), 0) {}

  RankingPolicy choose(std::uint64_t t, const ContextFeatures* features) override {
    if (!features) throw std::logic_error("contextual learner needs features");
    switch (config_.algorithm) {
      case Algorithm::mpb_ucb: {
        const auto est = contextual_optimistic_estimates(state_, *features, t, ridge_config_, weights_);
        return optimal_ranking(est.lambda, est.q, est.s(), catalog_);
      }
      case Algorithm::single_purchase:
        return single_purchase_policy(
            contextual_optimistic_estimates(state_, *features, t, ridge_config_, weights_), catalog_);
      case Algorithm::keep_viewing:
        return keep_viewing_policy(
            contextual_optimistic_estimates(state_, *features, t, ridge_config_, weights_), catalog_);
      case Algorithm::explore_exploit_a:
      case Algorithm::explore_exploit_b:
        return explore_then_exploit_policy(
            displays_, contextual_greedy_estimates(state_, *features, ridge_config_), catalog_,
            baseline_);
    }
    throw std::logic_error("unhandled algorithm");
  }

  void observe(const RankingPolicy& policy, const SessionOutcome& outcome,
               const ContextFeatures* features) override {
    update_ridge_states(state_, *features, policy, outcome);
    for (std::size_t pos = 0; pos < outcome.viewed(); ++pos) ++displays_[policy.product_at(pos)];
    ++state_.round;
  }

  nlohmann::json snapshot() const override { return contextual_state_to_json(state_); }

private:
  const ExperimentConfig& config_;
  const ProductCatalog& catalog_;
  ContextualConfig ridge_config_;
  ContextualWeights weights_;
  BaselineConfig baseline_;
  ContextualState state_;
  std::vector<std::int64_t> displays_;
};

// Accumulates metrics over rounds and samples them at the checkpoints.
class MetricRecorder {
public:
  MetricRecorder(const ExperimentConfig& config, std::size_t seed_index)
      : keep_series_(config.dump_full_series) {
    result_.seed_index = seed_index;
    result_.checkpoints = log_checkpoints(config.horizon, config.n_checkpoints);
    result_.min_step_regret = std::numeric_limits<double>::infinity();
  }

  void record(std::uint64_t t, double optimal, double achieved) {
    const double regret = optimal - achieved;
    cumulative_regret_ += regret;
    result_.total_achieved += achieved;
    result_.total_optimal += optimal;
    result_.min_step_regret = std::min(result_.min_step_regret, regret);
    if (keep_series_) result_.step_regret.push_back(regret);
    if (next_ < result_.checkpoints.size() && result_.checkpoints[next_] == t) {
      result_.cumulative_regret.push_back(cumulative_regret_);
      result_.average_revenue.push_back(result_.total_achieved / static_cast<double>(t));
      result_.revenue_ratio.push_back(
          result_.total_optimal > 0.0 ? result_.total_achieved / result_.total_optimal : 1.0);
      ++next_;
    }
  }

  RunResult finish(nlohmann::json estimates, double seconds) {
    result_.final_estimates = std::move(estimates);
    result_.wall_clock_seconds = seconds;
    return std::move(result_);
  }

private:
  RunResult result_;
  bool keep_series_;
  double cumulative_regret_ = 0.0;
  std::size_t next_ = 0;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Runs task(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

SimulationOptions sim_options(const ExperimentConfig& config) {
  return {config.observe_at_list_end};
}

}  // namespace

std::unique_ptr<Learner> make_learner(const ExperimentConfig& config, const ProductCatalog& catalog) {
  if (config.setting == Setting::contextual) {
    return std::make_unique<ContextualLearner>(config, catalog);
  }
  return std::make_unique<NonContextualLearner>(config, catalog);
}

RunResult run_noncontextual(const ExperimentConfig& config, const NonContextualInstance& instance,
                            std::size_t seed_index) {
  const auto start = std::chrono::steady_clock::now();
  auto learner = make_learner(config, instance.catalog);
  MetricRecorder recorder(config, seed_index);
  const SimulationOptions sim = sim_options(config);
  const RankingPolicy best = optimal_ranking(instance.profile, instance.catalog);
  const double optimal = expected_revenue(instance.profile, best, instance.catalog);
  for (std::uint64_t t = 1; t <= config.horizon; ++t) {
    RandomStream rng = RandomStream::derive(config.seed, {stream_tag::kSession, seed_index, t});
    const RankingPolicy policy = learner->choose(t, nullptr);
    const SessionOutcome outcome = simulate_session(instance.profile, policy, rng, sim);
    learner->observe(policy, outcome, nullptr);
    recorder.record(t, optimal, expected_revenue(instance.profile, policy, instance.catalog));
  }
  return recorder.finish(learner->snapshot(), seconds_since(start));
}

RunResult run_contextual(const ExperimentConfig& config, const ContextualInstance& instance,
                         std::size_t seed_index) {
  if (instance.n_consumers() < config.horizon) {
    throw ValidationError("contextual stream is shorter than the horizon");
  }
  const auto start = std::chrono::steady_clock::now();
  auto learner = make_learner(config, instance.catalog);
  MetricRecorder recorder(config, seed_index);
  const SimulationOptions sim = sim_options(config);
  for (std::uint64_t t = 1; t <= config.horizon; ++t) {
    RandomStream rng = RandomStream::derive(config.seed, {stream_tag::kSession, seed_index, t});
    const ContextFeatures features = instance.features(t - 1);
    const ConsumerProfile profile = true_profile(features, instance.coefficients, config.epsilon_q);
    const RankingPolicy policy = learner->choose(t, &features);
    const SessionOutcome outcome = simulate_session(profile, policy, rng, sim);
    learner->observe(policy, outcome, &features);
    const RankingPolicy best = optimal_ranking(profile, instance.catalog);
    recorder.record(t, expected_revenue(profile, best, instance.catalog),
                    expected_revenue(profile, policy, instance.catalog));
  }
  return recorder.finish(learner->snapshot(), seconds_since(start));
}

NonContextualInstance make_noncontextual_instance(const ExperimentConfig& config) {
  RandomStream rng = RandomStream::derive(config.seed, {stream_tag::kInstance});
  return generate_noncontextual_instance(config.n_products, config.q, config.s, config.lambda_max,
                                         config.epsilon_q, rng);
}

ContextualInstance make_contextual_instance(const ExperimentConfig& config) {
  RandomStream rng = RandomStream::derive(config.seed, {stream_tag::kInstance});
  return generate_contextual_stream(config.n_products, config.m_x, config.horizon,
                                    config.lambda_max, config.q_max, config.s_max, rng);
}

namespace {

// Runs every (config, seed) pair against one shared instance.
std::vector<RunResult> run_all(const std::vector<ExperimentConfig>& configs,
                               std::size_t threads) {
  const ExperimentConfig& first = configs.front();
  const std::size_t seeds = first.n_seeds;
  std::vector<RunResult> results(configs.size() * seeds);
  if (first.setting == Setting::noncontextual) {
    const NonContextualInstance instance = make_noncontextual_instance(first);
    parallel_for(results.size(), threads, [&](std::size_t i) {
      results[i] = run_noncontextual(configs[i / seeds], instance, i % seeds);
    });
  } else {
    const ContextualInstance instance = make_contextual_instance(first);
    parallel_for(results.size(), threads, [&](std::size_t i) {
      results[i] = run_contextual(configs[i / seeds], instance, i % seeds);
    });
  }
  return results;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  body(out);
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

}  // namespace

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<RunResult> runs = run_all({config}, config.threads);
  if (!config.output_dir.empty()) {
    ensure_dir(config.output_dir);
    const std::filesystem::path base = std::filesystem::path(config.output_dir) / config.name;
    write_file(base.string() + ".csv", [&](std::ostream& o) { write_summary_csv(o, runs); });
    write_file(base.string() + ".json",
               [&](std::ostream& o) { o << results_to_json(config, runs).dump(2) << '\n'; });
  }
  return runs;
}

void write_summary_csv(std::ostream& out, const std::vector<RunResult>& runs) {
  if (runs.empty()) throw ValidationError("no runs to summarize");
  const auto& checkpoints = runs.front().checkpoints;
  const auto old_precision = out.precision(17);
  out << "t,regret_mean,regret_std,avg_revenue_mean,ratio_mean,seed_count\n";
  const double n = static_cast<double>(runs.size());
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    double regret_sum = 0.0, revenue_sum = 0.0, ratio_sum = 0.0;
    for (const auto& r : runs) {
      regret_sum += r.cumulative_regret.at(c);
      revenue_sum += r.average_revenue.at(c);
      ratio_sum += r.revenue_ratio.at(c);
    }
    const double mean = regret_sum / n;
    double var = 0.0;
    for (const auto& r : runs) var += (r.cumulative_regret[c] - mean) * (r.cumulative_regret[c] - mean);
    const double sd = runs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    out << checkpoints[c] << ',' << mean << ',' << sd << ',' << revenue_sum / n << ','
        << ratio_sum / n << ',' << runs.size() << '\n';
  }
  out.precision(old_precision);
}

nlohmann::json results_to_json(const ExperimentConfig& config, const std::vector<RunResult>& runs) {
  nlohmann::json j;
  j["config"] = experiment_config_to_json(config);
  j["runs"] = nlohmann::json::array();
  for (const auto& r : runs) {
    nlohmann::json run = {{"seed_index", r.seed_index},
                          {"checkpoints", r.checkpoints},
                          {"cumulative_regret", r.cumulative_regret},
                          {"average_revenue", r.average_revenue},
                          {"revenue_ratio", r.revenue_ratio},
                          {"final_regret", r.final_regret()},
                          {"final_estimates", r.final_estimates},
                          {"wall_clock_seconds", r.wall_clock_seconds}};
    if (!r.step_regret.empty()) run["step_regret"] = r.step_regret;
    j["runs"].push_back(std::move(run));
  }
  return j;
}

GridResult grid_search(const ExperimentConfig& base, const GridSpec& grid) {
  base.validate();
  const auto axis = [](const std::vector<double>& values, double fallback) {
    return values.empty() ? std::vector<double>{fallback} : values;
  };
  const auto xl = axis(grid.xi_lambda, base.noncontextual_weights().xi_lambda);
  const auto xq = axis(grid.xi_q, base.noncontextual_weights().xi_q);
  const auto xw = axis(grid.xi_w, base.noncontextual_weights().xi_w);
  const auto dl = axis(grid.delta, base.delta);
  const auto al = axis(grid.alpha, base.alpha_lambda);

  std::vector<ExperimentConfig> configs;
  for (double a : xl)
    for (double b : xq)
      for (double c : xw)
        for (double d : dl)
          for (double e : al) {
            ExperimentConfig cfg = base;
            if (!grid.xi_lambda.empty()) cfg.xi_lambda = a;
            if (!grid.xi_q.empty()) cfg.xi_q = b;
            if (!grid.xi_w.empty()) cfg.xi_w = c;
            cfg.delta = d;
            if (!grid.alpha.empty()) cfg.alpha_lambda = cfg.alpha_q = cfg.alpha_w = e;
            cfg.output_dir.clear();
            cfg.validate();
            configs.push_back(std::move(cfg));
          }

  const std::vector<RunResult> runs = run_all(configs, base.threads);
  GridResult result;
  result.runs = runs.size();
  for (std::size_t c = 0; c < configs.size(); ++c) {
    GridRow row{configs[c], {}, 0.0};
    for (std::size_t s = 0; s < base.n_seeds; ++s) {
      row.final_regrets.push_back(runs[c * base.n_seeds + s].final_regret());
    }
    row.mean_regret = std::accumulate(row.final_regrets.begin(), row.final_regrets.end(), 0.0) /
                      static_cast<double>(row.final_regrets.size());
    result.rows.push_back(std::move(row));
  }
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const GridRow& a, const GridRow& b) { return a.mean_regret < b.mean_regret; });

  if (!base.output_dir.empty()) {
    ensure_dir(base.output_dir);
    const std::filesystem::path path = std::filesystem::path(base.output_dir) / (base.name + "_grid.csv");
    write_file(path, [&](std::ostream& o) { write_grid_csv(o, result); });
  }
  return result;
}

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_grid_csv(std::ostream& out, const GridResult& result) {
  const auto old_precision = out.precision(17);
  out << "rank,algorithm,xi_lambda,xi_q,xi_w,delta,alpha,mean_regret,seed_regrets\n";
  std::size_t rank = 1;
  for (const GridRow& row : result.rows) {
    const ExplorationWeights w = row.config.setting == Setting::contextual
                                     ? ExplorationWeights{row.config.contextual_weights().xi_lambda,
                                                          row.config.contextual_weights().xi_q,
                                                          row.config.contextual_weights().xi_w}
                                     : row.config.noncontextual_weights();
    out << rank++ << ',' << to_string(row.config.algorithm) << ',' << shortest(w.xi_lambda) << ','
        << shortest(w.xi_q) << ',' << shortest(w.xi_w) << ',' << shortest(row.config.delta) << ','
        << shortest(row.config.alpha_lambda) << ',' << row.mean_regret << ',';
    for (std::size_t i = 0; i < row.final_regrets.size(); ++i) {
      out << (i ? ";" : "") << row.final_regrets[i];
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace mpb
