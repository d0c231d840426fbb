#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpb/config_io.hpp"
#include "mpb/consumer_sim.hpp"
#include "mpb/experiment.hpp"
#include "mpb/kernels.hpp"
#include "mpb/log_ingest.hpp"
#include "mpb/revenue.hpp"

namespace {

using nlohmann::json;

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--seed", common.seed, "Base random seed (overrides the config)");
  cmd->add_option("--threads", common.threads, "Worker threads for independent runs")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", common.out, "Output directory for CSV and JSON results");
}

std::filesystem::path out_path(const std::string& dir, const std::string& file) {
  std::filesystem::create_directories(dir);
  return std::filesystem::path(dir) / file;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string join_one_based(const std::vector<std::size_t>& order) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < order.size(); ++i) ss << (i ? " " : "") << order[i];
  return ss.str();
}

mpb::ModelConfig load_model(const std::string& path, const CommonOptions& common) {
  mpb::ModelConfig model = mpb::model_config_from_json(mpb::load_json_file(path));
  if (common.seed) model.seed = *common.seed;
  return model;
}

int cmd_simulate(const std::string& config, std::size_t sessions, const std::string& log_out,
                 const CommonOptions& common) {
  const mpb::ModelConfig model = load_model(config, common);
  const mpb::ProductCatalog catalog = model.catalog();
  const mpb::ConsumerProfile profile = model.profile();
  const mpb::RankingPolicy policy = model.ranking ? model.policy() : mpb::optimal_ranking(profile, catalog);

  std::ostringstream trace;
  trace << std::setprecision(17);
  trace << "session,position,product,purchased,continued\n";
  std::vector<mpb::LogRecord> log;
  std::vector<std::string> ids(catalog.size());
  for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = "p" + std::to_string(k + 1);

  double total_revenue = 0.0;
  std::size_t total_views = 0, total_buys = 0;
  for (std::size_t i = 0; i < sessions; ++i) {
    mpb::RandomStream rng = mpb::RandomStream::derive(model.seed, {mpb::stream_tag::kSession, 0, i});
    const mpb::SessionOutcome outcome = mpb::simulate_session(profile, policy, rng);
    for (std::size_t pos = 0; pos < outcome.viewed(); ++pos) {
      const auto next = outcome.continuation(pos);
      trace << i + 1 << ',' << pos + 1 << ',' << policy.product_at(pos) + 1 << ','
            << outcome.purchased(pos) << ',' << (next ? (*next ? "1" : "0") : "") << '\n';
    }
    total_revenue += mpb::realized_revenue(outcome, policy, catalog);
    total_views += outcome.viewed();
    total_buys += outcome.purchase_count();
    if (!log_out.empty()) {
      // Sessions are an hour apart so sessionization recovers them exactly.
      auto rows = mpb::session_to_records("u" + std::to_string(i % 1000), 3600.0 * static_cast<double>(i),
                                          policy, outcome, ids);
      log.insert(log.end(), rows.begin(), rows.end());
    }
  }

  const json summary = {{"sessions", sessions},
                        {"ranking", policy.one_based_order()},
                        {"mean_realized_revenue", total_revenue / static_cast<double>(sessions)},
                        {"expected_revenue", mpb::expected_revenue(profile, policy, catalog)},
                        {"views", total_views},
                        {"purchases", total_buys}};
  if (common.out.empty()) {
    std::cout << trace.str();
    std::cerr << summary.dump(2) << '\n';
  } else {
    write_text(out_path(common.out, "simulate.csv"), trace.str());
    write_text(out_path(common.out, "simulate.json"), summary.dump(2) + "\n");
    std::cout << summary.dump(2) << '\n';
  }
  if (!log_out.empty()) {
    std::ofstream out(log_out);
    if (!out) throw std::runtime_error("cannot open '" + log_out + "' for writing");
    mpb::write_log_csv(out, log, {});
  }
  return 0;
}

int cmd_rank(const std::string& config, const CommonOptions& common) {
  const mpb::ModelConfig model = load_model(config, common);
  const mpb::ProductCatalog catalog = model.catalog();
  const mpb::ConsumerProfile profile = model.profile();
  const mpb::RankingPolicy best = mpb::optimal_ranking(profile, catalog);
  std::vector<double> scores(catalog.size());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    scores[k] = mpb::theorem1_score(profile.lambda(k), catalog.revenue(k), profile.q(), profile.s());
  }
  const double revenue = mpb::expected_revenue(profile, best, catalog);
  const json result = {{"ranking", best.one_based_order()},
                       {"scores", scores},
                       {"expected_revenue", revenue},
                       {"kernels", std::string(mpb::kernels::backend_name(mpb::kernels::active_backend()))}};
  std::cout << "ranking: " << join_one_based(best.one_based_order()) << '\n'
            << "expected_revenue: " << std::setprecision(17) << revenue << '\n';
  if (!common.out.empty()) {
    std::ostringstream csv;
    csv << std::setprecision(17) << "position,product,score,revenue,lambda\n";
    for (std::size_t pos = 0; pos < best.size(); ++pos) {
      const std::size_t k = best.product_at(pos);
      csv << pos + 1 << ',' << k + 1 << ',' << scores[k] << ',' << catalog.revenue(k) << ','
          << profile.lambda(k) << '\n';
    }
    write_text(out_path(common.out, "rank.csv"), csv.str());
    write_text(out_path(common.out, "rank.json"), result.dump(2) + "\n");
  }
  return 0;
}

int cmd_oracle(const std::string& config, const CommonOptions& common) {
  const mpb::ModelConfig model = load_model(config, common);
  const mpb::ProductCatalog catalog = model.catalog();
  const mpb::ConsumerProfile profile = model.profile();
  const mpb::RankingPolicy policy = model.policy();
  if (catalog.size() > mpb::kBruteForceMaxProducts) {
    throw mpb::ValidationError("oracle enumeration supports at most " +
                               std::to_string(mpb::kBruteForceMaxProducts) + " products");
  }
  const double dp = mpb::expected_revenue(profile, policy, catalog);
  const double brute = mpb::brute_force_revenue(profile, policy, catalog);

  // Exhaustive search over permutations confirms the sorted ranking is optimal.
  json best_perm;
  double best_value = -1.0;
  if (catalog.size() <= 8) {
    std::vector<std::size_t> order(catalog.size());
    std::iota(order.begin(), order.end(), 0);
    do {
      const auto p = mpb::RankingPolicy::from_zero_based(order);
      const double v = mpb::expected_revenue(profile, p, catalog);
      if (v > best_value) {
        best_value = v;
        best_perm = p.one_based_order();
      }
    } while (std::next_permutation(order.begin(), order.end()));
  }
  const mpb::RankingPolicy sorted = mpb::optimal_ranking(profile, catalog);
  const double sorted_value = mpb::expected_revenue(profile, sorted, catalog);
  json result = {{"ranking", policy.one_based_order()},
                 {"dp_revenue", dp},
                 {"brute_force_revenue", brute},
                 {"abs_difference", std::abs(dp - brute)},
                 {"sorted_ranking", sorted.one_based_order()},
                 {"sorted_revenue", sorted_value}};
  if (best_value >= 0.0) {
    result["best_permutation"] = best_perm;
    result["best_permutation_revenue"] = best_value;
  }
  std::cout << result.dump(2) << '\n';
  if (!common.out.empty()) write_text(out_path(common.out, "oracle.json"), result.dump(2) + "\n");
  const bool ok = std::abs(dp - brute) < 1e-9 && (best_value < 0.0 || sorted_value >= best_value - 1e-9);
  return ok ? 0 : 2;
}

mpb::ExperimentConfig load_experiment(const json& j, const CommonOptions& common) {
  mpb::ExperimentConfig cfg = mpb::experiment_config_from_json(j);
  if (common.seed) cfg.seed = *common.seed;
  if (common.threads) cfg.threads = *common.threads;
  if (!common.out.empty()) cfg.output_dir = common.out;
  cfg.validate();
  return cfg;
}

int cmd_experiment(const std::string& config, const CommonOptions& common) {
  const mpb::ExperimentConfig cfg = load_experiment(mpb::load_json_file(config), common);
  const auto runs = mpb::run_experiment(cfg);
  if (cfg.output_dir.empty()) {
    mpb::write_summary_csv(std::cout, runs);
  } else {
    std::cout << "wrote " << (std::filesystem::path(cfg.output_dir) / (cfg.name + ".csv")).string()
              << " and .json\n";
  }
  return 0;
}

int cmd_grid(const std::string& config, const CommonOptions& common) {
  const json j = mpb::load_json_file(config);
  if (!j.is_object() || !j.contains("base") || !j.contains("grid")) {
    throw mpb::ValidationError("grid file needs 'base' and 'grid' objects");
  }
  const mpb::ExperimentConfig base = load_experiment(j.at("base"), common);
  const mpb::GridSpec grid = mpb::grid_spec_from_json(j.at("grid"));
  const mpb::GridResult result = mpb::grid_search(base, grid);
  if (base.output_dir.empty()) mpb::write_grid_csv(std::cout, result);
  const mpb::GridRow& best = result.best();
  json summary = {{"runs", result.runs},
                  {"configurations", result.rows.size()},
                  {"best", mpb::experiment_config_to_json(best.config)},
                  {"best_mean_regret", best.mean_regret},
                  {"best_seed_regrets", best.final_regrets}};
  if (!base.output_dir.empty()) {
    write_text(out_path(base.output_dir, base.name + "_grid.json"), summary.dump(2) + "\n");
  }
  std::cerr << summary.dump(2) << '\n';
  return 0;
}

int cmd_ingest(const std::string& log_path, const std::string& prices_path, bool contextual,
               double gap, std::size_t sample_n, double max_price, double min_lambda,
               double ridge, const CommonOptions& common) {
  std::ifstream in(log_path);
  if (!in) throw std::runtime_error("cannot open '" + log_path + "'");
  const mpb::ParsedLog parsed = mpb::read_log_csv(in);
  for (const auto& e : parsed.errors) std::cerr << log_path << ": " << e << '\n';
  const auto sessions = mpb::sessionize(parsed.records, gap);

  json result = {{"records", parsed.records.size()},
                 {"rows_skipped", parsed.rows_skipped},
                 {"sessions", sessions.size()}};
  std::ostringstream csv;
  csv << std::setprecision(17);

  if (contextual) {
    const mpb::ContextualEstimate est = mpb::estimate_contextual(sessions, parsed.schema, ridge);
    const auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    result["beta_lambda"] = vec(est.beta_lambda);
    result["beta_q"] = vec(est.beta_q);
    result["beta_w"] = vec(est.beta_w);
    result["beta_s"] = vec(est.beta_s);
    result["lambda_events"] = est.lambda_events;
    result["skip_events"] = est.skip_events;
    result["buy_events"] = est.buy_events;
    result["warnings"] = est.warnings;
    csv << "coefficient,index,value\n";
    const auto emit = [&](const char* name, const Eigen::VectorXd& v) {
      for (Eigen::Index i = 0; i < v.size(); ++i) csv << name << ',' << i + 1 << ',' << v[i] << '\n';
    };
    emit("beta_lambda", est.beta_lambda);
    emit("beta_q", est.beta_q);
    emit("beta_w", est.beta_w);
    emit("beta_s", est.beta_s);
  } else {
    const mpb::NonContextualEstimate est = mpb::estimate_noncontextual(sessions);
    result["product_ids"] = est.product_ids;
    result["lambdas"] = est.lambdas;
    result["q"] = est.q;
    result["s"] = est.s;
    result["w"] = est.w;
    result["skip_events"] = est.stats.skip_events;
    result["buy_events"] = est.stats.buy_events;
    result["warnings"] = est.warnings;
    csv << "product_id,views,purchases,lambda\n";
    for (std::size_t k = 0; k < est.product_ids.size(); ++k) {
      csv << est.product_ids[k] << ',' << est.stats.views[k] << ',' << est.stats.buys[k] << ','
          << est.lambdas[k] << '\n';
    }
    if (!prices_path.empty()) {
      std::ifstream pin(prices_path);
      if (!pin) throw std::runtime_error("cannot open '" + prices_path + "'");
      const auto prices = mpb::read_price_csv(pin);
      std::vector<mpb::ProductEstimate> candidates;
      for (std::size_t k = 0; k < est.product_ids.size(); ++k) {
        const auto it = prices.find(est.product_ids[k]);
        if (it != prices.end()) candidates.push_back({est.product_ids[k], it->second, est.lambdas[k]});
      }
      mpb::RandomStream rng = mpb::RandomStream::derive(common.seed.value_or(0),
                                                        {mpb::stream_tag::kProductSample});
      const auto filtered = mpb::filter_products(candidates, sample_n, rng, max_price, min_lambda);
      json products = json::array();
      for (const auto& p : filtered.products) {
        products.push_back({{"product_id", p.product_id}, {"price", p.price}, {"lambda", p.lambda}});
      }
      result["selected_products"] = products;
    }
  }

  if (common.out.empty()) {
    std::cout << csv.str();
    std::cerr << result.dump(2) << '\n';
  } else {
    write_text(out_path(common.out, "ingest.csv"), csv.str());
    write_text(out_path(common.out, "ingest.json"), result.dump(2) + "\n");
    std::cout << result.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ranking and online learning under the multiple-purchase-with-budget choice model"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string config;

  auto* simulate = app.add_subcommand("simulate", "Simulate consumer sessions on a fixed ranking");
  std::size_t sessions = 1;
  std::string log_out;
  simulate->add_option("--config", config, "Model JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--sessions", sessions, "Number of sessions")->check(CLI::PositiveNumber);
  simulate->add_option("--log-out", log_out, "Also write the sessions as an interaction log CSV");
  add_common(simulate, common);

  auto* rank = app.add_subcommand("rank", "Print the optimal ranking for given parameters");
  rank->add_option("--config", config, "Model JSON")->required()->check(CLI::ExistingFile);
  add_common(rank, common);

  auto* experiment = app.add_subcommand("experiment", "Run a multi-seed regret experiment");
  experiment->add_option("--config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  add_common(experiment, common);

  auto* grid = app.add_subcommand("grid", "Grid search over exploration parameters");
  grid->add_option("--config", config, "Grid JSON")->required()->check(CLI::ExistingFile);
  add_common(grid, common);

  auto* ingest = app.add_subcommand("ingest", "Estimate model parameters from an interaction log");
  std::string log_path, prices_path;
  bool contextual = false;
  double gap = mpb::kDefaultSessionGapSeconds;
  std::size_t sample_n = 50;
  double max_price = 200.0, min_lambda = 0.1, ridge = 1.0;
  ingest->add_option("--log", log_path, "Log CSV")->required()->check(CLI::ExistingFile);
  ingest->add_option("--prices", prices_path, "product_id,price CSV for product selection")
      ->check(CLI::ExistingFile);
  ingest->add_flag("--contextual", contextual, "Fit the linear contextual model");
  ingest->add_option("--gap", gap, "Session inactivity gap in seconds");
  ingest->add_option("--sample", sample_n, "Products to keep after filtering");
  ingest->add_option("--max-price", max_price, "Price ceiling for product selection");
  ingest->add_option("--min-lambda", min_lambda, "Purchase probability floor for product selection");
  ingest->add_option("--ridge", ridge, "Ridge strength for the contextual fit");
  add_common(ingest, common);

  auto* oracle = app.add_subcommand("oracle", "Check the revenue DP against brute-force enumeration");
  oracle->add_option("--config", config, "Model JSON")->required()->check(CLI::ExistingFile);
  add_common(oracle, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(config, sessions, log_out, common);
    if (*rank) return cmd_rank(config, common);
    if (*experiment) return cmd_experiment(config, common);
    if (*grid) return cmd_grid(config, common);
    if (*ingest) {
      return cmd_ingest(log_path, prices_path, contextual, gap, sample_n, max_price, min_lambda,
                        ridge, common);
    }
    if (*oracle) return cmd_oracle(config, common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
