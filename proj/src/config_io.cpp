#include "mpb/config_io.hpp"

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string_view>

namespace mpb {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed,
                    std::string_view what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ValidationError("unknown key '" + key + "' in " + std::string(what));
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
void read_if(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T value{};
  read_if(j, key, value);
  out = value;
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing key '") + key + "'");
  T value{};
  read_if(j, key, value);
  return value;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.cols(); ++k) row[static_cast<std::size_t>(k)] = m(i, k);
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vector_from(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

RankingPolicy ModelConfig::policy() const {
  if (!ranking) return RankingPolicy::identity(revenues.size());
  if (ranking->size() != revenues.size()) {
    throw ValidationError("ranking length does not match the number of products");
  }
  return make_policy(*ranking);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

ModelConfig model_config_from_json(const json& j) {
  reject_unknown(j, {"revenues", "lambdas", "q", "s", "epsilon_q", "seed", "ranking"}, "model config");
  ModelConfig c;
  c.revenues = require<std::vector<double>>(j, "revenues");
  c.lambdas = require<std::vector<double>>(j, "lambdas");
  c.q = require<double>(j, "q");
  c.s = require<double>(j, "s");
  read_if(j, "epsilon_q", c.epsilon_q);
  read_if(j, "seed", c.seed);
  read_if(j, "ranking", c.ranking);
  if (c.revenues.size() != c.lambdas.size()) {
    throw ValidationError("revenues and lambdas must have the same length");
  }
  // Construct once to surface range errors at load time.
  (void)c.catalog();
  (void)c.profile();
  (void)c.policy();
  return c;
}

json model_config_to_json(const ModelConfig& c) {
  json j = {{"revenues", c.revenues}, {"lambdas", c.lambdas}, {"q", c.q},
            {"s", c.s},               {"epsilon_q", c.epsilon_q}, {"seed", c.seed}};
  if (c.ranking) j["ranking"] = *c.ranking;
  return j;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  reject_unknown(j,
                 {"name", "setting", "n_products", "horizon", "n_seeds", "seed", "q", "s",
                  "lambda_max", "q_max", "s_max", "m_x", "algorithm", "xi_lambda", "xi_q", "xi_w",
                  "delta", "alpha_lambda", "alpha_q", "alpha_w", "alpha", "epsilon_q", "u_bound",
                  "n_checkpoints", "threads", "output_dir", "observe_at_list_end",
                  "dump_full_series"},
                 "experiment config");
  ExperimentConfig c;
  read_if(j, "name", c.name);
  if (j.contains("setting")) c.setting = parse_setting(require<std::string>(j, "setting"));
  read_if(j, "n_products", c.n_products);
  read_if(j, "horizon", c.horizon);
  read_if(j, "n_seeds", c.n_seeds);
  read_if(j, "seed", c.seed);
  read_if(j, "q", c.q);
  read_if(j, "s", c.s);
  read_if(j, "lambda_max", c.lambda_max);
  read_if(j, "q_max", c.q_max);
  read_if(j, "s_max", c.s_max);
  read_if(j, "m_x", c.m_x);
  if (j.contains("algorithm")) c.algorithm = parse_algorithm(require<std::string>(j, "algorithm"));
  read_if(j, "xi_lambda", c.xi_lambda);
  read_if(j, "xi_q", c.xi_q);
  read_if(j, "xi_w", c.xi_w);
  read_if(j, "delta", c.delta);
  if (j.contains("alpha")) {
    const double a = require<double>(j, "alpha");
    c.alpha_lambda = c.alpha_q = c.alpha_w = a;
  }
  read_if(j, "alpha_lambda", c.alpha_lambda);
  read_if(j, "alpha_q", c.alpha_q);
  read_if(j, "alpha_w", c.alpha_w);
  read_if(j, "epsilon_q", c.epsilon_q);
  read_if(j, "u_bound", c.u_bound);
  read_if(j, "n_checkpoints", c.n_checkpoints);
  read_if(j, "threads", c.threads);
  read_if(j, "output_dir", c.output_dir);
  read_if(j, "observe_at_list_end", c.observe_at_list_end);
  read_if(j, "dump_full_series", c.dump_full_series);
  c.validate();
  return c;
}

json experiment_config_to_json(const ExperimentConfig& c) {
  json j = {{"name", c.name},
            {"setting", std::string(to_string(c.setting))},
            {"n_products", c.n_products},
            {"horizon", c.horizon},
            {"n_seeds", c.n_seeds},
            {"seed", c.seed},
            {"algorithm", std::string(to_string(c.algorithm))},
            {"delta", c.delta},
            {"alpha_lambda", c.alpha_lambda},
            {"alpha_q", c.alpha_q},
            {"alpha_w", c.alpha_w},
            {"epsilon_q", c.epsilon_q},
            {"u_bound", c.u_bound},
            {"n_checkpoints", c.n_checkpoints},
            {"threads", c.threads},
            {"output_dir", c.output_dir},
            {"observe_at_list_end", c.observe_at_list_end},
            {"dump_full_series", c.dump_full_series},
            {"lambda_max", c.lambda_max}};
  if (c.setting == Setting::noncontextual) {
    j["q"] = c.q;
    j["s"] = c.s;
  } else {
    j["q_max"] = c.q_max;
    j["s_max"] = c.s_max;
    j["m_x"] = c.m_x;
  }
  if (c.xi_lambda) j["xi_lambda"] = *c.xi_lambda;
  if (c.xi_q) j["xi_q"] = *c.xi_q;
  if (c.xi_w) j["xi_w"] = *c.xi_w;
  return j;
}

GridSpec grid_spec_from_json(const json& j) {
  reject_unknown(j, {"xi_lambda", "xi_q", "xi_w", "delta", "alpha"}, "grid");
  GridSpec g;
  read_if(j, "xi_lambda", g.xi_lambda);
  read_if(j, "xi_q", g.xi_q);
  read_if(j, "xi_w", g.xi_w);
  read_if(j, "delta", g.delta);
  read_if(j, "alpha", g.alpha);
  return g;
}

json grid_spec_to_json(const GridSpec& g) {
  return {{"xi_lambda", g.xi_lambda}, {"xi_q", g.xi_q}, {"xi_w", g.xi_w},
          {"delta", g.delta},         {"alpha", g.alpha}};
}

json noncontextual_state_to_json(const NonContextualState& state) {
  const auto& st = state.stats;
  return {{"round", state.round},
          {"views", st.views},
          {"buys", st.buys},
          {"skip_events", st.skip_events},
          {"skip_continues", st.skip_continues},
          {"buy_events", st.buy_events},
          {"buy_continues", st.buy_continues},
          {"estimates",
           {{"lambdas", state.estimates.lambda},
            {"q", state.estimates.q},
            {"w", state.estimates.w}}}};
}

NonContextualState noncontextual_state_from_json(const json& j, const GlobalConfig& config) {
  const auto views = require<std::vector<std::int64_t>>(j, "views");
  NonContextualState state(views.size(), config);
  state.round = require<std::uint64_t>(j, "round");
  state.stats.views = views;
  state.stats.buys = require<std::vector<std::int64_t>>(j, "buys");
  state.stats.skip_events = require<std::int64_t>(j, "skip_events");
  state.stats.skip_continues = require<std::int64_t>(j, "skip_continues");
  state.stats.buy_events = require<std::int64_t>(j, "buy_events");
  state.stats.buy_continues = require<std::int64_t>(j, "buy_continues");
  if (state.stats.buys.size() != views.size()) throw ValidationError("views and buys differ in length");
  if (j.contains("estimates")) {
    const json& e = j.at("estimates");
    state.estimates.lambda = require<std::vector<double>>(e, "lambdas");
    state.estimates.q = require<double>(e, "q");
    state.estimates.w = require<double>(e, "w");
    if (state.estimates.lambda.size() != views.size()) {
      throw ValidationError("estimate length does not match the statistics");
    }
  }
  return state;
}

json ridge_state_to_json(const RidgeState& state) {
  return {{"alpha", state.alpha()},
          {"events", state.events()},
          {"sigma", matrix_to_json(state.sigma())},
          {"rho", std::vector<double>(state.rho().data(), state.rho().data() + state.rho().size())}};
}

RidgeState ridge_state_from_json(const json& j) {
  const auto rho = require<std::vector<double>>(j, "rho");
  const auto rows = require<std::vector<std::vector<double>>>(j, "sigma");
  const auto d = static_cast<Eigen::Index>(rho.size());
  if (static_cast<Eigen::Index>(rows.size()) != d) throw ValidationError("sigma has the wrong size");
  Eigen::MatrixXd sigma(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != d) throw ValidationError("sigma is not square");
    for (Eigen::Index k = 0; k < d; ++k) sigma(i, k) = row[static_cast<std::size_t>(k)];
  }
  return RidgeState(std::move(sigma), vector_from(rho), require<double>(j, "alpha"),
                    require<std::int64_t>(j, "events"));
}

json contextual_state_to_json(const ContextualState& state) {
  return {{"round", state.round},
          {"lambda", ridge_state_to_json(state.lambda)},
          {"q", ridge_state_to_json(state.q)},
          {"w", ridge_state_to_json(state.w)}};
}

ContextualState contextual_state_from_json(const json& j, const ContextualConfig& config) {
  RidgeState lambda = ridge_state_from_json(j.at("lambda"));
  RidgeState q = ridge_state_from_json(j.at("q"));
  RidgeState w = ridge_state_from_json(j.at("w"));
  if (w.dim() != q.dim() * q.dim()) throw ValidationError("w state must have dimension m_x^2");
  ContextualState state(q.dim(), lambda.dim(), config);
  state.lambda = std::move(lambda);
  state.q = std::move(q);
  state.w = std::move(w);
  state.round = require<std::uint64_t>(j, "round");
  return state;
}

}  // namespace mpb
