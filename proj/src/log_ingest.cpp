#include "mpb/log_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "mpb/contextual.hpp"
#include "mpb/ridge.hpp"

namespace mpb {
namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_flag(const std::string& text, bool& out) {
  if (text == "1" || text == "true" || text == "True") {
    out = true;
    return true;
  }
  if (text == "0" || text == "false" || text == "False") {
    out = false;
    return true;
  }
  return false;
}

std::string feature_name(const char* prefix, std::size_t i) {
  return std::string(prefix) + std::to_string(i + 1);
}

}  // namespace

ParsedLog read_log_csv(std::istream& in) {
  ParsedLog log;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("log is empty: missing header row");
  const std::vector<std::string> header = split_row(line);
  static const char* kRequired[] = {"user_id", "timestamp", "product_id", "purchased"};
  if (header.size() < 4) throw ValidationError("log header must start with user_id,timestamp,product_id,purchased");
  for (std::size_t i = 0; i < 4; ++i) {
    if (header[i] != kRequired[i]) {
      throw ValidationError("log header column " + std::to_string(i + 1) + " must be '" +
                            kRequired[i] + "', got '" + header[i] + "'");
    }
  }
  std::size_t col = 4;
  while (col < header.size() && header[col] == feature_name("f_u_", log.schema.user_dims)) {
    ++log.schema.user_dims;
    ++col;
  }
  while (col < header.size() && header[col] == feature_name("f_p_", log.schema.product_dims)) {
    ++log.schema.product_dims;
    ++col;
  }
  if (col != header.size()) {
    throw ValidationError("unexpected log header column '" + header[col] +
                          "'; feature columns must be f_u_1.. then f_p_1..");
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> cells = split_row(line);
    const auto reject = [&](const std::string& why) {
      ++log.rows_skipped;
      log.errors.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    if (cells.size() != header.size()) {
      reject("expected " + std::to_string(header.size()) + " fields, got " +
             std::to_string(cells.size()));
      continue;
    }
    LogRecord rec;
    rec.user_id = cells[0];
    rec.product_id = cells[2];
    if (rec.user_id.empty() || rec.product_id.empty()) {
      reject("empty user_id or product_id");
      continue;
    }
    if (!parse_double(cells[1], rec.timestamp)) {
      reject("bad timestamp '" + cells[1] + "'");
      continue;
    }
    if (!parse_flag(cells[3], rec.purchased)) {
      reject("bad purchased flag '" + cells[3] + "'");
      continue;
    }
    bool ok = true;
    for (std::size_t i = 4; i < cells.size() && ok; ++i) {
      double v = 0.0;
      if (!parse_double(cells[i], v)) {
        reject("bad feature value '" + cells[i] + "' in column " + header[i]);
        ok = false;
        break;
      }
      (i < 4 + log.schema.user_dims ? rec.user_features : rec.product_features).push_back(v);
    }
    if (ok) log.records.push_back(std::move(rec));
  }
  return log;
}

void write_log_csv(std::ostream& out, const std::vector<LogRecord>& records,
                   const LogSchema& schema) {
  out << "user_id,timestamp,product_id,purchased";
  for (std::size_t i = 0; i < schema.user_dims; ++i) out << ',' << feature_name("f_u_", i);
  for (std::size_t i = 0; i < schema.product_dims; ++i) out << ',' << feature_name("f_p_", i);
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const LogRecord& r : records) {
    if (r.user_features.size() != schema.user_dims ||
        r.product_features.size() != schema.product_dims) {
      throw ValidationError("record feature dimensions do not match the log schema");
    }
    out << r.user_id << ',' << r.timestamp << ',' << r.product_id << ',' << (r.purchased ? 1 : 0);
    for (double v : r.user_features) out << ',' << v;
    for (double v : r.product_features) out << ',' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

std::vector<Session> sessionize(std::vector<LogRecord> records, double gap_seconds) {
  std::sort(records.begin(), records.end(), [](const LogRecord& a, const LogRecord& b) {
    return std::tie(a.user_id, a.timestamp, a.product_id, a.purchased, a.user_features,
                    a.product_features) < std::tie(b.user_id, b.timestamp, b.product_id,
                                                   b.purchased, b.user_features,
                                                   b.product_features);
  });
  std::vector<Session> sessions;
  for (LogRecord& rec : records) {
    const bool fresh = sessions.empty() || sessions.back().user_id != rec.user_id ||
                       rec.timestamp - sessions.back().records.back().timestamp > gap_seconds;
    if (fresh) sessions.push_back(Session{rec.user_id, {}});
    sessions.back().records.push_back(std::move(rec));
  }
  return sessions;
}

NonContextualEstimate estimate_noncontextual(const std::vector<Session>& sessions) {
  if (sessions.empty()) throw ValidationError("no sessions to estimate from");
  NonContextualEstimate est;
  std::map<std::string, std::size_t> index;
  for (const Session& s : sessions) {
    for (const LogRecord& r : s.records) index.emplace(r.product_id, 0);
  }
  for (auto& [id, k] : index) {
    k = est.product_ids.size();
    est.product_ids.push_back(id);
  }
  NonContextualStats& st = est.stats;
  st = NonContextualStats(index.size());
  for (const Session& s : sessions) {
    for (std::size_t i = 0; i < s.records.size(); ++i) {
      const LogRecord& r = s.records[i];
      const std::size_t k = index.at(r.product_id);
      const bool continued = i + 1 < s.records.size();
      ++st.views[k];
      if (r.purchased) {
        ++st.buys[k];
        ++st.buy_events;
        st.buy_continues += continued ? 1 : 0;
      } else {
        ++st.skip_events;
        st.skip_continues += continued ? 1 : 0;
      }
    }
  }
  const PointEstimates point = point_estimates(st);
  for (const auto& lam : point.lambda) est.lambdas.push_back(*lam);
  if (!point.q) throw ValidationError("no skip events in the log; q is not identifiable");
  est.q = *point.q;
  if (!point.w) {
    est.warnings.push_back("no purchase events in the log; s set to 0");
    est.w = 0.0;
  } else {
    est.w = *point.w;
  }
  if (est.q == 0.0 && est.w > 0.0) {
    throw ValidationError("inconsistent log: consumers never continue after a skip (q = 0) but do "
                          "continue after purchases");
  }
  est.s = est.q > 0.0 ? est.w / est.q : 0.0;
  if (est.s > 1.0) est.warnings.push_back("estimated s exceeds 1");
  return est;
}

Eigen::VectorXd recover_beta_s(const Eigen::Ref<const Eigen::VectorXd>& beta_w,
                               const Eigen::Ref<const Eigen::VectorXd>& beta_q) {
  const Eigen::Index m = beta_q.size();
  if (beta_w.size() != m * m) throw ValidationError("beta_w must have m^2 entries");
  const double norm2 = beta_q.squaredNorm();
  if (norm2 == 0.0) return Eigen::VectorXd::Zero(m);
  // Row-major reshape: M(i, j) = beta_w[i*m + j].
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      mat(beta_w.data(), m, m);
  return mat.transpose() * beta_q / norm2;
}

ContextualEstimate estimate_contextual(const std::vector<Session>& sessions,
                                       const LogSchema& schema, double ridge_strength) {
  if (!schema.has_features()) {
    throw ValidationError("contextual estimation needs f_u_* and f_p_* feature columns");
  }
  const std::size_t mx = schema.user_dims;
  const std::size_t my = schema.user_dims + schema.product_dims;
  ContextualConfig cfg;
  cfg.alpha_lambda = cfg.alpha_q = cfg.alpha_w = ridge_strength;
  ContextualState state(mx, my, cfg);

  for (const Session& s : sessions) {
    for (std::size_t i = 0; i < s.records.size(); ++i) {
      const LogRecord& r = s.records[i];
      const Eigen::Map<const Eigen::VectorXd> x(r.user_features.data(),
                                                static_cast<Eigen::Index>(r.user_features.size()));
      const Eigen::Map<const Eigen::VectorXd> p(
          r.product_features.data(), static_cast<Eigen::Index>(r.product_features.size()));
      if (x.size() != static_cast<Eigen::Index>(mx) ||
          p.size() != static_cast<Eigen::Index>(schema.product_dims)) {
        throw ValidationError("record feature dimensions do not match the log schema");
      }
      const double next = (i + 1 < s.records.size()) ? 1.0 : 0.0;
      state.lambda.update(joint_feature(x, p), r.purchased ? 1.0 : 0.0);
      if (r.purchased) {
        state.w.update(vec_outer(x, x), next);
      } else {
        state.q.update(x, next);
      }
    }
  }

  ContextualEstimate est;
  est.beta_lambda = solve_beta(state.lambda);
  est.beta_q = solve_beta(state.q);
  est.beta_w = solve_beta(state.w);
  est.beta_s = recover_beta_s(est.beta_w, est.beta_q);
  est.lambda_events = state.lambda.events();
  est.skip_events = state.q.events();
  est.buy_events = state.w.events();
  const auto warn_if_thin = [&](const char* name, std::int64_t events, std::size_t dim) {
    if (events < static_cast<std::int64_t>(dim)) {
      est.warnings.push_back(std::string(name) + ": only " + std::to_string(events) +
                             " events for " + std::to_string(dim) +
                             " coefficients; estimate is dominated by regularization");
    }
  };
  warn_if_thin("beta_lambda", est.lambda_events, my);
  warn_if_thin("beta_q", est.skip_events, mx);
  warn_if_thin("beta_w", est.buy_events, mx * mx);
  return est;
}

FilteredProducts filter_products(const std::vector<ProductEstimate>& candidates,
                                 std::size_t sample_n, RandomStream& rng, double max_price,
                                 double min_lambda) {
  std::vector<ProductEstimate> eligible;
  for (const ProductEstimate& p : candidates) {
    if (p.price <= max_price && p.lambda >= min_lambda) eligible.push_back(p);
  }
  if (eligible.size() < sample_n || sample_n == 0) {
    throw ValidationError("requested " + std::to_string(sample_n) + " products but only " +
                          std::to_string(eligible.size()) + " are eligible");
  }
  // Partial Fisher-Yates; the chosen prefix is restored to input order.
  std::vector<std::size_t> idx(eligible.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < sample_n; ++i) {
    const std::size_t span = idx.size() - i;
    const std::size_t j = i + std::min(span - 1, static_cast<std::size_t>(rng.uniform() * span));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(sample_n);
  std::sort(idx.begin(), idx.end());
  std::vector<ProductEstimate> chosen;
  std::vector<double> prices;
  for (std::size_t i : idx) {
    chosen.push_back(eligible[i]);
    prices.push_back(eligible[i].price);
  }
  return {std::move(chosen), ProductCatalog(std::move(prices))};
}

std::map<std::string, double> read_price_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("price file is empty");
  std::map<std::string, double> prices;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_row(line);
    double v = 0.0;
    if (cells.size() != 2 || !parse_double(cells[1], v) || v < 0.0) {
      throw ValidationError("price file line " + std::to_string(line_no) + ": expected product_id,price");
    }
    prices[cells[0]] = v;
  }
  return prices;
}

std::vector<LogRecord> session_to_records(const std::string& user_id, double start_time,
                                          const RankingPolicy& policy,
                                          const SessionOutcome& outcome,
                                          const std::vector<std::string>& product_ids,
                                          double step_seconds) {
  if (product_ids.size() != policy.size()) throw ValidationError("product id list size mismatch");
  std::vector<LogRecord> out;
  out.reserve(outcome.viewed());
  for (std::size_t pos = 0; pos < outcome.viewed(); ++pos) {
    LogRecord r;
    r.user_id = user_id;
    r.timestamp = start_time + step_seconds * static_cast<double>(pos);
    r.product_id = product_ids[policy.product_at(pos)];
    r.purchased = outcome.purchased(pos);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mpb
