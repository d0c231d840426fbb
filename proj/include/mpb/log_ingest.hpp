#pragma once

// Interaction-log ingestion for semi-synthetic experiments: CSV parsing,
// sessionization at inactivity gaps, and parameter estimation.
//
// CSV schema (header row required):
//   user_id,timestamp,product_id,purchased[,f_u_1..f_u_mx][,f_p_1..f_p_k]
// f_u_* columns hold consumer features, f_p_* columns product features.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mpb/model.hpp"
#include "mpb/noncontextual.hpp"
#include "mpb/rng.hpp"

namespace mpb {

struct LogRecord {
  std::string user_id;
  double timestamp = 0.0;  // seconds since epoch
  std::string product_id;
  bool purchased = false;
  std::vector<double> user_features;
  std::vector<double> product_features;
};

struct LogSchema {
  std::size_t user_dims = 0;
  std::size_t product_dims = 0;

  bool has_features() const noexcept { return user_dims > 0 && product_dims > 0; }
};

struct ParsedLog {
  LogSchema schema;
  std::vector<LogRecord> records;
  std::size_t rows_skipped = 0;
  std::vector<std::string> errors;  // "line N: reason", one per skipped row
};

/// Malformed data rows are skipped and reported; a malformed header throws.
ParsedLog read_log_csv(std::istream& in);
void write_log_csv(std::ostream& out, const std::vector<LogRecord>& records,
                   const LogSchema& schema);

struct Session {
  std::string user_id;
  std::vector<LogRecord> records;  // sorted by timestamp
};

inline constexpr double kDefaultSessionGapSeconds = 600.0;

/// Per user, sorted by time, a new session starts whenever the gap to the
/// previous record is strictly greater than gap_seconds. Output is ordered by
/// user id, then start time, independent of input order.
std::vector<Session> sessionize(std::vector<LogRecord> records,
                                double gap_seconds = kDefaultSessionGapSeconds);

struct NonContextualEstimate {
  std::vector<std::string> product_ids;  // sorted
  std::vector<double> lambdas;           // aligned with product_ids
  double q = 0.0;
  double s = 0.0;
  double w = 0.0;
  NonContextualStats stats;
  std::vector<std::string> warnings;
};

/// Each record is a view; the flag is the purchase draw; whether another record
/// follows in the same session is the continuation draw. The final record of a
/// session counts as an observed stop.
NonContextualEstimate estimate_noncontextual(const std::vector<Session>& sessions);

struct ContextualEstimate {
  Eigen::VectorXd beta_lambda;
  Eigen::VectorXd beta_q;
  Eigen::VectorXd beta_w;
  Eigen::VectorXd beta_s;  // rank-1 factor of beta_w against beta_q
  std::int64_t lambda_events = 0;
  std::int64_t skip_events = 0;
  std::int64_t buy_events = 0;
  std::vector<std::string> warnings;
};

ContextualEstimate estimate_contextual(const std::vector<Session>& sessions,
                                       const LogSchema& schema, double ridge_strength = 1.0);

/// Least-squares b minimizing ||reshape(beta_w) - beta_q b^T||_F, where
/// reshape is the row-major m x m view of beta_w.
Eigen::VectorXd recover_beta_s(const Eigen::Ref<const Eigen::VectorXd>& beta_w,
                               const Eigen::Ref<const Eigen::VectorXd>& beta_q);

struct ProductEstimate {
  std::string product_id;
  double price = 0.0;
  double lambda = 0.0;
};

struct FilteredProducts {
  std::vector<ProductEstimate> products;
  ProductCatalog catalog;  // prices as revenues, aligned with products
};

/// Keeps products with price <= max_price and lambda >= min_lambda, then draws
/// sample_n of them uniformly without replacement.
FilteredProducts filter_products(const std::vector<ProductEstimate>& candidates, std::size_t sample_n,
                                 RandomStream& rng, double max_price = 200.0,
                                 double min_lambda = 0.1);

/// product_id,price rows with a header line.
std::map<std::string, double> read_price_csv(std::istream& in);

/// Log rows for one simulated session, one record per viewed position spaced
/// `step_seconds` apart starting at `start_time`.
std::vector<LogRecord> session_to_records(const std::string& user_id, double start_time,
                                          const RankingPolicy& policy,
                                          const SessionOutcome& outcome,
                                          const std::vector<std::string>& product_ids,
                                          double step_seconds = 30.0);

}  // namespace mpb
