#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "mpb/revenue.hpp"
#include "oracles.hpp"

using namespace mpb;

namespace {

RankingPolicy identity(std::size_t n) { return RankingPolicy::identity(n); }

RankingPolicy random_policy(std::mt19937_64& gen, std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), gen);
  return RankingPolicy::from_zero_based(order);
}

std::vector<std::size_t> order_of(const RankingPolicy& p) {
  return {p.order().begin(), p.order().end()};
}

// Sum over positions of r * lambda * q^(k-1) * prod_{i<k} (1 - (1-s) lambda_i),
// the purchase-count generating function evaluated at s.
double generating_function_revenue(const oracle::Instance& inst, const std::vector<std::size_t>& order) {
  double total = 0.0, carry = 1.0, qpow = 1.0;
  for (std::size_t k : order) {
    total += inst.revenues[k] * inst.lambdas[k] * qpow * carry;
    carry *= 1.0 - (1.0 - inst.s) * inst.lambdas[k];
    qpow *= inst.q;
  }
  return total;
}

}  // namespace

TEST_CASE("purchase_set_probability examples") {
  const ConsumerProfile one({0.5}, 0.5, 0.5);
  CHECK(purchase_set_probability({}, 1, 1, one, identity(1)) == doctest::Approx(0.5));

  const ConsumerProfile three({0.5, 0.5, 0.5}, 0.5, 0.5);
  const std::vector<std::size_t> q12 = {0, 1};
  CHECK(purchase_set_probability(q12, 3, 2, three, identity(3)) == doctest::Approx(0.25));
  CHECK(oracle::cutoff_set_probability({0.5, 0.5, 0.5}, 3, 2, 0b011) == doctest::Approx(0.25));
  const std::vector<std::size_t> q123 = {0, 1, 2};
  CHECK(purchase_set_probability(q123, 3, 2, three, identity(3)) == 0.0);

  const std::vector<std::size_t> outside = {2};
  CHECK_THROWS_AS(purchase_set_probability(outside, 2, 1, three, identity(3)), ValidationError);
  CHECK_THROWS_AS(purchase_set_probability({}, 0, 1, three, identity(3)), ValidationError);
  CHECK_THROWS_AS(purchase_set_probability({}, 1, 0, three, identity(3)), ValidationError);
}

TEST_CASE("purchase_set_probability matches cutoff enumeration and sums to one") {
  std::mt19937_64 gen(101);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + gen() % 8;
    const auto inst = oracle::random_instance(gen, n);
    const ConsumerProfile profile(inst.lambdas, inst.q, inst.s);
    const RankingPolicy policy = random_policy(gen, n);
    std::vector<double> lam;
    for (std::size_t pos = 0; pos < n; ++pos) lam.push_back(inst.lambdas[policy.product_at(pos)]);
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t b = 1; b <= n + 1; ++b) {
        double sum = 0.0;
        for (unsigned mask = 0; mask < (1u << v); ++mask) {
          std::vector<std::size_t> set;
          for (std::size_t i = 0; i < v; ++i) {
            if (mask >> i & 1u) set.push_back(i);
          }
          const double p = purchase_set_probability(set, v, b, profile, policy);
          REQUIRE(p == doctest::Approx(oracle::cutoff_set_probability(lam, v, b, mask)).epsilon(1e-12));
          sum += p;
        }
        REQUIRE(std::abs(sum - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("purchase count table examples") {
  const PurchaseCountTable t1 = build_purchase_count_table(ConsumerProfile({0.7}, 0.5, 0.5), identity(1));
  CHECK(t1.at(1, 0) == 1.0);

  const PurchaseCountTable t2 =
      build_purchase_count_table(ConsumerProfile({0.3, 0.9}, 0.5, 0.5), identity(2));
  CHECK(t2.at(2, 0) == doctest::Approx(0.7));
  CHECK(t2.at(2, 1) == doctest::Approx(0.3));

  const PurchaseCountTable t3 =
      build_purchase_count_table(ConsumerProfile({0.2, 0.5, 0.1}, 0.5, 0.5), identity(3));
  CHECK(t3.at(3, 1) == doctest::Approx(0.5));
  CHECK(t3.at(3, 0) == doctest::Approx(0.4));
  CHECK(t3.at(3, 2) == doctest::Approx(0.1));
  CHECK_THROWS(t3.at(0, 0));
  CHECK_THROWS(t3.at(3, 3));
}

TEST_CASE("purchase count rows are distributions") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen() % 40;
    const auto inst = oracle::random_instance(gen, n);
    const ConsumerProfile profile(inst.lambdas, inst.q, inst.s);
    const PurchaseCountTable t = build_purchase_count_table(profile, random_policy(gen, n));
    for (std::size_t k = 1; k <= n; ++k) {
      double sum = 0.0;
      for (std::size_t u = 0; u < k; ++u) {
        const double h = t.at(k, u);
        REQUIRE(h >= 0.0);
        REQUIRE(h <= 1.0);
        sum += h;
      }
      REQUIRE(std::abs(sum - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("expected revenue closed-form examples") {
  const ProductCatalog one({2.0});
  for (double q : {0.0, 0.5, 0.95}) {
    for (double s : {0.0, 0.3, 1.0}) {
      CHECK(expected_revenue(ConsumerProfile({0.5}, q, s), identity(1), one) == doctest::Approx(1.0));
      CHECK(brute_force_revenue(ConsumerProfile({0.5}, q, s), identity(1), one) == doctest::Approx(1.0));
    }
  }
  const ProductCatalog cat({0.4, 0.9, 0.6, 0.2});
  const ConsumerProfile myopic({0.3, 0.6, 0.8, 0.1}, 0.0, 0.7);
  const std::vector<std::size_t> order = {3, 1, 2, 4};
  CHECK(expected_revenue(myopic, make_policy(order), cat) == doctest::Approx(0.8 * 0.6));
}

TEST_CASE("DP, brute force, trace enumeration and generating function agree") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 6;
    const auto inst = oracle::random_instance(gen, n);
    const ConsumerProfile profile(inst.lambdas, inst.q, inst.s);
    const ProductCatalog catalog(inst.revenues);
    const RankingPolicy policy = random_policy(gen, n);
    const double dp = expected_revenue(profile, policy, catalog);
    const double trace = oracle::trace_revenue(inst, order_of(policy));
    REQUIRE(std::abs(dp - trace) < 1e-12);
    REQUIRE(std::abs(brute_force_revenue(profile, policy, catalog) - trace) < 1e-12);
    REQUIRE(std::abs(generating_function_revenue(inst, order_of(policy)) - trace) < 1e-12);
  }
  // A fixed mid-size case at the standard parameters.
  oracle::Instance inst{{0.3, 0.8, 0.5, 0.9}, {0.4, 0.2, 0.7, 0.1}, 0.8, 0.6};
  const ConsumerProfile profile(inst.lambdas, inst.q, inst.s);
  const ProductCatalog catalog(inst.revenues);
  CHECK(std::abs(expected_revenue(profile, identity(4), catalog) -
                 brute_force_revenue(profile, identity(4), catalog)) < 1e-9);
}

TEST_CASE("brute force edge cases") {
  // s = 0 reduces to the single-purchase cascade.
  const ConsumerProfile p({0.4, 0.7}, 0.6, 0.0);
  const ProductCatalog c({1.5, 0.8});
  const double cascade = 1.5 * 0.4 + 0.8 * 0.7 * 0.6 * (1.0 - 0.4);
  CHECK(brute_force_revenue(p, identity(2), c) == doctest::Approx(cascade));
  CHECK(expected_revenue(p, identity(2), c) == doctest::Approx(cascade));

  std::vector<double> many(13, 0.1);
  CHECK_THROWS_AS(brute_force_revenue(ConsumerProfile(many, 0.5, 0.5), identity(13), ProductCatalog(many)),
                  ValidationError);
  CHECK_THROWS_AS(expected_revenue(ConsumerProfile({0.1, 0.2}, 0.5, 0.5), identity(3),
                                   ProductCatalog({1.0, 1.0, 1.0})),
                  ValidationError);
}

TEST_CASE("theorem1 score examples") {
  CHECK(theorem1_score(0.0, 3.0, 0.9, 0.5) == 0.0);
  // 1 - 0.9 + 0.9 * 0.5 * 0.3 = 0.235
  CHECK(theorem1_score(0.3, 1.0, 0.9, 0.5) == doctest::Approx(0.3 / (0.1 + 0.135)));
  CHECK(theorem1_score(0.3, 1.0, 0.9, 0.5) == doctest::Approx(1.276596).epsilon(1e-6));
  CHECK(theorem1_score(0.4, 2.0, 0.7, 1.0) == doctest::Approx(0.8 / 0.3));
}

TEST_CASE("optimal ranking examples") {
  const ConsumerProfile same({0.2, 0.2, 0.2}, 0.9, 0.5);
  CHECK(optimal_ranking(same, ProductCatalog({1.0, 1.0, 1.0})) == identity(3));

  const ConsumerProfile two({0.3, 0.1}, 0.9, 0.5);
  const ProductCatalog unit({1.0, 1.0});
  const RankingPolicy best = optimal_ranking(two, unit);
  CHECK(best.one_based_order() == std::vector<std::size_t>{1, 2});
  const std::vector<std::size_t> swapped = {2, 1};
  CHECK(brute_force_revenue(two, best, unit) > brute_force_revenue(two, make_policy(swapped), unit));

  const std::vector<double> lam = {0.5};
  CHECK_THROWS_AS(optimal_ranking(lam, 1.0, 0.5, ProductCatalog({1.0})), ValidationError);
}

TEST_CASE("sorting attains the permutation optimum") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen() % 6;
    const auto inst = oracle::random_instance(gen, n);
    const ConsumerProfile profile(inst.lambdas, inst.q, inst.s);
    const ProductCatalog catalog(inst.revenues);
    const double got = expected_revenue(profile, optimal_ranking(profile, catalog), catalog);
    REQUIRE(got >= oracle::best_permutation_revenue(inst) - 1e-9);
  }
}

TEST_CASE("adjacent swaps of the sorted policy never help") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen() % 15;
    const auto inst = oracle::random_instance(gen, n);
    const ConsumerProfile profile(inst.lambdas, inst.q, inst.s);
    const ProductCatalog catalog(inst.revenues);
    const RankingPolicy best = optimal_ranking(profile, catalog);
    const double base = expected_revenue(profile, best, catalog);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      auto order = order_of(best);
      std::swap(order[i], order[i + 1]);
      REQUIRE(expected_revenue(profile, RankingPolicy::from_zero_based(order), catalog) <= base + 1e-12);
    }
  }
}

TEST_CASE("optimal revenue is monotone in the parameters") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 8;
    const auto inst = oracle::random_instance(gen, n);
    const ProductCatalog catalog(inst.revenues);
    const ConsumerProfile base(inst.lambdas, inst.q, inst.s);
    std::vector<double> lam_hi = inst.lambdas;
    for (auto& l : lam_hi) l += (1.0 - l) * u01(gen);
    const double q_hi = inst.q + (0.95 - inst.q) * u01(gen);
    const double w_hi = inst.q * inst.s + (q_hi - inst.q * inst.s) * u01(gen);
    const ConsumerProfile raised(lam_hi, q_hi, q_hi > 0.0 ? std::min(1.0, w_hi / q_hi) : 0.0);
    const RankingPolicy sigma = optimal_ranking(base, catalog);
    REQUIRE(expected_revenue(raised, sigma, catalog) >= expected_revenue(base, sigma, catalog) - 1e-12);
  }
}

TEST_CASE("with s = 0 the ranking matches the single-purchase score") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen() % 20;
    auto inst = oracle::random_instance(gen, n);
    std::vector<double> scores(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double l = inst.lambdas[k];
      scores[k] = l * inst.revenues[k] / (1.0 - inst.q + inst.q * l);
    }
    const RankingPolicy expected = rank_by_scores(scores);
    CHECK(optimal_ranking(inst.lambdas, inst.q, 0.0, ProductCatalog(inst.revenues)) == expected);
  }
}
