#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "mpb/kernels.hpp"

namespace mpb::kernels {

bool avx2_supported() noexcept;

namespace {

Backend detect() noexcept {
  if (const char* forced = std::getenv("MPB_KERNELS")) {
    if (std::string_view(forced) == "scalar") return Backend::scalar;
  }
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

}  // namespace

bool backend_available(Backend b) noexcept {
  return b == Backend::scalar || avx2_supported();
}

Backend active_backend() noexcept {
  static const Backend chosen = detect();
  return chosen;
}

std::string_view backend_name(Backend b) noexcept {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

const KernelTable& table(Backend b) noexcept {
  return b == Backend::avx2 ? avx2_table() : scalar_table();
}

const KernelTable& active() noexcept {
  static const KernelTable& t = table(active_backend());
  return t;
}

void binomial_step(std::span<const double> prev, std::span<double> next, double p) {
  if (prev.empty() || next.size() != prev.size() + 1) {
    throw std::invalid_argument("binomial_step: next must hold prev.size() + 1 values");
  }
  active().binomial_step(prev.data(), next.data(), prev.size(), p);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return active().dot(a.data(), b.data(), a.size());
}

void ranking_scores(std::span<const double> lambda, std::span<const double> revenue,
                    std::span<double> out, double q, double s) {
  if (lambda.size() != revenue.size() || out.size() != lambda.size()) {
    throw std::invalid_argument("ranking_scores: length mismatch");
  }
  active().ranking_scores(lambda.data(), revenue.data(), out.data(), lambda.size(), q, s);
}

}  // namespace mpb::kernels
