#include "mpb/kernels.hpp"

namespace mpb::kernels {
namespace {

void binomial_step_scalar(const double* prev, double* next, std::size_t len, double p) {
  const double keep = 1.0 - p;
  next[0] = keep * prev[0];
  for (std::size_t u = 1; u < len; ++u) next[u] = keep * prev[u] + p * prev[u - 1];
  next[len] = p * prev[len - 1];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += a[i] * b[i];
    acc[1] += a[i + 1] * b[i + 1];
    acc[2] += a[i + 2] * b[i + 2];
    acc[3] += a[i + 3] * b[i + 3];
  }
  double sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void ranking_scores_scalar(const double* lambda, const double* revenue, double* out,
                           std::size_t n, double q, double s) {
  const double base = 1.0 - q;
  const double slope = q * (1.0 - s);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = (lambda[k] * revenue[k]) / (base + slope * lambda[k]);
  }
}

constexpr KernelTable kScalar{binomial_step_scalar, dot_scalar, ranking_scores_scalar};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace mpb::kernels
