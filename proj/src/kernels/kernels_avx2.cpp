#include "mpb/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define MPB_HAVE_X86 1
#include <immintrin.h>
#else
#define MPB_HAVE_X86 0
#endif

namespace mpb::kernels {

#if MPB_HAVE_X86
namespace {

__attribute__((target("avx2"))) void binomial_step_avx2(const double* prev, double* next,
                                                         std::size_t len, double p) {
  const double keep = 1.0 - p;
  next[0] = keep * prev[0];
  const __m256d vkeep = _mm256_set1_pd(keep);
  const __m256d vp = _mm256_set1_pd(p);
  std::size_t u = 1;
  for (; u + 4 <= len; u += 4) {
    const __m256d cur = _mm256_loadu_pd(prev + u);
    const __m256d lag = _mm256_loadu_pd(prev + u - 1);
    const __m256d r = _mm256_add_pd(_mm256_mul_pd(vkeep, cur), _mm256_mul_pd(vp, lag));
    _mm256_storeu_pd(next + u, r);
  }
  for (; u < len; ++u) next[u] = keep * prev[u] + p * prev[u - 1];
  next[len] = p * prev[len - 1];
}

__attribute__((target("avx2"))) double dot_avx2(const double* a, const double* b,
                                                std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

__attribute__((target("avx2"))) void ranking_scores_avx2(const double* lambda,
                                                         const double* revenue, double* out,
                                                         std::size_t n, double q, double s) {
  const double base = 1.0 - q;
  const double slope = q * (1.0 - s);
  const __m256d vbase = _mm256_set1_pd(base);
  const __m256d vslope = _mm256_set1_pd(slope);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d lam = _mm256_loadu_pd(lambda + k);
    const __m256d num = _mm256_mul_pd(lam, _mm256_loadu_pd(revenue + k));
    const __m256d den = _mm256_add_pd(vbase, _mm256_mul_pd(vslope, lam));
    _mm256_storeu_pd(out + k, _mm256_div_pd(num, den));
  }
  for (; k < n; ++k) out[k] = (lambda[k] * revenue[k]) / (base + slope * lambda[k]);
}

constexpr KernelTable kAvx2{binomial_step_avx2, dot_avx2, ranking_scores_avx2};

}  // namespace

const KernelTable& avx2_table() noexcept { return kAvx2; }

bool avx2_supported() noexcept { return __builtin_cpu_supports("avx2"); }

#else

const KernelTable& avx2_table() noexcept { return scalar_table(); }

bool avx2_supported() noexcept { return false; }

#endif

}  // namespace mpb::kernels
