#pragma once

// Data-parallel inner loops of the revenue engine.
//
// Each kernel has a scalar reference implementation and an AVX2 variant.
// The variant is picked once at startup from CPUID; setting the environment
// variable MPB_KERNELS=scalar forces the reference path.
//
// Both backends perform the same IEEE operations in the same order per
// element (no FMA contraction, identical reduction tree), so their results
// are bit-identical. tests/test_kernels.cpp checks this.

#include <cstddef>
#include <span>
#include <string_view>

namespace mpb::kernels {

enum class Backend { scalar, avx2 };

struct KernelTable {
  /// next[u] = (1-p)*prev[u] + p*prev[u-1] for u = 0..len, with out-of-range
  /// prev entries treated as zero. `next` holds len + 1 values.
  void (*binomial_step)(const double* prev, double* next, std::size_t len, double p);
  /// Sum of a[i]*b[i] using four interleaved partial sums combined as
  /// (s0 + s1) + (s2 + s3), then the tail added in order.
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// out[k] = (lambda[k]*revenue[k]) / ((1-q) + (q*(1-s))*lambda[k]).
  void (*ranking_scores)(const double* lambda, const double* revenue, double* out,
                         std::size_t n, double q, double s);
};

const KernelTable& scalar_table() noexcept;
/// Only valid to call when backend_available(Backend::avx2).
const KernelTable& avx2_table() noexcept;

bool backend_available(Backend b) noexcept;
Backend active_backend() noexcept;
std::string_view backend_name(Backend b) noexcept;
const KernelTable& table(Backend b) noexcept;
const KernelTable& active() noexcept;

// Span wrappers on the active backend.
void binomial_step(std::span<const double> prev, std::span<double> next, double p);
double dot(std::span<const double> a, std::span<const double> b);
void ranking_scores(std::span<const double> lambda, std::span<const double> revenue,
                    std::span<double> out, double q, double s);

}  // namespace mpb::kernels
