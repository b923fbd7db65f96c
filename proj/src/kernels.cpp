#include "slfnet/kernels.hpp"

#include <atomic>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace slfnet::kernels {
namespace {

#if defined(_OPENMP)
std::atomic<Exec> g_default{Exec::Parallel};
#else
std::atomic<Exec> g_default{Exec::Serial};
#endif

inline void matmul_row(const double* a, const double* b, double* c, std::size_t i, std::size_t k,
                       std::size_t n) {
  double* ci = c + i * n;
  for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
  const double* ai = a + i * k;
  for (std::size_t p = 0; p < k; ++p) {
    const double av = ai[p];
    const double* bp = b + p * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
  }
}

inline void acc_bt_row(const double* a, const double* b, double* c, std::size_t i, std::size_t n,
                       std::size_t k) {
  const double* ai = a + i * n;
  double* ci = c + i * k;
  for (std::size_t p = 0; p < k; ++p) {
    const double* bp = b + p * n;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += ai[j] * bp[j];
    ci[p] += s;
  }
}

// Row p of aᵀ·b; accumulates over i in ascending order.
inline void acc_at_row(const double* a, const double* b, double* c, std::size_t p, std::size_t m,
                       std::size_t k, std::size_t n) {
  double* cp = c + p * n;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += a[i * k + p] * b[i * n + j];
    cp[j] += s;
  }
}

}  // namespace

void set_default_exec(Exec exec) noexcept { g_default.store(exec); }
Exec default_exec() noexcept { return g_default.load(); }

bool openmp_enabled() noexcept {
#if defined(_OPENMP)
  return true;
#else
  return false;
#endif
}

int max_threads() noexcept {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Exec auto_exec(std::size_t m, std::size_t k, std::size_t n) noexcept {
  if (default_exec() == Exec::Serial || m < 2) return Exec::Serial;
  return m * k * n >= kParallelThreshold ? Exec::Parallel : Exec::Serial;
}

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n, Exec exec) {
  const double* ap = a.data();
  const double* bp = b.data();
  double* cp = c.data();
  const auto rows = static_cast<long long>(m);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < rows; ++i) matmul_row(ap, bp, cp, static_cast<std::size_t>(i), k, n);
  } else {
    for (std::size_t i = 0; i < m; ++i) matmul_row(ap, bp, cp, i, k, n);
  }
}

void matmul_acc_bt(std::span<const double> a, std::span<const double> b, std::span<double> c,
                   std::size_t m, std::size_t n, std::size_t k, Exec exec) {
  const double* ap = a.data();
  const double* bp = b.data();
  double* cp = c.data();
  const auto rows = static_cast<long long>(m);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < rows; ++i) acc_bt_row(ap, bp, cp, static_cast<std::size_t>(i), n, k);
  } else {
    for (std::size_t i = 0; i < m; ++i) acc_bt_row(ap, bp, cp, i, n, k);
  }
}

void matmul_acc_at(std::span<const double> a, std::span<const double> b, std::span<double> c,
                   std::size_t m, std::size_t k, std::size_t n, Exec exec) {
  const double* ap = a.data();
  const double* bp = b.data();
  double* cp = c.data();
  const auto rows = static_cast<long long>(k);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < rows; ++p)
      acc_at_row(ap, bp, cp, static_cast<std::size_t>(p), m, k, n);
  } else {
    for (std::size_t p = 0; p < k; ++p) acc_at_row(ap, bp, cp, p, m, k, n);
  }
}

}  // namespace slfnet::kernels
