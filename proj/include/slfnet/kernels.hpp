#pragma once

// Dense matrix kernels behind the autodiff tape.
//
// Every kernel has a serial reference and an OpenMP variant that splits work by
// output row. Both sum each output entry in the same order (inner index
// ascending, starting from 0.0), so their results are bit-identical.

#include <cstddef>
#include <span>

namespace slfnet::kernels {

enum class Exec { Serial, Parallel };

// Products below this many multiply-adds always run serially.
inline constexpr std::size_t kParallelThreshold = 1u << 15;

// Process-wide default used by `auto_exec`. Defaults to Parallel when built with OpenMP.
void set_default_exec(Exec exec) noexcept;
Exec default_exec() noexcept;
bool openmp_enabled() noexcept;
int max_threads() noexcept;

// c[m×n] = a[m×k] · b[k×n]
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            std::size_t m, std::size_t k, std::size_t n, Exec exec);

// c[m×k] += a[m×n] · b[k×n]ᵀ
void matmul_acc_bt(std::span<const double> a, std::span<const double> b, std::span<double> c,
                   std::size_t m, std::size_t n, std::size_t k, Exec exec);

// c[k×n] += a[m×k]ᵀ · b[m×n]
void matmul_acc_at(std::span<const double> a, std::span<const double> b, std::span<double> c,
                   std::size_t m, std::size_t k, std::size_t n, Exec exec);

// Picks Parallel only when the default allows it and the product is large enough.
Exec auto_exec(std::size_t m, std::size_t k, std::size_t n) noexcept;

}  // namespace slfnet::kernels
