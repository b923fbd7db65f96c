#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slfnet/params.hpp"
#include "slfnet/tape.hpp"

namespace slfnet {

// Records a scalar objective on the given tape, reading parameters through it.
using LossBuilder = std::function<Var(Tape&)>;

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Restrict to these parameters (all when empty).
  std::vector<ParamId> only;
  // Applied to the analytic gradients before comparison; lets tests inject faults.
  std::function<void(Gradients&)> analytic_hook;
};

struct ParamCheck {
  std::string name;
  std::size_t coordinates = 0;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;  // at the worst coordinate
  double numeric = 0.0;
  std::size_t failures = 0;  // coordinates above tolerance
  bool ok() const noexcept { return failures == 0; }
};

struct GradCheckReport {
  double tolerance = 0.0;
  std::vector<ParamCheck> params;
  bool passed() const noexcept;
  const ParamCheck* worst() const noexcept;
};

// |a - b| / max(|a|, |b|, 1e-8)
double relative_error(double a, double b) noexcept;

// Compares tape gradients of `loss` against central differences
// (f(p+h) - f(p-h)) / 2h, one coordinate at a time. Parameters are restored
// bit-exactly afterwards. Throws ContractError for step <= 0 or when two
// evaluations at the same point disagree.
GradCheckReport grad_check(ParamStore& params, const LossBuilder& loss,
                           const GradCheckOptions& options = {});

}  // namespace slfnet
