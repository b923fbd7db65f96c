#include "slfnet/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "slfnet/errors.hpp"

namespace slfnet {

bool GradCheckReport::passed() const noexcept {
  return std::all_of(params.begin(), params.end(), [](const ParamCheck& p) { return p.ok(); });
}

const ParamCheck* GradCheckReport::worst() const noexcept {
  const ParamCheck* w = nullptr;
  for (const auto& p : params)
    if (!w || p.max_rel_error > w->max_rel_error) w = &p;
  return w;
}

double relative_error(double a, double b) noexcept {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

namespace {

double evaluate(const ParamStore& params, const LossBuilder& loss) {
  Tape tape(&params);
  Var v = loss(tape);
  if (v.value().size() != 1) throw ContractError("grad_check objective is not scalar");
  return v.value()[0];
}

}  // namespace

GradCheckReport grad_check(ParamStore& params, const LossBuilder& loss,
                           const GradCheckOptions& options) {
  if (!(options.step > 0.0)) throw ContractError("grad_check step must be positive");

  const double base = evaluate(params, loss);
  const double again = evaluate(params, loss);
  if (std::memcmp(&base, &again, sizeof(double)) != 0)
    throw ContractError("grad_check objective is not deterministic");

  Gradients analytic;
  {
    Tape tape(&params);
    Var v = loss(tape);
    analytic = tape.backward(v);
  }
  if (options.analytic_hook) options.analytic_hook(analytic);

  std::vector<ParamId> ids = options.only;
  if (ids.empty())
    for (ParamId id = 0; id < params.size(); ++id) ids.push_back(id);

  GradCheckReport report;
  report.tolerance = options.tolerance;
  const double h = options.step;
  for (ParamId id : ids) {
    ParamCheck check;
    check.name = params.name(id);
    auto values = params.value(id).data();
    check.coordinates = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = evaluate(params, loss);
      values[i] = saved - h;
      const double down = evaluate(params, loss);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[id][i];
      const double err = relative_error(a, numeric);
      if (err > options.tolerance) ++check.failures;
      if (i == 0 || err > check.max_rel_error) {
        check.max_rel_error = err;
        check.worst_index = i;
        check.analytic = a;
        check.numeric = numeric;
      }
    }
    report.params.push_back(std::move(check));
  }
  return report;
}

}  // namespace slfnet
