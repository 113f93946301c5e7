#include "seg/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "seg/error.hpp"

namespace seg::nn {

namespace {

double evaluate(const LossBuilder& loss, const ParamStore& params) {
  Tape tape(&params);
  const Var l = loss(tape);
  const Tensor& v = l.value();
  if (v.size() != 1) throw ShapeError("gradient check needs a scalar loss, got " + v.shape_str());
  return v[0];
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport compare_with_finite_differences(const LossBuilder& loss, ParamStore& params,
                                                const Gradients& analytic,
                                                const GradCheckOptions& opt) {
  if (analytic.size() != params.size()) throw ShapeError("gradient count does not match parameters");
  const double base = evaluate(loss, params);
  if (evaluate(loss, params) != base) {
    throw DeterminismError("forward pass is not deterministic: two evaluations differ");
  }

  GradCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& w = params[p].value.data();
    if (!analytic[p].same_shape(params[p].value)) {
      throw ShapeError("gradient for '" + params[p].name + "' has the wrong shape");
    }
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double saved = w[k];
      w[k] = saved + opt.step;
      const double plus = evaluate(loss, params);
      w[k] = saved - opt.step;
      const double minus = evaluate(loss, params);
      w[k] = saved;
      const double numeric = (plus - minus) / (2.0 * opt.step);
      const double err = relative_error(analytic[p][k], numeric, opt.denom_floor);
      ++report.entries_checked;
      if (err > report.max_rel_error || report.entries_checked == 1) {
        report.max_rel_error = err;
        report.worst_param = params[p].name;
        report.worst_index = k;
        report.worst_analytic = analytic[p][k];
        report.worst_numeric = numeric;
      }
    }
  }
  report.passed = report.max_rel_error <= opt.tolerance;
  return report;
}

GradCheckReport finite_diff_check(const LossBuilder& loss, ParamStore& params,
                                  const GradCheckOptions& opt) {
  Gradients analytic;
  {
    Tape tape(&params);
    analytic = grad(loss(tape));
  }
  return compare_with_finite_differences(loss, params, analytic, opt);
}

}  // namespace seg::nn
