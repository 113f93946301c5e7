#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "seg/nn/params.hpp"
#include "seg/nn/tape.hpp"

namespace seg::nn {

/// Builds a scalar loss on the given tape from the tape's parameters.
using LossBuilder = std::function<Var(Tape&)>;

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  /// Denominator floor for the relative error, so entries whose true
  /// gradient is ~0 are judged on absolute error.
  double denom_floor = 1e-6;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t entries_checked = 0;
  bool passed = true;
};

/// Central-difference check of every entry of every parameter against the
/// tape's reverse-mode gradient. Parameters are restored afterwards. Throws
/// DeterminismError if two evaluations at the same point differ.
GradCheckReport finite_diff_check(const LossBuilder& loss, ParamStore& params,
                                  const GradCheckOptions& opt = {});

/// Same comparison against caller-supplied gradients.
GradCheckReport compare_with_finite_differences(const LossBuilder& loss, ParamStore& params,
                                                const Gradients& analytic,
                                                const GradCheckOptions& opt = {});

double relative_error(double analytic, double numeric, double floor);

}  // namespace seg::nn
