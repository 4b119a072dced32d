#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nasgnn/layers.hpp"

namespace nasgnn {

/// Per-parameter outcome of a finite-difference comparison.
struct ParamCheck {
  std::string name;
  double max_rel_err = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::vector<ParamCheck> per_param;  // registry order
  double max_rel_err = 0.0;
  bool pass = false;
};

/// Compares the analytic gradient of `f` (a deterministic scalar function
/// of the registry's parameters, e.g. a loss over a fixed batch) against
/// central finite differences (f(t+s e) - f(t-s e)) / 2s, elementwise, for
/// every parameter. Relative error is |a-b| / max(|a|, |b|, 1e-8); a
/// parameter passes when its worst element is within `tolerance`.
///
/// The analytic side is one backward pass; `compute_grads` must leave
/// gradients for all parameters in the registry (typically: zero_grads,
/// forward, backward). Throws NonFiniteError if f evaluates to NaN/Inf.
CheckReport finite_diff_check(const std::function<double()>& f,
                              const std::function<void()>& compute_grads,
                              ParamRegistry& registry, double step,
                              double tolerance);

}  // namespace nasgnn
