#include "nasgnn/gradcheck.hpp"

#include <cmath>

namespace nasgnn {

namespace {

double rel_err(double a, double b) {
  const double denom = std::max({std::fabs(a), std::fabs(b), 1e-8});
  return std::fabs(a - b) / denom;
}

double checked_eval(const std::function<double()>& f) {
  const double y = f();
  if (!std::isfinite(y)) {
    throw NonFiniteError("finite_diff_check: function returned " +
                         std::to_string(y));
  }
  return y;
}

}  // namespace

CheckReport finite_diff_check(const std::function<double()>& f,
                              const std::function<void()>& compute_grads,
                              ParamRegistry& registry, double step,
                              double tolerance) {
  if (step <= 0.0) {
    throw BadConfigError("finite_diff_check: step must be positive");
  }

  checked_eval(f);
  registry.zero_grads();
  compute_grads();

  CheckReport report;
  report.pass = true;
  for (auto& [name, p] : registry) {
    ParamCheck pc;
    pc.name = name;
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
        const double saved = p.value(r, c);
        p.value(r, c) = saved + step;
        const double plus = checked_eval(f);
        p.value(r, c) = saved - step;
        const double minus = checked_eval(f);
        p.value(r, c) = saved;

        const double numeric = (plus - minus) / (2.0 * step);
        pc.max_rel_err =
            std::max(pc.max_rel_err, rel_err(p.grad(r, c), numeric));
      }
    }
    pc.pass = pc.max_rel_err <= tolerance;
    report.max_rel_err = std::max(report.max_rel_err, pc.max_rel_err);
    report.pass = report.pass && pc.pass;
    report.per_param.push_back(std::move(pc));
  }
  return report;
}

}  // namespace nasgnn
