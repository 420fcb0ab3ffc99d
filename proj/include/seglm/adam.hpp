#pragma once

#include <Eigen/Core>
#include <cmath>

namespace seglm {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One Adam update with bias correction; t is the 1-based step count.
/// Works on any Eigen array-compatible segments of equal size.
template <typename Grad, typename Vec>
void adam_update(const Grad& grad, Vec&& mom1, Vec&& mom2, Vec&& x, long t,
                 const AdamConfig& cfg) {
  mom1 = cfg.beta1 * mom1.array() + (1.0 - cfg.beta1) * grad.array();
  mom2 = cfg.beta2 * mom2.array() + (1.0 - cfg.beta2) * grad.array().square();
  const double corr1 = 1.0 - std::pow(cfg.beta1, t);
  const double corr2 = 1.0 - std::pow(cfg.beta2, t);
  x.array() -= cfg.lr * (mom1.array() / corr1) /
               ((mom2.array() / corr2).sqrt() + cfg.epsilon);
}

}  // namespace seglm
