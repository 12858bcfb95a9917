#ifndef VSSDIMSIM_REFERENCE_HPP
#define VSSDIMSIM_REFERENCE_HPP

// Dormand-Prince 5(4) with a PI step controller, used for starting values
// and as the truth for problems without a closed-form solution.

#include "vssdimsim/core.hpp"

#include <vector>

namespace vssdimsim {

struct ReferenceOptions {
  double rtol = 1e-13;
  double atol = 1e-13;
  long max_steps = 20'000'000;
};

struct ReferenceStats {
  long accepted = 0;
  long rejected = 0;
};

/// Solution at each of the ascending abscissae xs (all >= problem.x0).
std::vector<Eigen::VectorXd> reference_at(const OdeSystem& problem, const std::vector<double>& xs,
                                          const ReferenceOptions& opts = {},
                                          ReferenceStats* stats = nullptr);

Eigen::VectorXd reference_solution(const OdeSystem& problem, double x_end,
                                   const ReferenceOptions& opts = {});

}  // namespace vssdimsim

#endif  // VSSDIMSIM_REFERENCE_HPP
