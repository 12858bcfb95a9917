#ifndef VSSDIMSIM_INTEGRATOR_HPP
#define VSSDIMSIM_INTEGRATOR_HPP

#include "vssdimsim/core.hpp"
#include "vssdimsim/tableau.hpp"

#include <utility>
#include <vector>

namespace vssdimsim {

enum class StartMode { Automatic, Exact, Reference };

enum class Norm { Max, Euclidean };

struct IntegrateOptions {
  StartMode start = StartMode::Automatic;
  double reference_tol = 1e-13;
  bool keep_trajectory = false;
  int sample_every = 1;
  TableauCache* cache = nullptr;
};

struct IntegrationResult {
  Eigen::VectorXd y_final;
  SolutionState state_final;
  long n_steps = 0;
  long n_f_evals = 0;
  long n_g_evals = 0;
  std::vector<std::pair<double, Eigen::VectorXd>> trajectory;
};

/// y^[p-1] = [y(x_{p-1}), ..., y(x_0)] from the exact solution, or from the
/// reference integrator when none is known (Automatic).
SolutionState starting_state(const OdeSystem& problem, const Grid& grid, int p,
                             StartMode mode = StartMode::Automatic, double reference_tol = 1e-13);

/// One step of the method: stages in order, then the full output update
/// y^[n+1] = h B F + h^2 Bbar G + V y^[n].
SolutionState step(const Tableau<double>& t, const SolutionState& state, double h,
                   const OdeSystem& problem);

IntegrationResult integrate(const OdeSystem& problem, const Grid& grid, int p,
                            const IntegrateOptions& opts = {});

double global_error(const Eigen::VectorXd& y, const Eigen::VectorXd& truth,
                    Norm norm = Norm::Euclidean);

/// Exact solution at x_end if known, otherwise the reference solution.
Eigen::VectorXd truth_at_end(const OdeSystem& problem, double reference_tol = 1e-13);

}  // namespace vssdimsim

#endif  // VSSDIMSIM_INTEGRATOR_HPP
