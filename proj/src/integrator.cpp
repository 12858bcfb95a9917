#include "vssdimsim/integrator.hpp"

#include "vssdimsim/reference.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vssdimsim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SolutionState starting_state(const OdeSystem& problem, const Grid& grid, int p, StartMode mode,
                             double reference_tol) {
  if (p < 1) throw std::invalid_argument("order must be >= 1");
  if (grid.size() < p) throw std::invalid_argument("grid has fewer than p + 1 points");
  if (mode == StartMode::Automatic)
    mode = problem.has_exact() ? StartMode::Exact : StartMode::Reference;
  if (mode == StartMode::Exact && !problem.has_exact())
    throw std::invalid_argument("problem '" + problem.name + "' has no exact solution");
  if (mode == StartMode::Reference && !problem.f)
    throw std::invalid_argument("no reference available for problem '" + problem.name + "'");

  SolutionState st;
  st.n = p - 1;
  st.x = grid.point(p - 1);
  st.blocks.resize(problem.dim, p);
  if (mode == StartMode::Exact) {
    for (int k = 0; k < p; ++k) st.blocks.col(k) = problem.exact(grid.point(p - 1 - k));
    return st;
  }
  std::vector<double> xs;
  for (int k = 1; k < p; ++k) xs.push_back(grid.point(k));
  st.blocks.col(p - 1) = problem.y0;
  if (!xs.empty()) {
    ReferenceOptions ro;
    ro.rtol = ro.atol = reference_tol;
    const auto ys = reference_at(problem, xs, ro);
    for (int k = 1; k < p; ++k) st.blocks.col(p - 1 - k) = ys[k - 1];
  }
  return st;
}

SolutionState step(const Tableau<double>& t, const SolutionState& state, double h,
                   const OdeSystem& problem) {
  const int s = t.s();
  if (state.r() != t.r()) throw std::invalid_argument("state has wrong number of blocks");
  if (!(h > 0.0)) throw std::invalid_argument("stepsize must be positive");
  const Eigen::Index m = state.dim();
  MatrixXd F(m, s), G(m, s);
  const double h2 = h * h;

  for (int i = 0; i < s; ++i) {
    VectorXd Y = state.blocks * t.U.row(i).transpose();
    for (int j = 0; j < i; ++j) Y += h * t.A(i, j) * F.col(j) + h2 * t.Abar(i, j) * G.col(j);
    F.col(i) = problem.f(Y);
    G.col(i) = problem.g(Y);
    if (!F.col(i).allFinite() || !G.col(i).allFinite()) {
      std::ostringstream msg;
      msg << "non-finite " << (F.col(i).allFinite() ? "g" : "f") << " at stage " << i + 1
          << " of step " << state.n << " (x = " << state.x << ")";
      throw std::runtime_error(msg.str());
    }
  }

  SolutionState next;
  next.n = state.n + 1;
  next.x = state.x + h;
  next.blocks = h * F * t.B.transpose() + h2 * G * t.Bbar.transpose() +
                state.blocks * t.V.transpose();
  return next;
}

IntegrationResult integrate(const OdeSystem& problem, const Grid& grid, int p,
                            const IntegrateOptions& opts) {
  if (p < 1 || p > 4) throw std::invalid_argument("order must be 1, 2, 3 or 4");
  if (grid.size() < p) throw std::invalid_argument("grid shorter than p + 1 points");
  const int N = grid.size();

  IntegrationResult res;
  SolutionState st = starting_state(problem, grid, p, opts.start, opts.reference_tol);
  if (opts.keep_trajectory)
    for (int k = p - 1; k >= 0; --k) res.trajectory.emplace_back(grid.point(p - 1 - k), st.blocks.col(k));

  const int every = std::max(1, opts.sample_every);
  for (int n = p - 1; n < N; ++n) {
    const StepRatios<double> sigma = grid.ratios(n, p - 1);
    const Tableau<double> t = opts.cache ? opts.cache->get(sigma) : make_tableau(p, sigma);
    st = step(t, st, grid.step(n), problem);
    st.x = grid.point(n + 1);
    res.n_f_evals += t.s();
    res.n_g_evals += t.s();
    ++res.n_steps;
    if (opts.keep_trajectory && ((n + 1) % every == 0 || n + 1 == N))
      res.trajectory.emplace_back(st.x, st.blocks.col(0));
  }
  res.y_final = st.blocks.col(0);
  res.state_final = std::move(st);
  return res;
}

double global_error(const VectorXd& y, const VectorXd& truth, Norm norm) {
  if (y.size() != truth.size()) throw std::invalid_argument("dimension mismatch in global_error");
  const VectorXd d = y - truth;
  return norm == Norm::Max ? d.lpNorm<Eigen::Infinity>() : d.norm();
}

VectorXd truth_at_end(const OdeSystem& problem, double reference_tol) {
  if (problem.has_exact()) return problem.exact(problem.x_end);
  ReferenceOptions ro;
  ro.rtol = ro.atol = reference_tol;
  return reference_solution(problem, problem.x_end, ro);
}

}  // namespace vssdimsim
