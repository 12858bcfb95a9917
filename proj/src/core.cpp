#include "vssdimsim/core.hpp"

#include <cmath>
#include <sstream>

namespace vssdimsim {

std::string ValidationReport::to_string() const {
  if (violations.empty()) return "ok";
  std::ostringstream out;
  for (const auto& v : violations) {
    out << v.what;
    if (v.row >= 0) out << " at row " << v.row + 1;
    if (v.col >= 0) out << ", col " << v.col + 1;
    if (v.residual != 0.0) out << " (residual " << v.residual << ")";
    out << '\n';
  }
  return out.str();
}

SecondDerivativeCheck check_second_derivative(const OdeSystem& problem, const Eigen::VectorXd& y,
                                              double tol) {
  if (!problem.f || !problem.g) throw std::invalid_argument("problem needs both f and g");
  const Eigen::VectorXd fy = problem.f(y);
  const Eigen::VectorXd gy = problem.g(y);
  const Eigen::Index m = y.size();

  // J_fd f = sum_k (df/dy_k) f_k, one central difference per column.
  Eigen::VectorXd jf = Eigen::VectorXd::Zero(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double eps = 1e-6 * std::max(1.0, std::abs(y(k)));
    Eigen::VectorXd yp = y, ym = y;
    yp(k) += eps;
    ym(k) -= eps;
    jf += (problem.f(yp) - problem.f(ym)) / (2 * eps) * fy(k);
  }
  SecondDerivativeCheck res;
  res.residual = (gy - jf).lpNorm<Eigen::Infinity>();
  res.threshold = tol * (1.0 + gy.lpNorm<Eigen::Infinity>());
  return res;
}

Grid::Grid(std::vector<double> points, std::vector<double> steps)
    : points_(std::move(points)), steps_(std::move(steps)) {
  if (points_.size() < 2 || steps_.size() + 1 != points_.size())
    throw std::invalid_argument("grid needs N >= 1 steps and N + 1 points");
  for (std::size_t n = 0; n < steps_.size(); ++n) {
    if (!(points_[n + 1] > points_[n]) || !(steps_[n] > 0.0) || !std::isfinite(steps_[n]))
      throw std::invalid_argument("grid points must be strictly increasing");
    const double gap = points_[n + 1] - points_[n];
    if (std::abs(gap - steps_[n]) > 1e-9 * std::max(1.0, std::abs(points_[n + 1])))
      throw std::invalid_argument("grid steps inconsistent with points");
  }
}

StepRatios<double> Grid::ratios(int n, int rho) const {
  if (n < rho || n >= size()) throw std::out_of_range("step index has too little history");
  Eigen::VectorXd s(rho);
  for (int i = 1; i <= rho; ++i) s(i - 1) = steps_[n - i] / steps_[n];
  return StepRatios<double>(s);
}

}  // namespace vssdimsim
