#include "vssdimsim/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vssdimsim {

using Eigen::VectorXd;

namespace {

// Dormand-Prince 5(4) tableau; the problems are autonomous so the nodes
// are not needed.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

double scaled_norm(const VectorXd& v, const VectorXd& y0, const VectorXd& y1,
                   const ReferenceOptions& o) {
  const VectorXd sc = (o.atol + o.rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
  return std::sqrt((v.array() / sc.array()).square().mean());
}

}  // namespace

std::vector<VectorXd> reference_at(const OdeSystem& problem, const std::vector<double>& xs,
                                   const ReferenceOptions& opts, ReferenceStats* stats) {
  if (!problem.f) throw std::invalid_argument("reference solver needs f");
  if (!std::is_sorted(xs.begin(), xs.end()))
    throw std::invalid_argument("reference abscissae must be ascending");
  std::vector<VectorXd> out;
  out.reserve(xs.size());

  const auto& f = problem.f;
  double x = problem.x0;
  VectorXd y = problem.y0;
  VectorXd k1 = f(y);

  // Initial step guess from the first and (estimated) second derivative.
  double h;
  {
    const VectorXd sc = (opts.atol + opts.rtol * y.cwiseAbs().array()).matrix();
    const double d0 = std::sqrt((y.array() / sc.array()).square().mean());
    const double d1 = std::sqrt((k1.array() / sc.array()).square().mean());
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    const VectorXd k2 = f(y + h0 * k1);
    const double d2 = std::sqrt(((k2 - k1).array() / sc.array()).square().mean()) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                  : std::pow(0.01 / std::max(d1, d2), 1.0 / 5);
    h = std::min(100 * h0, h1);
  }

  constexpr double safe = 0.9, beta = 0.04, fac_min = 0.1, fac_max = 5.0;
  const double expo1 = 0.2 - 0.75 * beta;
  double facold = 1e-4;
  long steps = 0, rejected = 0;

  for (double target : xs) {
    if (target < problem.x0) throw std::invalid_argument("reference abscissa before x0");
    while (x < target) {
      if (steps + rejected >= opts.max_steps)
        throw std::runtime_error("reference solver exceeded its step limit");
      bool last = false;
      double hs = h;
      if (x + hs >= target || x + 1.01 * hs >= target) {
        hs = target - x;
        last = true;
      }
      const VectorXd k2 = f(y + hs * a21 * k1);
      const VectorXd k3 = f(y + hs * (a31 * k1 + a32 * k2));
      const VectorXd k4 = f(y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
      const VectorXd k5 = f(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const VectorXd k6 = f(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const VectorXd ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const VectorXd k7 = f(ynew);
      const VectorXd err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = scaled_norm(err, y, ynew, opts);
      if (!std::isfinite(en)) throw std::runtime_error("reference solver produced non-finite values");

      const double fac11 = std::pow(std::max(en, 1e-300), expo1);
      if (en <= 1.0) {
        double fac = fac11 / std::pow(facold, beta);
        fac = std::clamp(fac / safe, fac_min, fac_max);
        facold = std::max(en, 1e-4);
        x = last ? target : x + hs;
        y = ynew;
        k1 = k7;
        ++steps;
        h = hs / fac;
      } else {
        h = hs / std::min(fac_max, fac11 / safe);
        ++rejected;
      }
    }
    out.push_back(y);
  }
  if (stats) {
    stats->accepted = steps;
    stats->rejected = rejected;
  }
  return out;
}

VectorXd reference_solution(const OdeSystem& problem, double x_end, const ReferenceOptions& opts) {
  return reference_at(problem, {x_end}, opts).front();
}

}  // namespace vssdimsim
