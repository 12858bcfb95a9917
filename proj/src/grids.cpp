#include "vssdimsim/grids.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vssdimsim {

namespace {

Grid from_steps(double x0, double X, std::vector<double> h) {
  double total = 0.0;
  for (double v : h) total += v;
  const double scale = (X - x0) / total;
  std::vector<double> x(h.size() + 1);
  x[0] = x0;
  double acc = 0.0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    h[n] *= scale;
    acc += h[n];
    x[n + 1] = x0 + acc;
  }
  x.back() = X;
  h.back() = X - x[h.size() - 1];
  return Grid(std::move(x), std::move(h));
}

void check_interval(double x0, double X, int N) {
  if (!(X > x0)) throw std::invalid_argument("grid needs X > x0");
  if (N < 1) throw std::invalid_argument("grid needs N >= 1");
}

}  // namespace

Grid pattern_grid(double x0, double X, int N, double base) {
  check_interval(x0, X, N);
  if (!(base > 0.0)) throw std::invalid_argument("pattern base must be positive");
  const double len = X - x0;
  std::vector<double> h(N);
  h[0] = len / N;
  for (int n = 0; n + 1 < N; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    h[n + 1] = std::pow(base, sign * std::sin(5.0 * std::numbers::pi * n / len)) * h[n];
    if (!std::isfinite(h[n + 1]) || h[n + 1] <= 0.0)
      throw std::domain_error("pattern grid produced a non-finite step");
  }
  return from_steps(x0, X, std::move(h));
}

Grid uniform_grid(double x0, double X, int N) {
  check_interval(x0, X, N);
  std::vector<double> x(N + 1), h(N);
  const double step = (X - x0) / N;
  for (int n = 0; n <= N; ++n) x[n] = x0 + n * step;
  x.back() = X;
  for (int n = 0; n < N; ++n) h[n] = step;
  return Grid(std::move(x), std::move(h));
}

}  // namespace vssdimsim
