#include "vssdimsim/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vssdimsim {

using Eigen::VectorXd;

OdeSystem linear2d() {
  OdeSystem p;
  p.name = "linear";
  p.dim = 2;
  p.f = [](const VectorXd& y) {
    VectorXd d(2);
    d << y(0) + y(1), -2 * y(0) - y(1);
    return d;
  };
  p.g = [](const VectorXd& y) -> VectorXd { return -y; };  // M^2 = -I
  p.exact = [](double x) {
    VectorXd y(2);
    y << 3 * std::sin(x) + 2 * std::cos(x), std::cos(x) - 5 * std::sin(x);
    return y;
  };
  p.y0 = VectorXd(2);
  p.y0 << 2, 1;
  p.x0 = 0.0;
  p.x_end = 5 * std::numbers::pi;
  return p;
}

OdeSystem brusselator() {
  OdeSystem p;
  p.name = "bruss";
  p.dim = 2;
  p.f = [](const VectorXd& y) {
    const double q = y(0) * y(0) * y(1);
    VectorXd d(2);
    d << 1 + q - 4 * y(0), 3 * y(0) - q;
    return d;
  };
  p.g = [](const VectorXd& y) {
    const double u = y(0), v = y(1);
    const double q = u * u * v;
    const double fu = 1 + q - 4 * u, fv = 3 * u - q;
    VectorXd d(2);
    d << (2 * u * v - 4) * fu + u * u * fv, (3 - 2 * u * v) * fu - u * u * fv;
    return d;
  };
  p.y0 = VectorXd(2);
  p.y0 << 1.5, 3;
  p.x0 = 0.0;
  p.x_end = 20.0;
  return p;
}

VectorXd pack_uv(const VectorXd& u, const VectorXd& v) {
  if (u.size() != v.size()) throw std::invalid_argument("u and v blocks differ in length");
  VectorXd y(u.size() + v.size());
  y << u, v;
  return y;
}

std::pair<VectorXd, VectorXd> unpack_uv(const VectorXd& y) {
  if (y.size() % 2 != 0) throw std::invalid_argument("state length must be even");
  const Eigen::Index n = y.size() / 2;
  return {y.head(n), y.tail(n)};
}

namespace {

// k (w_{i-1} - 2 w_i + w_{i+1}) with boundary value b outside the grid.
VectorXd diffuse(const VectorXd& w, double k, double b) {
  const Eigen::Index n = w.size();
  VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = i > 0 ? w(i - 1) : b;
    const double right = i + 1 < n ? w(i + 1) : b;
    d(i) = k * (left - 2 * w(i) + right);
  }
  return d;
}

}  // namespace

OdeSystem brusselator_pde(int ngrid, double alpha) {
  if (ngrid < 2) throw std::invalid_argument("brusselator_pde needs at least 2 grid points");
  const double dx = 1.0 / (ngrid + 1);
  const double k = alpha / (dx * dx);
  const Eigen::Index n = ngrid;

  OdeSystem p;
  p.name = "bruss-pde";
  p.dim = 2 * ngrid;
  p.f = [k, n](const VectorXd& y) {
    const auto u = y.head(n).array();
    const auto v = y.tail(n).array();
    const Eigen::ArrayXd q = u * u * v;
    VectorXd d(2 * n);
    d.head(n) = (1 + q - 4 * u).matrix() + diffuse(y.head(n), k, 1.0);
    d.tail(n) = (3 * u - q).matrix() + diffuse(y.tail(n), k, 3.0);
    return d;
  };
  // J f: the reaction Jacobian is diagonal per node, diffusion is the
  // homogeneous tridiagonal stencil.
  p.g = [f = p.f, k, n](const VectorXd& y) {
    const VectorXd fy = f(y);
    const Eigen::ArrayXd u = y.head(n).array();
    const Eigen::ArrayXd v = y.tail(n).array();
    const Eigen::ArrayXd fu = fy.head(n).array();
    const Eigen::ArrayXd fv = fy.tail(n).array();
    VectorXd d(2 * n);
    d.head(n) = ((2 * u * v - 4) * fu + u * u * fv).matrix() + diffuse(fy.head(n), k, 0.0);
    d.tail(n) = ((3 - 2 * u * v) * fu - u * u * fv).matrix() + diffuse(fy.tail(n), k, 0.0);
    return d;
  };
  VectorXd u0(n), v0 = VectorXd::Constant(n, 3.0);
  for (Eigen::Index i = 0; i < n; ++i)
    u0(i) = 1 + std::sin(2 * std::numbers::pi * (i + 1) * dx);
  p.y0 = pack_uv(u0, v0);
  p.x0 = 0.0;
  p.x_end = 10.0;
  return p;
}

OdeSystem make_problem(const std::string& name, int pde_grid) {
  if (name == "linear") return linear2d();
  if (name == "bruss") return brusselator();
  if (name == "bruss-pde") return brusselator_pde(pde_grid);
  throw std::invalid_argument("unknown problem '" + name + "' (linear, bruss, bruss-pde)");
}

}  // namespace vssdimsim
