#ifndef VSSDIMSIM_PROBLEMS_HPP
#define VSSDIMSIM_PROBLEMS_HPP

#include "vssdimsim/core.hpp"

#include <string>
#include <utility>

namespace vssdimsim {

/// y' = M y, M = [[1, 1], [-2, -1]], y(0) = [2, 1] on [0, 5 pi].
OdeSystem linear2d();

/// Brusselator kinetics with A = 1, B = 3, y(0) = [1.5, 3] on [0, 20].
OdeSystem brusselator();

/// Method-of-lines Brusselator with diffusion on (0, 1), Dirichlet data
/// u = 1, v = 3, on [0, 10]. State layout: u_1..u_n then v_1..v_n.
OdeSystem brusselator_pde(int ngrid = 50, double alpha = 1.0 / 50.0);

Eigen::VectorXd pack_uv(const Eigen::VectorXd& u, const Eigen::VectorXd& v);
std::pair<Eigen::VectorXd, Eigen::VectorXd> unpack_uv(const Eigen::VectorXd& y);

/// "linear", "bruss" or "bruss-pde".
OdeSystem make_problem(const std::string& name, int pde_grid = 50);

}  // namespace vssdimsim

#endif  // VSSDIMSIM_PROBLEMS_HPP
