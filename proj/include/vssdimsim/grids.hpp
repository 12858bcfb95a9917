#ifndef VSSDIMSIM_GRIDS_HPP
#define VSSDIMSIM_GRIDS_HPP

#include "vssdimsim/core.hpp"

namespace vssdimsim {

/// Rapidly varying grid: h_{n+1} = base^((-1)^n sin(5 pi n / (X - x0))) h_n,
/// starting from h_0 = (X - x0) / N, then scaled so that x_N = X.
Grid pattern_grid(double x0, double X, int N, double base);

Grid uniform_grid(double x0, double X, int N);

}  // namespace vssdimsim

#endif  // VSSDIMSIM_GRIDS_HPP
