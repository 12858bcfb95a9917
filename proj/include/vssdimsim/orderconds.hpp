#ifndef VSSDIMSIM_ORDERCONDS_HPP
#define VSSDIMSIM_ORDERCONDS_HPP

// Order-condition matrices for variable stepsize SDIMSIMs with stage order
// q = p, written for a general weight matrix beta (r x (rho + 1)); the
// constructed methods all use beta = I.
//
//   C          = A C K + Abar C K^2 + U beta T
//   beta T^    = B C K + Bbar C K^2 + V beta T
//
// where row l of T holds the Taylor coefficients of y(x_n - (s_1+..+s_l) h_n)
// around x_n and T^ = [E_1; first rho rows of T].

#include "vssdimsim/core.hpp"

#include <algorithm>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace vssdimsim {

template <typename Scalar = double>
struct TaylorMatrices {
  Mat<Scalar> T;     // (rho+1) x (p+1)
  Mat<Scalar> That;  // (rho+1) x (p+1)
  Mat<Scalar> Cmat;  // s x (p+1), column j = c^j / j!
  Mat<Scalar> K;     // (p+1) x (p+1) upper shift
  Mat<Scalar> E;     // exp(K)
};

template <typename Scalar>
TaylorMatrices<Scalar> taylor_matrices(int p, const StepRatios<Scalar>& sigma,
                                       const Vec<Scalar>& c) {
  if (p < 1) throw std::invalid_argument("taylor_matrices: order must be >= 1");
  if (c.size() == 0) throw std::invalid_argument("taylor_matrices: empty abscissa vector");

  const int rho = sigma.size();
  const int cols = p + 1;
  const Vec<Scalar> sums = sigma.cumulative();

  TaylorMatrices<Scalar> tm;
  tm.T.resize(rho + 1, cols);
  for (int l = 0; l <= rho; ++l) {
    Scalar term(1);
    tm.T(l, 0) = term;
    for (int j = 1; j < cols; ++j) {
      term *= -sums(l) / Scalar(j);
      tm.T(l, j) = term;
    }
  }

  tm.That.resize(rho + 1, cols);
  Scalar inv_fact(1);
  for (int j = 0; j < cols; ++j) {
    if (j > 0) inv_fact /= Scalar(j);
    tm.That(0, j) = inv_fact;
  }
  if (rho > 0) tm.That.bottomRows(rho) = tm.T.topRows(rho);

  tm.Cmat.resize(c.size(), cols);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    Scalar term(1);
    tm.Cmat(i, 0) = term;
    for (int j = 1; j < cols; ++j) {
      term *= c(i) / Scalar(j);
      tm.Cmat(i, j) = term;
    }
  }

  tm.K = Mat<Scalar>::Zero(cols, cols);
  for (int j = 1; j < cols; ++j) tm.K(j - 1, j) = Scalar(1);

  tm.E = Mat<Scalar>::Zero(cols, cols);
  for (int i = 0; i < cols; ++i) {
    Scalar f(1);
    for (int j = i; j < cols; ++j) {
      if (j > i) f /= Scalar(j - i);
      tm.E(i, j) = f;
    }
  }
  return tm;
}

namespace detail {

template <typename Scalar>
Mat<Scalar> default_beta(const Tableau<Scalar>& t) {
  return Mat<Scalar>::Identity(t.r(), t.rho() + 1);
}

template <typename Scalar>
void check_beta(const Tableau<Scalar>& t, const Mat<Scalar>& beta) {
  if (beta.rows() != t.r() || beta.cols() != t.rho() + 1)
    throw std::invalid_argument("beta must be r x (rho + 1)");
}

}  // namespace detail

/// C - A C K - Abar C K^2 - U beta T, shape s x (p+1).
template <typename Scalar>
Mat<Scalar> stage_residual(const Tableau<Scalar>& t, const Mat<Scalar>& beta) {
  detail::check_beta(t, beta);
  const auto tm = taylor_matrices(t.p, t.sigma, t.c);
  const Mat<Scalar> CK = tm.Cmat * tm.K;
  return tm.Cmat - t.A * CK - t.Abar * (CK * tm.K) - t.U * beta * tm.T;
}

template <typename Scalar>
Mat<Scalar> stage_residual(const Tableau<Scalar>& t) {
  return stage_residual(t, detail::default_beta(t));
}

/// beta T^ - B C K - Bbar C K^2 - V beta T, shape r x (p+1).
template <typename Scalar>
Mat<Scalar> output_residual(const Tableau<Scalar>& t, const Mat<Scalar>& beta) {
  detail::check_beta(t, beta);
  const auto tm = taylor_matrices(t.p, t.sigma, t.c);
  const Mat<Scalar> CK = tm.Cmat * tm.K;
  return beta * tm.That - t.B * CK - t.Bbar * (CK * tm.K) - t.V * beta * tm.T;
}

template <typename Scalar>
Mat<Scalar> output_residual(const Tableau<Scalar>& t) {
  return output_residual(t, detail::default_beta(t));
}

/// Leading local truncation error coefficient vector phi_p(sigma): the
/// output-vector defect is phi_p h^{p+1} y^{(p+1)}(x_n) + O(h^{p+2}).
template <typename Scalar>
Vec<Scalar> error_constant(const Tableau<Scalar>& t, const Mat<Scalar>& beta) {
  detail::check_beta(t, beta);
  const int p = t.p;
  const int rho = t.rho();
  const Vec<Scalar> sums = t.sigma.cumulative();

  Scalar inv_fact(1);
  for (int j = 2; j <= p + 1; ++j) inv_fact /= Scalar(j);

  Vec<Scalar> tail(rho + 1);  // T_{p+1}
  for (int l = 0; l <= rho; ++l) {
    Scalar pw(1);
    for (int j = 0; j <= p; ++j) pw *= -sums(l);
    tail(l) = pw * inv_fact;
  }
  Vec<Scalar> tail_hat(rho + 1);  // T^_{p+1}
  tail_hat(0) = inv_fact;
  for (int l = 1; l <= rho; ++l) tail_hat(l) = tail(l - 1);

  Vec<Scalar> cp(t.s()), cpm1(t.s());
  Scalar fact_pm1(1);
  for (int j = 2; j < p; ++j) fact_pm1 *= Scalar(j);
  for (int i = 0; i < t.s(); ++i) {
    Scalar pw(1);
    for (int j = 0; j < p - 1; ++j) pw *= t.c(i);
    cpm1(i) = pw / fact_pm1;
    cp(i) = pw * t.c(i) / (fact_pm1 * Scalar(p));
  }
  return beta * tail_hat - t.B * cp - t.Bbar * cpm1 - t.V * (beta * tail);
}

template <typename Scalar>
Vec<Scalar> error_constant(const Tableau<Scalar>& t) {
  return error_constant(t, detail::default_beta(t));
}

/// Scalar error constant v^T phi_p: the component of the defect that
/// survives the rank-one V = e v^T.
template <typename Scalar>
Scalar scalar_error_constant(const Tableau<Scalar>& t) {
  return t.v().dot(error_constant(t));
}

/// M(z; sigma) = V + (z B + z^2 Bbar)(I - z A - z^2 Abar)^{-1} U.
template <typename Scalar>
Mat<std::complex<Scalar>> propagation_matrix(const Tableau<Scalar>& t,
                                             std::complex<Scalar> z) {
  using Cx = std::complex<Scalar>;
  const Mat<Cx> A = t.A.template cast<Cx>();
  const Mat<Cx> Abar = t.Abar.template cast<Cx>();
  const Mat<Cx> lhs = Mat<Cx>::Identity(t.s(), t.s()) - z * A - z * z * Abar;
  const Mat<Cx> stages = lhs.partialPivLu().solve(t.U.template cast<Cx>());
  return t.V.template cast<Cx>() +
         (z * t.B.template cast<Cx>() + z * z * t.Bbar.template cast<Cx>()) * stages;
}

struct ZeroStabilityReport {
  double product_norm_inf = 0.0;
  double rank_one_norm_inf = 0.0;  // ||e v_last^T||_inf
  double max_deviation = 0.0;      // max |product - e v_last^T|
  bool collapsed = false;          // max_deviation <= 1e-12
  std::size_t factors = 0;
};

/// Multiplies V(sigma_1) V(sigma_2) ... left to right and checks that the
/// product is the single rank-one factor e v(sigma_last)^T.
template <typename Scalar>
ZeroStabilityReport zero_stability_product(
    const std::function<Tableau<Scalar>(const StepRatios<Scalar>&)>& factory,
    const std::vector<StepRatios<Scalar>>& sequence, double tol = 1e-12) {
  if (sequence.empty()) throw std::invalid_argument("zero_stability_product: empty sequence");
  ZeroStabilityReport rep;
  Mat<Scalar> product;
  Vec<Scalar> last_v;
  for (const auto& sig : sequence) {
    const Tableau<Scalar> t = factory(sig);
    product = rep.factors == 0 ? t.V : Mat<Scalar>(product * t.V);
    last_v = t.v();
    ++rep.factors;
  }
  const Mat<Scalar> expected = Vec<Scalar>::Ones(product.rows()) * last_v.transpose();
  rep.product_norm_inf = static_cast<double>(product.cwiseAbs().rowwise().sum().maxCoeff());
  rep.rank_one_norm_inf = static_cast<double>(expected.cwiseAbs().rowwise().sum().maxCoeff());
  rep.max_deviation = static_cast<double>((product - expected).cwiseAbs().maxCoeff());
  rep.collapsed = rep.max_deviation <= tol;
  return rep;
}

struct FixedStepResidual {
  double stage = 0.0;   // max |C - ACK - AbarCK^2 - UW|
  double output = 0.0;  // max |WE - BCK - BbarCK^2 - VW|
};

/// Uniform-grid order conditions with W rebuilt from beta: row l of the
/// uniform Taylor block is the expansion of y(x_n - l h).
template <typename Scalar>
FixedStepResidual fixed_stepsize_check(const Tableau<Scalar>& t, const Mat<Scalar>& beta) {
  detail::check_beta(t, beta);
  for (int i = 0; i < t.rho(); ++i)
    if (t.sigma[i] != Scalar(1))
      throw std::invalid_argument("fixed_stepsize_check requires sigma = e");

  const int p = t.p;
  const int cols = p + 1;
  Mat<Scalar> taylor(t.rho() + 1, cols);
  for (int l = 0; l <= t.rho(); ++l) {
    Scalar term(1);
    taylor(l, 0) = term;
    for (int j = 1; j < cols; ++j) {
      term *= Scalar(-l) / Scalar(j);
      taylor(l, j) = term;
    }
  }
  const Mat<Scalar> W = beta * taylor;

  Mat<Scalar> C(t.s(), cols), K = Mat<Scalar>::Zero(cols, cols), E = Mat<Scalar>::Zero(cols, cols);
  for (int i = 0; i < t.s(); ++i) {
    Scalar term(1);
    C(i, 0) = term;
    for (int j = 1; j < cols; ++j) {
      term *= t.c(i) / Scalar(j);
      C(i, j) = term;
    }
  }
  for (int j = 1; j < cols; ++j) K(j - 1, j) = Scalar(1);
  for (int i = 0; i < cols; ++i) {
    Scalar f(1);
    for (int j = i; j < cols; ++j) {
      if (j > i) f /= Scalar(j - i);
      E(i, j) = f;
    }
  }
  const Mat<Scalar> CK = C * K;
  FixedStepResidual res;
  res.stage = static_cast<double>(
      (C - t.A * CK - t.Abar * CK * K - t.U * W).cwiseAbs().maxCoeff());
  res.output = static_cast<double>(
      (W * E - t.B * CK - t.Bbar * CK * K - t.V * W).cwiseAbs().maxCoeff());
  return res;
}

template <typename Scalar>
FixedStepResidual fixed_stepsize_check(const Tableau<Scalar>& t) {
  return fixed_stepsize_check(t, detail::default_beta(t));
}

/// Residual tolerance by order: closed forms for p <= 2, solver-built
/// coefficients above that.
inline double residual_tier(int p) {
  if (p <= 2) return 1e-13;
  if (p == 3) return 1e-11;
  return 1e-10;
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : static_cast<double>(m.cwiseAbs().maxCoeff());
}

}  // namespace vssdimsim

#endif  // VSSDIMSIM_ORDERCONDS_HPP
