#ifndef VSSDIMSIM_TABLEAU_HPP
#define VSSDIMSIM_TABLEAU_HPP

// Construction of the order 1-4 methods. Each order fixes c, Abar, Bbar, V
// and part of A; the first column of A, the stage coefficients U and the
// output weights B are then recovered from the order conditions at the
// current ratio vector. Orders 1 and 2 (and the stage part of order 3) also
// have closed forms, used as independent checks on the solver.

#include "vssdimsim/core.hpp"
#include "vssdimsim/orderconds.hpp"

#include <Eigen/LU>

#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vssdimsim {

/// The sigma-independent (or externally supplied) part of a method.
/// Column 0 of A_known is ignored; it is solved for.
template <typename Scalar = double>
struct FixedParts {
  int p = 0;
  Vec<Scalar> c;
  Mat<Scalar> A_known, Abar, Bbar, V;
};

template <typename Scalar>
Vec<Scalar> vec_of(std::initializer_list<Scalar> xs) {
  Vec<Scalar> v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (Scalar x : xs) v(i++) = x;
  return v;
}

template <typename Scalar>
Mat<Scalar> rank_one_v(const Vec<Scalar>& v) {
  return Vec<Scalar>::Ones(v.size()) * v.transpose();
}

template <typename Scalar = double>
FixedParts<Scalar> fixed_parts_order1() {
  FixedParts<Scalar> fp;
  fp.p = 1;
  fp.c = Vec<Scalar>::Zero(1);
  fp.A_known = Mat<Scalar>::Zero(1, 1);
  fp.Abar = Mat<Scalar>::Zero(1, 1);
  fp.Bbar = Mat<Scalar>::Constant(1, 1, Scalar(499) / Scalar(1000));
  fp.V = Mat<Scalar>::Ones(1, 1);
  return fp;
}

/// Order 2: Bbar depends on sigma, so the fixed part is per-ratio.
template <typename Scalar = double>
FixedParts<Scalar> fixed_parts_order2(const StepRatios<Scalar>& sigma) {
  if (sigma.size() != 1) throw std::invalid_argument("order 2 needs one step ratio");
  const Scalar s = sigma[0];
  const Scalar s2 = s * s;
  FixedParts<Scalar> fp;
  fp.p = 2;
  fp.c = vec_of<Scalar>({Scalar(0), Scalar(1)});
  fp.A_known = Mat<Scalar>::Zero(2, 2);
  fp.Abar = Mat<Scalar>::Zero(2, 2);
  fp.Abar(1, 0) = Scalar(2) / Scalar(5);
  fp.Bbar.resize(2, 2);
  fp.Bbar << Scalar(1) / 8 + 253 * s2 / 6000, Scalar(1) / 8 - 253 * s2 / 3600,
      Scalar(-1) / 8 + 3289 * s2 / 18000, Scalar(-1) / 8 + 253 * s2 / 3600;
  fp.V = rank_one_v(vec_of<Scalar>({Scalar(4247) / 4500, Scalar(253) / 4500}));
  return fp;
}

template <typename Scalar = double>
FixedParts<Scalar> fixed_parts_order3() {
  FixedParts<Scalar> fp;
  fp.p = 3;
  fp.c = vec_of<Scalar>({Scalar(0), Scalar(1) / 2, Scalar(1)});
  fp.A_known = Mat<Scalar>::Zero(3, 3);
  fp.A_known(2, 1) = Scalar(1) / 4;
  fp.Abar = Mat<Scalar>::Zero(3, 3);
  fp.Abar(1, 0) = Scalar(1) / 10;
  fp.Abar(2, 0) = Scalar(1) / 5;
  fp.Abar(2, 1) = Scalar(1) / 2;
  fp.Bbar.resize(3, 3);
  fp.Bbar << Scalar(67) / 500, 0, Scalar(13) / 500,
      0, Scalar(-171) / 500, 0,
      Scalar(-321) / 100, 0, Scalar(-73) / 100;
  fp.V = rank_one_v(vec_of<Scalar>({Scalar(0), Scalar(12072) / 9889, Scalar(-2183) / 9889}));
  return fp;
}

template <typename Scalar = double>
FixedParts<Scalar> fixed_parts_order4() {
  FixedParts<Scalar> fp;
  fp.p = 4;
  fp.c = vec_of<Scalar>({Scalar(0), Scalar(1) / 3, Scalar(2) / 3, Scalar(1)});
  fp.A_known = Mat<Scalar>::Zero(4, 4);
  fp.A_known(2, 1) = Scalar(-11) / 25;
  fp.A_known(3, 1) = Scalar(11) / 10;
  fp.A_known(3, 2) = Scalar(-16) / 25;
  fp.Abar = Mat<Scalar>::Zero(4, 4);
  fp.Abar(1, 0) = Scalar(1) / 2;
  fp.Abar(2, 0) = Scalar(1);
  fp.Abar(2, 1) = Scalar(1) / 4;
  fp.Abar(3, 0) = Scalar(351) / 125;
  fp.Abar(3, 2) = Scalar(42) / 125;
  const Vec<Scalar> row =
      vec_of<Scalar>({Scalar(6211) / 25000, Scalar(2) / 25, Scalar(-147) / 6250, Scalar(0)});
  fp.Bbar = Vec<Scalar>::Ones(4) * row.transpose();
  fp.V = rank_one_v(vec_of<Scalar>({Scalar(1) / 2, Scalar(1) / 4, Scalar(8) / 25, Scalar(-7) / 100}));
  return fp;
}

namespace detail {

template <typename Scalar>
Vec<Scalar> solve_row(const Mat<Scalar>& M, const Vec<Scalar>& rhs, const char* what, int row) {
  Eigen::PartialPivLU<Mat<Scalar>> lu(M);
  if (!(static_cast<double>(lu.rcond()) > 1e-14)) {
    std::ostringstream msg;
    msg << "singular " << what << " system at row " << row + 1
        << " (rcond " << static_cast<double>(lu.rcond()) << ")";
    throw std::domain_error(msg.str());
  }
  return lu.solve(rhs);
}

}  // namespace detail

/// Solves the stage and output order conditions row by row for the free
/// coefficients: U and the first column of A (stages), B (outputs).
template <typename Scalar>
Tableau<Scalar> solve_coefficients(const FixedParts<Scalar>& fp, const StepRatios<Scalar>& sigma,
                                   double consistency_tol = 1e-12) {
  const int p = fp.p;
  if (p < 1) throw std::invalid_argument("solve_coefficients: order must be >= 1");
  if (fp.c.size() != p || fp.A_known.rows() != p || fp.A_known.cols() != p ||
      fp.Abar.rows() != p || fp.Abar.cols() != p || fp.Bbar.rows() != p ||
      fp.Bbar.cols() != p || fp.V.rows() != p || fp.V.cols() != p)
    throw std::invalid_argument("solve_coefficients: fixed parts must be p x p with |c| = p");
  if (sigma.size() != p - 1)
    throw std::invalid_argument("solve_coefficients: expected p - 1 step ratios");
  for (int i = 0; i < p; ++i) {
    const double res = std::abs(static_cast<double>(fp.V.row(i).sum() - Scalar(1)));
    if (res > consistency_tol)
      throw std::invalid_argument("solve_coefficients: V row sums must be 1 (preconsistency)");
    if (static_cast<double>((fp.V.row(i) - fp.V.row(0)).cwiseAbs().maxCoeff()) > consistency_tol)
      throw std::invalid_argument("solve_coefficients: V must be rank one, e v^T");
  }

  const auto tm = taylor_matrices(p, sigma, fp.c);
  const Mat<Scalar> CK = tm.Cmat * tm.K;
  const Mat<Scalar> CK2 = CK * tm.K;
  const int cols = p + 1;

  Tableau<Scalar> t;
  t.p = p;
  t.c = fp.c;
  t.sigma = sigma;
  t.Abar = fp.Abar;
  t.Bbar = fp.Bbar;
  t.V = fp.V;
  t.A = fp.A_known;
  t.A.col(0).setZero();
  t.U = Mat<Scalar>::Zero(p, p);
  t.B = Mat<Scalar>::Zero(p, p);

  // First stage: no coupling terms, U row from the first p conditions; the
  // remaining one is the consistency c_1 = 0 check.
  {
    const Mat<Scalar> M = tm.T.leftCols(p).transpose();
    const Vec<Scalar> rhs = tm.Cmat.row(0).head(p).transpose();
    t.U.row(0) = detail::solve_row(M, rhs, "stage", 0).transpose();
    const double res =
        std::abs(static_cast<double>(t.U.row(0).dot(tm.T.col(p)) - tm.Cmat(0, p)));
    if (res > consistency_tol)
      throw std::domain_error("solve_coefficients: first stage cannot satisfy stage order p (c_1 != 0?)");
  }

  // Remaining stages: unknowns u_i1..u_ip and a_i1.
  for (int i = 1; i < p; ++i) {
    Mat<Scalar> M(cols, cols);
    M.leftCols(p) = tm.T.transpose();
    M.col(p) = CK.row(0).transpose();
    Vec<Scalar> rhs = tm.Cmat.row(i).transpose();
    for (int k = 1; k < i; ++k) rhs -= t.A(i, k) * CK.row(k).transpose();
    for (int k = 0; k < i; ++k) rhs -= t.Abar(i, k) * CK2.row(k).transpose();
    const Vec<Scalar> x = detail::solve_row(M, rhs, "stage", i);
    t.U.row(i) = x.head(p).transpose();
    t.A(i, 0) = x(p);
  }

  // Outputs: columns 1..p form a Vandermonde system in c; column 0 is
  // 1 - sum(v), zero by preconsistency.
  const Mat<Scalar> VT = t.V * tm.T;
  const Mat<Scalar> BbarCK2 = t.Bbar * CK2;
  const Mat<Scalar> M = CK.rightCols(p).transpose();
  for (int i = 0; i < p; ++i) {
    const double col0 = std::abs(static_cast<double>(tm.That(i, 0) - BbarCK2(i, 0) - VT(i, 0)));
    if (col0 > consistency_tol)
      throw std::domain_error("solve_coefficients: inconsistent output condition in column 0");
    const Vec<Scalar> rhs =
        (tm.That.row(i).tail(p) - BbarCK2.row(i).tail(p) - VT.row(i).tail(p)).transpose();
    t.B.row(i) = detail::solve_row(M, rhs, "output", i).transpose();
  }
  return t;
}

// ---- order 1 and 2: closed forms ----

template <typename Scalar = double>
Tableau<Scalar> order1(const StepRatios<Scalar>& sigma = StepRatios<Scalar>()) {
  if (sigma.size() != 0) throw std::invalid_argument("order 1 takes no step ratios");
  const auto fp = fixed_parts_order1<Scalar>();
  Tableau<Scalar> t;
  t.p = 1;
  t.c = fp.c;
  t.A = fp.A_known;
  t.Abar = fp.Abar;
  t.U = Mat<Scalar>::Ones(1, 1);
  t.B = Mat<Scalar>::Ones(1, 1);
  t.Bbar = fp.Bbar;
  t.V = fp.V;
  t.sigma = sigma;
  return t;
}

template <typename Scalar = double>
Tableau<Scalar> order2(const StepRatios<Scalar>& sigma) {
  const auto fp = fixed_parts_order2(sigma);
  const Scalar s = sigma[0];
  const Scalar s2 = s * s;
  Tableau<Scalar> t;
  t.p = 2;
  t.c = fp.c;
  t.sigma = sigma;
  t.A = Mat<Scalar>::Zero(2, 2);
  t.A(1, 0) = Scalar(1) + Scalar(1) / (5 * s);
  t.Abar = fp.Abar;
  t.U.resize(2, 2);
  t.U << 1, 0, Scalar(1) - Scalar(1) / (5 * s2), Scalar(1) / (5 * s2);
  t.B.resize(2, 2);
  t.B << Scalar(3) / 4 + 253 * s / 4500, Scalar(1) / 4,
      Scalar(-1) / 4 + 253 * s / 4500 + 253 * s2 / 900, Scalar(1) / 4 - 253 * s2 / 900;
  t.Bbar = fp.Bbar;
  t.V = fp.V;
  return t;
}

// ---- order 3 ----

template <typename Scalar = double>
Tableau<Scalar> order3(const StepRatios<Scalar>& sigma) {
  return solve_coefficients(fixed_parts_order3<Scalar>(), sigma);
}

/// Order 3 written out as rational functions of (sigma_1, sigma_2).
template <typename Scalar = double>
Tableau<Scalar> order3_closed_form(const StepRatios<Scalar>& sigma) {
  if (sigma.size() != 2) throw std::invalid_argument("order 3 needs two step ratios");
  const auto fp = fixed_parts_order3<Scalar>();
  const Scalar a = sigma[0], b = sigma[1];
  const Scalar ab = a + b;
  Tableau<Scalar> t;
  t.p = 3;
  t.c = fp.c;
  t.sigma = sigma;
  t.Abar = fp.Abar;
  t.Bbar = fp.Bbar;
  t.V = fp.V;

  t.A = fp.A_known;
  t.A(1, 0) = (5 + 2 * b + 20 * a * b + 20 * a * a + 4 * a) / (40 * a * ab);
  t.A(2, 0) = (-55 - 52 * b + 60 * a * b + 60 * a * a - 104 * a) / (80 * a * ab);

  t.U = Mat<Scalar>::Zero(3, 3);
  t.U(0, 0) = 1;
  t.U(1, 0) = (-6 * a * b - 5 * b - 10 * a - 6 * a * a - 2 * b * b + 40 * a * a * b * b +
               80 * a * a * a * b + 40 * a * a * a * a) /
              (40 * a * a * ab * ab);
  t.U(1, 1) = (5 + 2 * ab) / (40 * a * a * b);
  t.U(1, 2) = -(5 + 2 * a) / (40 * b * ab * ab);
  t.U(2, 0) = (156 * a * b + 55 * b + 110 * a + 156 * a * a + 52 * b * b + 80 * a * a * b * b +
               160 * a * a * a * b + 80 * a * a * a * a) /
              (80 * a * a * ab * ab);
  t.U(2, 1) = -(55 + 52 * ab) / (80 * a * a * b);
  t.U(2, 2) = (55 + 52 * a) / (80 * b * ab * ab);

  const Scalar a2 = a * a, a3 = a2 * a, b2 = b * b, b3 = b2 * b;
  const Scalar k1 = Scalar(2183) / 9889, k2 = Scalar(4366) / 9889, k3 = Scalar(6549) / 9889;
  const Scalar k4 = Scalar(8732) / 9889;
  const Scalar w1 = Scalar(4366) / 29667, w2 = Scalar(8732) / 29667;
  const Scalar h1 = Scalar(6549) / 19778, h2 = Scalar(2183) / 19778;
  // Shared sigma-dependent parts of the three output rows.
  const Scalar q0 = -k1 * b - k3 * a * b - w1 * b3 - k2 * a * b2 - k2 * a2 * b - h1 * b2;
  const Scalar q1 = k4 * a * b2 + k4 * a * b + k2 * b2 + k4 * a2 * b + w2 * b3;
  const Scalar q2 = -k2 * a * b2 - k1 * a * b - h2 * b2 - k2 * a2 * b - w1 * b3;
  const Scalar r0 = a + Scalar(3) / 2 * a2 + Scalar(2) / 3 * a3;
  const Scalar r1 = -Scalar(4) / 3 * a3 - 2 * a2;
  const Scalar r2 = Scalar(2) / 3 * a3 + a2 / 2;
  t.B.resize(3, 3);
  t.B << Scalar(407) / 750 + r0 + q0, Scalar(88) / 375 + r1 + q1, Scalar(167) / 750 + r2 + q2,
      Scalar(-171) / 500 + r0 + q0, r1 + q1, Scalar(171) / 500 + r2 + q2,
      Scalar(-89) / 10 + q0, Scalar(248) / 25 + q1, Scalar(-51) / 50 + q2;
  return t;
}

// ---- order 4 ----

template <typename Scalar = double>
Tableau<Scalar> order4(const StepRatios<Scalar>& sigma) {
  return solve_coefficients(fixed_parts_order4<Scalar>(), sigma);
}

/// Fixed parts for any order (order 2 evaluated at the given ratios).
template <typename Scalar = double>
FixedParts<Scalar> fixed_parts(int p, const StepRatios<Scalar>& sigma) {
  switch (p) {
    case 1: return fixed_parts_order1<Scalar>();
    case 2: return fixed_parts_order2(sigma);
    case 3: return fixed_parts_order3<Scalar>();
    case 4: return fixed_parts_order4<Scalar>();
    default: throw std::invalid_argument("order must be 1, 2, 3 or 4");
  }
}

template <typename Scalar = double>
Tableau<Scalar> make_tableau(int p, const StepRatios<Scalar>& sigma) {
  switch (p) {
    case 1: return order1(sigma);
    case 2: return order2(sigma);
    case 3: return order3(sigma);
    case 4: return order4(sigma);
    default: throw std::invalid_argument("order must be 1, 2, 3 or 4");
  }
}

/// Memoises tableaux by ratio vector rounded to 12 significant digits.
/// Not used by the integrator unless requested.
class TableauCache {
 public:
  explicit TableauCache(int p) : p_(p) {
    if (p < 1 || p > 4) throw std::invalid_argument("order must be 1, 2, 3 or 4");
  }

  Tableau<double> get(const StepRatios<double>& sigma) {
    std::string key;
    char buf[32];
    for (int i = 0; i < sigma.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.11e,", sigma[i]);
      key += buf;
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) {
        ++hits_;
        return it->second;
      }
    }
    Tableau<double> t = make_tableau(p_, sigma);
    std::lock_guard<std::mutex> lock(mu_);
    ++misses_;
    return cache_.emplace(key, std::move(t)).first->second;
  }

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  int p_;
  std::mutex mu_;
  std::map<std::string, Tableau<double>> cache_;
  std::size_t hits_ = 0, misses_ = 0;
};

}  // namespace vssdimsim

#endif  // VSSDIMSIM_TABLEAU_HPP
