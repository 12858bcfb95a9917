#ifndef VSSDIMSIM_CORE_HPP
#define VSSDIMSIM_CORE_HPP

// Domain types shared by the order-condition, construction and integration
// code. Coefficient matrices are dense Eigen objects templated on the scalar
// so the same code runs in double and long double.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vssdimsim {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Ratios sigma_i = h_{n-i} / h_n of the past stepsizes to the current one.
template <typename Scalar = double>
class StepRatios {
 public:
  StepRatios() = default;

  explicit StepRatios(Vec<Scalar> values) : values_(std::move(values)) {
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
      const Scalar v = values_(i);
      if (!(v > Scalar(0)) || !std::isfinite(static_cast<double>(v))) {
        std::ostringstream msg;
        msg << "step ratio " << i + 1 << " must be positive and finite, got "
            << static_cast<double>(v);
        throw std::invalid_argument(msg.str());
      }
    }
  }

  StepRatios(std::initializer_list<Scalar> values)
      : StepRatios(from_list(values)) {}

  static StepRatios ones(int count) {
    return StepRatios(Vec<Scalar>::Ones(count));
  }

  int size() const { return static_cast<int>(values_.size()); }
  Scalar operator[](int i) const { return values_(i); }
  const Vec<Scalar>& values() const { return values_; }

  /// Cumulative sums [0, s_1, s_1 + s_2, ...], length size() + 1.
  Vec<Scalar> cumulative() const {
    Vec<Scalar> out(values_.size() + 1);
    out(0) = Scalar(0);
    for (Eigen::Index i = 0; i < values_.size(); ++i) out(i + 1) = out(i) + values_(i);
    return out;
  }

  template <typename Other>
  StepRatios<Other> cast() const {
    return StepRatios<Other>(values_.template cast<Other>());
  }

 private:
  static Vec<Scalar> from_list(std::initializer_list<Scalar> values) {
    Vec<Scalar> v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (Scalar x : values) v(i++) = x;
    return v;
  }

  Vec<Scalar> values_;
};

/// One method instance evaluated at a ratio vector. With p = s = r and
/// rho = p - 1 the input vector is [y_n, y_{n-1}, ..., y_{n-p+1}].
template <typename Scalar = double>
struct Tableau {
  int p = 0;
  Vec<Scalar> c;
  Mat<Scalar> A, Abar, U, B, Bbar, V;
  StepRatios<Scalar> sigma;

  int s() const { return static_cast<int>(A.rows()); }
  int r() const { return static_cast<int>(V.rows()); }
  int rho() const { return sigma.size(); }

  /// The row vector v with V = e v^T.
  Vec<Scalar> v() const { return V.row(0).transpose(); }

  template <typename Other>
  Tableau<Other> cast() const {
    Tableau<Other> t;
    t.p = p;
    t.c = c.template cast<Other>();
    t.A = A.template cast<Other>();
    t.Abar = Abar.template cast<Other>();
    t.U = U.template cast<Other>();
    t.B = B.template cast<Other>();
    t.Bbar = Bbar.template cast<Other>();
    t.V = V.template cast<Other>();
    t.sigma = sigma.template cast<Other>();
    return t;
  }
};

struct Violation {
  std::string what;
  int row = -1;
  int col = -1;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool mentions(const std::string& needle) const {
    for (const auto& v : violations)
      if (v.what.find(needle) != std::string::npos) return true;
    return false;
  }
  std::string to_string() const;
};

/// Structural checks for the explicit p = q = r = s class: dimensions,
/// strict lower triangularity, unit row sums of U, rank-one V with unit row
/// sums, finiteness.
template <typename Scalar>
ValidationReport validate_tableau(const Tableau<Scalar>& t, double tol = 1e-12) {
  ValidationReport report;
  auto fail = [&](std::string what, int row = -1, int col = -1, double res = 0.0) {
    report.violations.push_back({std::move(what), row, col, res});
  };

  const int p = t.p;
  if (p < 1) {
    fail("order must be at least 1");
    return report;
  }
  auto check_dims = [&](const Mat<Scalar>& m, const char* name, int rows, int cols) {
    if (m.rows() != rows || m.cols() != cols) {
      std::ostringstream msg;
      msg << name << " has shape " << m.rows() << "x" << m.cols() << ", expected "
          << rows << "x" << cols;
      fail(msg.str());
      return false;
    }
    return true;
  };
  bool dims = check_dims(t.A, "A", p, p);
  dims = check_dims(t.Abar, "Abar", p, p) && dims;
  dims = check_dims(t.U, "U", p, p) && dims;
  dims = check_dims(t.B, "B", p, p) && dims;
  dims = check_dims(t.Bbar, "Bbar", p, p) && dims;
  dims = check_dims(t.V, "V", p, p) && dims;
  if (t.c.size() != p) {
    fail("c must have length s = p");
    dims = false;
  }
  if (t.sigma.size() != p - 1) {
    fail("sigma must have length rho = p - 1");
    dims = false;
  }
  if (!dims) return report;

  auto check_finite = [&](const Mat<Scalar>& m, const char* name) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        if (!std::isfinite(static_cast<double>(m(i, j))))
          fail(std::string(name) + " entry not finite", i, j);
  };
  check_finite(t.A, "A");
  check_finite(t.Abar, "Abar");
  check_finite(t.U, "U");
  check_finite(t.B, "B");
  check_finite(t.Bbar, "Bbar");
  check_finite(t.V, "V");
  check_finite(t.c, "c");

  auto check_strict_lower = [&](const Mat<Scalar>& m, const char* name) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = i; j < m.cols(); ++j)
        if (m(i, j) != Scalar(0))
          fail(std::string(name) + " not strictly lower triangular", i, j,
               std::abs(static_cast<double>(m(i, j))));
  };
  check_strict_lower(t.A, "A");
  check_strict_lower(t.Abar, "Abar");

  for (int i = 0; i < p; ++i) {
    const double res = std::abs(static_cast<double>(t.U.row(i).sum() - Scalar(1)));
    if (res > tol) fail("U row sum != 1", i, -1, res);
  }

  for (int i = 1; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      const double res = std::abs(static_cast<double>(t.V(i, j) - t.V(0, j)));
      if (res > tol) fail("V not rank-one (rows differ)", i, j, res);
    }
  const double vsum = std::abs(static_cast<double>(t.V.row(0).sum() - Scalar(1)));
  if (vsum > tol) fail("V row sum != 1", 0, -1, vsum);
  return report;
}

/// Autonomous problem y' = f(y) with second derivative g(y) = f'(y) f(y).
struct OdeSystem {
  using Field = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using Solution = std::function<Eigen::VectorXd(double)>;

  std::string name;
  int dim = 0;
  Field f;
  Field g;
  Solution exact;  // empty when no closed form is known
  Eigen::VectorXd y0;
  double x0 = 0.0;
  double x_end = 0.0;

  bool has_exact() const { return static_cast<bool>(exact); }
};

struct SecondDerivativeCheck {
  double residual = 0.0;   // ||g - J_fd f||_inf
  double threshold = 0.0;  // tol * (1 + ||g||_inf)
  bool ok() const { return residual <= threshold; }
};

/// Compares g(y) with a central-difference Jacobian applied to f(y).
SecondDerivativeCheck check_second_derivative(const OdeSystem& problem,
                                              const Eigen::VectorXd& y,
                                              double tol = 1e-5);

/// Monotone abscissae with stepsizes h_n = x_{n+1} - x_n.
class Grid {
 public:
  Grid(std::vector<double> points, std::vector<double> steps);

  int size() const { return static_cast<int>(steps_.size()); }  // N
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& steps() const { return steps_; }
  double point(int n) const { return points_[n]; }
  double step(int n) const { return steps_[n]; }

  /// sigma_{n,i} = h_{n-i} / h_n for i = 1..rho; requires n >= rho.
  StepRatios<double> ratios(int n, int rho) const;

 private:
  std::vector<double> points_;
  std::vector<double> steps_;
};

/// y^[n] stored column-wise: column k holds y_{n-k}.
struct SolutionState {
  long n = 0;
  double x = 0.0;
  Eigen::MatrixXd blocks;

  int r() const { return static_cast<int>(blocks.cols()); }
  int dim() const { return static_cast<int>(blocks.rows()); }
};

struct ConvergenceRow {
  long N = 0;
  double ge = 0.0;
  std::optional<double> order_estimate;
};

}  // namespace vssdimsim

#endif  // VSSDIMSIM_CORE_HPP
