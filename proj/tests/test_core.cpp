#include "vssdimsim/core.hpp"
#include "vssdimsim/problems.hpp"
#include "vssdimsim/tableau.hpp"

#include <doctest.h>

#include <random>

using namespace vssdimsim;

TEST_CASE("order-1 tableau validates") {
  const auto t = order1<double>();
  const auto rep = validate_tableau(t);
  CHECK(rep.ok());
  CHECK(rep.to_string() == "ok");
  CHECK(t.Bbar(0, 0) == 0.499);
}

TEST_CASE("identity V is rejected as not rank-one") {
  auto t = order2(StepRatios<double>{1.0});
  t.V = Eigen::MatrixXd::Identity(2, 2);
  const auto rep = validate_tableau(t);
  CHECK_FALSE(rep.ok());
  CHECK(rep.mentions("V not rank-one"));
}

TEST_CASE("perturbed u21 breaks the U row sum") {
  auto t = order2(StepRatios<double>{1.0});
  t.U(1, 0) += 1e-6;
  const auto rep = validate_tableau(t);
  REQUIRE_FALSE(rep.ok());
  CHECK(rep.mentions("U row sum"));
  CHECK(rep.violations.front().row == 1);
  CHECK(rep.violations.front().residual == doctest::Approx(1e-6).epsilon(1e-6));
}

TEST_CASE("upper-triangular A entry is reported with its location") {
  auto t = order3(StepRatios<double>{1.0, 1.0});
  t.A(0, 2) = 0.5;
  const auto rep = validate_tableau(t);
  REQUIRE(rep.mentions("A not strictly lower"));
  CHECK(rep.violations.front().row == 0);
  CHECK(rep.violations.front().col == 2);
}

TEST_CASE("wrong sigma length and shapes are reported") {
  auto t = order2(StepRatios<double>{1.0});
  t.sigma = StepRatios<double>{1.0, 2.0};
  CHECK(validate_tableau(t).mentions("sigma"));
  t = order2(StepRatios<double>{1.0});
  t.B = Eigen::MatrixXd::Zero(3, 2);
  CHECK(validate_tableau(t).mentions("B has shape"));
}

TEST_CASE("non-finite entries are reported") {
  auto t = order2(StepRatios<double>{1.0});
  t.Bbar(0, 1) = std::nan("");
  CHECK(validate_tableau(t).mentions("Bbar entry not finite"));
}

TEST_CASE("constructed tableaux validate over sigma in [0.2, 5]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logu(std::log(0.2), std::log(5.0));
  for (int p = 1; p <= 4; ++p)
    for (int k = 0; k < 50; ++k) {
      Eigen::VectorXd s(p - 1);
      for (int i = 0; i < p - 1; ++i) s(i) = std::exp(logu(rng));
      const auto t = make_tableau(p, StepRatios<double>(s));
      INFO("p = " << p);
      CHECK(validate_tableau(t, 1e-11).ok());
    }
}

TEST_CASE("V(sigma) V(sigma') collapses to e v(sigma')^T") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (int p = 1; p <= 4; ++p)
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd a(p - 1), b(p - 1);
      for (int i = 0; i < p - 1; ++i) a(i) = u(rng), b(i) = u(rng);
      const auto t1 = make_tableau(p, StepRatios<double>(a));
      const auto t2 = make_tableau(p, StepRatios<double>(b));
      const Eigen::MatrixXd prod = t1.V * t2.V;
      const Eigen::MatrixXd expect = Eigen::VectorXd::Ones(p) * t2.v().transpose();
      CHECK((prod - expect).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("step ratios must be positive and finite") {
  CHECK_THROWS_AS(StepRatios<double>({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepRatios<double>({-2.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepRatios<double>({std::numeric_limits<double>::infinity()}), std::invalid_argument);
  const StepRatios<double> s{2.0, 3.0};
  const Eigen::VectorXd c = s.cumulative();
  CHECK(c(0) == 0.0);
  CHECK(c(1) == 2.0);
  CHECK(c(2) == 5.0);
  CHECK(StepRatios<double>::ones(3).values().sum() == 3.0);
}

TEST_CASE("second-derivative probe accepts M^2 y and rejects a wrong g") {
  auto lin = linear2d();
  Eigen::VectorXd y(2);
  y << 0.3, -1.7;
  CHECK(check_second_derivative(lin, y).ok());
  lin.g = [](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v; };
  const auto bad = check_second_derivative(lin, y);
  CHECK_FALSE(bad.ok());
  CHECK(bad.residual > 1.0);
}

TEST_CASE("grid construction and ratios") {
  const Grid g({0.0, 1.0, 3.0, 3.5}, {1.0, 2.0, 0.5});
  CHECK(g.size() == 3);
  const auto s = g.ratios(2, 2);
  CHECK(s[0] == doctest::Approx(4.0));
  CHECK(s[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(g.ratios(1, 2), std::out_of_range);
  CHECK_THROWS_AS(Grid({0.0, 1.0, 0.5}, {1.0, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Grid({0.0, 1.0}, {0.5}), std::invalid_argument);
}
