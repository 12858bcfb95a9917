#include "vssdimsim/grids.hpp"
#include "vssdimsim/harness.hpp"
#include "vssdimsim/integrator.hpp"
#include "vssdimsim/io.hpp"
#include "vssdimsim/orderconds.hpp"
#include "vssdimsim/problems.hpp"
#include "vssdimsim/tableau.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace vssdimsim;

namespace {

const std::map<std::string, Norm> kNorms{{"euclid", Norm::Euclidean}, {"max", Norm::Max}};

Grid make_grid(const OdeSystem& prob, int steps, double base, bool uniform) {
  return uniform ? uniform_grid(prob.x0, prob.x_end, steps)
                 : pattern_grid(prob.x0, prob.x_end, steps, base);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable stepsize explicit SDIMSIMs of orders 1-4"};
  app.require_subcommand(1);

  std::string problem = "linear";
  int order = 2, steps = 1000, pde_grid = 50;
  double base = 2.0;
  bool uniform = false, as_json = false, as_table = false, full_csv = false;
  std::string format = "csv", norm = "euclid", sigma_text;
  std::vector<int> step_list{1000, 2000, 4000, 8000, 16000};
  std::vector<int> orders{1, 2, 3, 4};
  int samples = 1000;
  std::uint64_t seed = 42;

  auto add_problem = [&](CLI::App* cmd) {
    cmd->add_option("--problem", problem, "linear, bruss or bruss-pde")
        ->check(CLI::IsMember({"linear", "bruss", "bruss-pde"}));
    cmd->add_option("--order", order, "method order")->check(CLI::Range(1, 4));
    cmd->add_option("--base", base, "stepsize pattern base")->check(CLI::PositiveNumber);
    cmd->add_flag("--uniform", uniform, "use a uniform grid");
    cmd->add_option("--pde-grid", pde_grid, "spatial points of the MOL problem")
        ->check(CLI::Range(2, 100000));
    cmd->add_option("--norm", norm, "global error norm: euclid or max")
        ->check(CLI::IsMember({"euclid", "max"}));
  };

  auto* run = app.add_subcommand("run", "integrate one problem on one grid");
  add_problem(run);
  run->add_option("--steps", steps, "number of steps N")->check(CLI::Range(1, 100000000));
  run->add_flag("--json", as_json, "print the result as JSON");

  auto* conv = app.add_subcommand("converge", "global errors and observed orders over N");
  add_problem(conv);
  conv->add_option("--steps", step_list, "ascending step counts")->delimiter(',');
  conv->add_option("--format", format, "csv, markdown or json")
      ->check(CLI::IsMember({"csv", "markdown", "md", "json"}));

  auto* ver = app.add_subcommand("verify", "order-condition residual sweep over random ratios");
  ver->add_option("--orders", orders, "orders to check")->delimiter(',')->check(CLI::Range(1, 4));
  ver->add_option("--samples", samples, "ratio vectors per order")->check(CLI::PositiveNumber);
  ver->add_option("--seed", seed, "random seed");
  ver->add_flag("--csv", full_csv, "print every sample as CSV");

  auto* coeffs = app.add_subcommand("coeffs", "print a tableau");
  coeffs->add_option("--order", order, "method order")->check(CLI::Range(1, 4));
  coeffs->add_option("--sigma", sigma_text, "comma-separated step ratios (default all ones)");
  auto* jflag = coeffs->add_flag("--json", as_json, "JSON output (default)");
  coeffs->add_flag("--table", as_table, "plain-text output")->excludes(jflag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const OdeSystem prob = make_problem(problem, pde_grid);
      const Grid grid = make_grid(prob, steps, base, uniform);
      const IntegrationResult res = integrate(prob, grid, order);
      const Eigen::VectorXd truth = truth_at_end(prob);
      const double ge = global_error(res.y_final, truth, kNorms.at(norm));
      if (as_json) {
        nlohmann::json j{{"problem", prob.name}, {"order", order}, {"N", steps},
                         {"x_N", grid.points().back()}, {"ge", ge},
                         {"f_evals", res.n_f_evals}, {"g_evals", res.n_g_evals}};
        j["y_N"] = std::vector<double>(res.y_final.data(), res.y_final.data() + res.y_final.size());
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << "x_N = " << num(grid.points().back()) << '\n';
        for (Eigen::Index i = 0; i < res.y_final.size(); ++i)
          std::cout << "y_N[" << i << "] = " << num(res.y_final(i)) << '\n';
        std::cout << "ge = " << format_ge(ge) << (prob.has_exact() ? " (exact)" : " (reference)")
                  << '\n'
                  << "f_evals = " << res.n_f_evals << "\ng_evals = " << res.n_g_evals << '\n';
      }
      return 0;
    }
    if (*conv) {
      const OdeSystem prob = make_problem(problem, pde_grid);
      ConvergeOptions co;
      co.norm = kNorms.at(norm);
      co.uniform = uniform;
      const auto rows = converge(prob, order, base, step_list, co);
      std::cout << emit_table(rows, parse_format(format));
      return 0;
    }
    if (*ver) {
      const VerifyReport rep = verify_sweep(orders, samples, seed);
      if (full_csv) {
        std::cout << rep.csv();
        std::cerr << rep.summary_text();
      } else {
        std::cout << rep.summary_text();
      }
      return rep.ok() ? 0 : 1;
    }
    if (*coeffs) {
      Eigen::VectorXd sv = Eigen::VectorXd::Ones(order - 1);
      if (!sigma_text.empty()) {
        std::vector<double> vals;
        std::stringstream ss(sigma_text);
        for (std::string item; std::getline(ss, item, ',');) vals.push_back(std::stod(item));
        if (static_cast<int>(vals.size()) != order - 1)
          throw std::invalid_argument("order " + std::to_string(order) + " needs " +
                                      std::to_string(order - 1) + " step ratios");
        sv = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
      }
      const Tableau<double> t = make_tableau(order, StepRatios<double>(sv));
      if (as_table)
        std::cout << tableau_table(t);
      else
        std::cout << tableau_to_json(t).dump(2) << '\n';
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
