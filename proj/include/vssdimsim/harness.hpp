#ifndef VSSDIMSIM_HARNESS_HPP
#define VSSDIMSIM_HARNESS_HPP

#include "vssdimsim/core.hpp"
#include "vssdimsim/integrator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vssdimsim {

/// O_N = log(ge1 / ge2) / log(N2 / N1).
double observed_order(double ge1, double ge2, double N1, double N2);

struct ConvergeOptions {
  Norm norm = Norm::Euclidean;
  bool uniform = false;
  StartMode start = StartMode::Automatic;
  int threads = -1;  // < 0: VS_SDIMSIM_THREADS or hardware concurrency
};

/// Worker count from VS_SDIMSIM_THREADS; 0 means sequential.
int harness_threads();

std::vector<ConvergenceRow> converge(const OdeSystem& problem, int p, double base,
                                     const std::vector<int>& Ns,
                                     const ConvergeOptions& opts = {});

struct VerifyRow {
  int p = 0;
  std::vector<double> sigma;
  double stage = 0.0;
  double output = 0.0;
  double phi_first = 0.0;
  double error_constant = 0.0;   // v^T phi
  double closed_form_dev = 0.0;  // solver vs closed form, p = 2, 3
  bool ok = true;
};

struct VerifySummary {
  int p = 0;
  double max_stage = 0.0;
  double max_output = 0.0;
  double max_closed_form_dev = 0.0;
  double phi_first_at_e = 0.0;
  double error_constant_at_e = 0.0;
  double tier = 0.0;
  bool ok = true;
};

struct VerifyReport {
  std::vector<VerifyRow> rows;
  std::vector<VerifySummary> summary;
  bool ok() const;
  std::string csv() const;
  std::string summary_text() const;
};

/// Residual sweep over log-uniform sigma in [0.5, 2]; the first sample of
/// each order is sigma = e.
VerifyReport verify_sweep(const std::vector<int>& orders, int samples, std::uint64_t seed);

enum class TableFormat { Csv, Markdown, Json };

TableFormat parse_format(const std::string& name);
std::string format_ge(double ge);
std::string emit_table(const std::vector<ConvergenceRow>& rows, TableFormat format);
std::vector<ConvergenceRow> rows_from_json(const std::string& text);

}  // namespace vssdimsim

#endif  // VSSDIMSIM_HARNESS_HPP
