#include "vssdimsim/harness.hpp"

#include "vssdimsim/grids.hpp"
#include "vssdimsim/orderconds.hpp"
#include "vssdimsim/tableau.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace vssdimsim {

double observed_order(double ge1, double ge2, double N1, double N2) {
  if (!(ge1 > 0 && ge2 > 0 && N1 > 0 && N2 > 0))
    throw std::invalid_argument("observed_order needs positive arguments");
  if (N1 == N2) throw std::invalid_argument("observed_order needs distinct step counts");
  return std::log(ge1 / ge2) / std::log(N2 / N1);
}

int harness_threads() {
  if (const char* env = std::getenv("VS_SDIMSIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0) return static_cast<int>(v);
    throw std::invalid_argument("VS_SDIMSIM_THREADS must be a non-negative integer");
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

// Runs job(i) for i in [0, count) on up to `threads` workers; 0 or 1 runs
// inline. The first exception is rethrown after all workers finish.
template <typename Job>
void run_cells(int count, int threads, Job job) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(threads, count); ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<ConvergenceRow> converge(const OdeSystem& problem, int p, double base,
                                     const std::vector<int>& Ns, const ConvergeOptions& opts) {
  if (!std::is_sorted(Ns.begin(), Ns.end()))
    throw std::invalid_argument("step counts must be ascending");
  const Eigen::VectorXd truth = truth_at_end(problem);
  std::vector<ConvergenceRow> rows(Ns.size());
  IntegrateOptions io;
  io.start = opts.start;
  const int threads = opts.threads < 0 ? harness_threads() : opts.threads;

  run_cells(static_cast<int>(Ns.size()), threads, [&](int i) {
    const Grid grid = opts.uniform ? uniform_grid(problem.x0, problem.x_end, Ns[i])
                                   : pattern_grid(problem.x0, problem.x_end, Ns[i], base);
    const IntegrationResult res = integrate(problem, grid, p, io);
    rows[i].N = Ns[i];
    rows[i].ge = global_error(res.y_final, truth, opts.norm);
  });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i - 1].ge > 0 && rows[i].ge > 0)
      rows[i].order_estimate = observed_order(rows[i - 1].ge, rows[i].ge,
                                              static_cast<double>(rows[i - 1].N),
                                              static_cast<double>(rows[i].N));
  return rows;
}

// ---- verification sweep ----

namespace {

double relative_deviation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double d = std::abs(a(i, j) - ref(i, j));
      const double scale = std::abs(ref(i, j));
      worst = std::max(worst, scale > 1e-8 ? d / scale : d);
    }
  return worst;
}

double closed_form_deviation(int p, const StepRatios<double>& sigma) {
  Tableau<double> solved, closed;
  if (p == 2) {
    solved = solve_coefficients(fixed_parts_order2(sigma), sigma);
    closed = order2(sigma);
  } else if (p == 3) {
    solved = order3(sigma);
    closed = order3_closed_form(sigma);
  } else {
    return 0.0;
  }
  return std::max({relative_deviation(solved.A, closed.A), relative_deviation(solved.U, closed.U),
                   relative_deviation(solved.B, closed.B)});
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

}  // namespace

constexpr double kClosedFormTol = 1e-10;

VerifyReport verify_sweep(const std::vector<int>& orders, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  VerifyReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logu(std::log(0.5), std::log(2.0));

  for (int p : orders) {
    if (p < 1 || p > 4) throw std::invalid_argument("order must be 1, 2, 3 or 4");
    VerifySummary sum;
    sum.p = p;
    sum.tier = residual_tier(p);
    for (int k = 0; k < samples; ++k) {
      Eigen::VectorXd sv = Eigen::VectorXd::Ones(p - 1);
      if (k > 0)
        for (int i = 0; i < p - 1; ++i) sv(i) = std::exp(logu(rng));
      const StepRatios<double> sigma(sv);
      const Tableau<double> t = make_tableau(p, sigma);

      VerifyRow row;
      row.p = p;
      row.sigma.assign(sv.data(), sv.data() + sv.size());
      row.stage = max_abs(stage_residual(t));
      row.output = max_abs(output_residual(t));
      const Eigen::VectorXd phi = error_constant(t);
      row.phi_first = phi(0);
      row.error_constant = t.v().dot(phi);
      row.closed_form_dev = closed_form_deviation(p, sigma);
      row.ok = row.stage <= sum.tier && row.output <= sum.tier &&
               row.closed_form_dev <= kClosedFormTol;

      sum.max_stage = std::max(sum.max_stage, row.stage);
      sum.max_output = std::max(sum.max_output, row.output);
      sum.max_closed_form_dev = std::max(sum.max_closed_form_dev, row.closed_form_dev);
      if (k == 0) {
        sum.phi_first_at_e = row.phi_first;
        sum.error_constant_at_e = row.error_constant;
      }
      sum.ok = sum.ok && row.ok;
      rep.rows.push_back(std::move(row));
    }
    rep.summary.push_back(sum);
  }
  return rep;
}

bool VerifyReport::ok() const {
  return std::all_of(summary.begin(), summary.end(), [](const auto& s) { return s.ok; });
}

std::string VerifyReport::csv() const {
  std::ostringstream out;
  out << "method,sigma,max_stage_residual,max_output_residual,phi_first_component,"
         "error_constant,closed_form_deviation\n";
  for (const auto& r : rows) {
    out << "p" << r.p << ',';
    for (std::size_t i = 0; i < r.sigma.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", r.sigma[i]);
      out << (i ? ";" : "") << buf;
    }
    out << ',' << fmt(r.stage) << ',' << fmt(r.output) << ',' << fmt(r.phi_first) << ','
        << fmt(r.error_constant) << ',' << fmt(r.closed_form_dev) << '\n';
  }
  return out.str();
}

std::string VerifyReport::summary_text() const {
  std::ostringstream out;
  for (const auto& s : summary) {
    out << "p=" << s.p << " samples ok=" << (s.ok ? "yes" : "NO") << " stage=" << fmt(s.max_stage)
        << " output=" << fmt(s.max_output) << " tier=" << fmt(s.tier)
        << " closed_form=" << fmt(s.max_closed_form_dev) << " phi1(e)=" << fmt(s.phi_first_at_e)
        << " C(e)=" << fmt(s.error_constant_at_e) << '\n';
  }
  return out.str();
}

// ---- table output ----

TableFormat parse_format(const std::string& name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "markdown" || name == "md") return TableFormat::Markdown;
  if (name == "json") return TableFormat::Json;
  throw std::invalid_argument("unknown format '" + name + "' (csv, markdown, json)");
}

std::string format_ge(double ge) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6e", ge);
  std::string s = buf;
  // Drop exponent zero padding: e-04 -> e-4, e+00 -> e+0.
  const auto e = s.find('e');
  if (e != std::string::npos && e + 2 < s.size()) {
    std::size_t d = e + 2;
    while (d + 1 < s.size() && s[d] == '0') s.erase(d, 1);
  }
  return s;
}

std::string emit_table(const std::vector<ConvergenceRow>& rows, TableFormat format) {
  std::ostringstream out;
  char buf[64];
  switch (format) {
    case TableFormat::Csv:
      out << "N,ge,O_N\n";
      for (const auto& r : rows) {
        out << r.N << ',' << format_ge(r.ge) << ',';
        if (r.order_estimate) {
          std::snprintf(buf, sizeof buf, "%.2f", *r.order_estimate);
          out << buf;
        }
        out << '\n';
      }
      break;
    case TableFormat::Markdown:
      out << "| N | ge | O_N |\n|---:|---:|---:|\n";
      for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.2e", r.ge);
        out << "| " << r.N << " | " << buf << " | ";
        if (r.order_estimate) {
          std::snprintf(buf, sizeof buf, "%.2f", *r.order_estimate);
          out << buf;
        } else {
          out << "-";
        }
        out << " |\n";
      }
      break;
    case TableFormat::Json: {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : rows) {
        nlohmann::json o{{"N", r.N}, {"ge", r.ge}};
        o["O_N"] = r.order_estimate ? nlohmann::json(*r.order_estimate) : nlohmann::json(nullptr);
        j.push_back(std::move(o));
      }
      out << j.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

std::vector<ConvergenceRow> rows_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array of rows");
  std::vector<ConvergenceRow> rows;
  for (const auto& o : j) {
    ConvergenceRow r;
    r.N = o.at("N").get<long>();
    r.ge = o.at("ge").get<double>();
    if (o.contains("O_N") && !o.at("O_N").is_null()) r.order_estimate = o.at("O_N").get<double>();
    rows.push_back(r);
  }
  return rows;
}

}  // namespace vssdimsim
