#include "vssdimsim/io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace vssdimsim {

using nlohmann::json;

namespace {

json rows_of(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json list_of(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::MatrixXd matrix_from(const json& j, const char* key) {
  const json& rows = j.at(key);
  if (!rows.is_array()) throw std::invalid_argument(std::string(key) + " must be an array of rows");
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = nr == 0 ? Eigen::Index(0) : static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != nc)
      throw std::invalid_argument(std::string(key) + " has ragged rows");
    for (Eigen::Index k = 0; k < nc; ++k) m(i, k) = rows[i][k].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from(const json& j, const char* key) {
  const json& a = j.at(key);
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = a[i].get<double>();
  return v;
}

}  // namespace

json tableau_to_json(const Tableau<double>& t) {
  return json{{"p", t.p},
              {"c", list_of(t.c)},
              {"A", rows_of(t.A)},
              {"Abar", rows_of(t.Abar)},
              {"U", rows_of(t.U)},
              {"B", rows_of(t.B)},
              {"Bbar", rows_of(t.Bbar)},
              {"V", rows_of(t.V)},
              {"sigma", list_of(t.sigma.values())}};
}

Tableau<double> tableau_from_json(const json& j) {
  Tableau<double> t;
  t.p = j.at("p").get<int>();
  t.c = vector_from(j, "c");
  t.A = matrix_from(j, "A");
  t.Abar = matrix_from(j, "Abar");
  t.U = matrix_from(j, "U");
  t.B = matrix_from(j, "B");
  t.Bbar = matrix_from(j, "Bbar");
  t.V = matrix_from(j, "V");
  t.sigma = StepRatios<double>(vector_from(j, "sigma"));
  return t;
}

std::string tableau_table(const Tableau<double>& t) {
  std::ostringstream out;
  char buf[64];
  auto put_matrix = [&](const char* name, const Eigen::MatrixXd& m) {
    out << name << " =\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out << " ";
      for (Eigen::Index k = 0; k < m.cols(); ++k) {
        std::snprintf(buf, sizeof buf, " %22.15e", m(i, k));
        out << buf;
      }
      out << '\n';
    }
  };
  out << "p = " << t.p << "\nsigma =";
  for (int i = 0; i < t.sigma.size(); ++i) {
    std::snprintf(buf, sizeof buf, " %.15g", t.sigma[i]);
    out << buf;
  }
  out << "\n";
  put_matrix("c", t.c.transpose());
  put_matrix("A", t.A);
  put_matrix("Abar", t.Abar);
  put_matrix("U", t.U);
  put_matrix("B", t.B);
  put_matrix("Bbar", t.Bbar);
  put_matrix("V", t.V);
  return out.str();
}

}  // namespace vssdimsim
