#ifndef VSSDIMSIM_IO_HPP
#define VSSDIMSIM_IO_HPP

#include "vssdimsim/core.hpp"

#include <json.hpp>

#include <string>

namespace vssdimsim {

/// Keys p, c, A, Abar, U, B, Bbar, V, sigma; matrices as arrays of rows.
nlohmann::json tableau_to_json(const Tableau<double>& t);
Tableau<double> tableau_from_json(const nlohmann::json& j);

/// Plain-text dump of the coefficient matrices.
std::string tableau_table(const Tableau<double>& t);

}  // namespace vssdimsim

#endif  // VSSDIMSIM_IO_HPP
