#pragma once

// JSON -> library objects. Every builder throws SpecError on malformed input;
// constructor invariants (nonnegativity, sizes) surface as SpecError too.

#include "app.hpp"

#include "gronwall/gronwall.hpp"

#include <optional>
#include <string>

namespace gronwall::app::ingest {

const json& require(const json& obj, const char* key, const std::string& where);
double number(const json& v, const std::string& where);
double number_or(const json& obj, const char* key, double fallback, const std::string& where);
long long integer_or(const json& obj, const char* key, long long fallback, const std::string& where);

VectorXd vector(const json& v, const std::string& where);
MatrixXd matrix(const json& v, const std::string& where);

/// Number, node table, or {"form": constant|linear|exp|sin, ...} sampled on `g`.
VectorXd coefficient(const json& v, const std::optional<Grid<double>>& g, const std::string& where);

Grid<double> grid(const GridSpec& gs);

VolterraKernel<double> kernel(const json& v, const Grid<double>& g);

/// {"name": linear|sin|exp|polynomial, ...}, applied pointwise.
Nonlinearity<double> nonlinearity(const json& v);

NonnegMatrix<double> semilinear_operator(const json& v, const std::optional<Grid<double>>& g);

}  // namespace gronwall::app::ingest
