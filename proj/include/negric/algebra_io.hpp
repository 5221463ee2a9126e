#pragma once

// JSON round-tripping for algebras and rational matrices. Rationals are
// written as "p/q" strings; indices in files are 1-based.

#include <json.hpp>

#include <cstddef>
#include <string>
#include <vector>

#include "negric/error.hpp"
#include "negric/lie_algebra.hpp"
#include "negric/rational.hpp"

namespace negric {

using Json = nlohmann::json;

inline Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(Integer(std::to_string(j.get<long long>()), 10));
  throw Error(ErrorCode::Parse, "expected a rational as \"p/q\" string or integer, got " + j.dump());
}

inline Json algebra_to_json(const LieAlgebra& g) {
  Json brackets = Json::array();
  for (const auto& [ij, terms] : g.table().entries()) {
    Json ts = Json::array();
    for (const auto& [k, c] : terms) ts.push_back({{"k", k + 1}, {"c", to_string(c)}});
    brackets.push_back({{"i", ij.first + 1}, {"j", ij.second + 1}, {"terms", ts}});
  }
  return {{"dim", g.dim()}, {"labels", g.labels()}, {"brackets", brackets}};
}

/// Parses and validates (Jacobi included) an algebra document.
inline LieAlgebra algebra_from_json(const Json& j) {
  require(j.is_object() && j.contains("dim") && j.contains("brackets"), ErrorCode::Parse,
          "algebra JSON needs \"dim\" and \"brackets\"");
  require(j.at("dim").is_number_unsigned() || (j.at("dim").is_number_integer() && j.at("dim").get<long long>() > 0),
          ErrorCode::Parse, "\"dim\" must be a positive integer");
  const auto n = j.at("dim").get<std::size_t>();
  require(n > 0, ErrorCode::Parse, "\"dim\" must be a positive integer");
  StructureTable t = j.contains("labels") ? StructureTable(n, j.at("labels").get<std::vector<std::string>>())
                                          : StructureTable(n);
  for (const auto& b : j.at("brackets")) {
    const auto i = b.at("i").get<long long>(), jj = b.at("j").get<long long>();
    require(i >= 1 && jj >= 1 && i < jj && static_cast<std::size_t>(jj) <= n, ErrorCode::Parse,
            "bracket indices must satisfy 1 <= i < j <= dim");
    for (const auto& term : b.at("terms")) {
      const auto k = term.at("k").get<long long>();
      require(k >= 1 && static_cast<std::size_t>(k) <= n, ErrorCode::Parse, "bracket term index out of range");
      const Rational c = rational_from_json(term.at("c"));
      require(c != 0, ErrorCode::Parse, "bracket coefficients must be nonzero");
      t.add(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(jj - 1), static_cast<std::size_t>(k - 1), c);
    }
  }
  return LieAlgebra(std::move(t));
}

inline Json matrix_to_json(const RationalMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline RationalMatrix matrix_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), ErrorCode::Parse, "matrix JSON must be a nonempty array of rows");
  const std::size_t rows = j.size(), cols = j.front().size();
  RationalMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    require(j[r].is_array() && j[r].size() == cols, ErrorCode::Parse, "matrix rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rational_from_json(j[r][c]);
  }
  return m;
}

}  // namespace negric
