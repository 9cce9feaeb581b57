/// @file network_io.hpp
/// @brief JSON network documents.
/// @details Layout: {"n", "m", "ownership" (n rows of m), "cross_holdings"
/// (n x n), "self_ownership" (n), "prices" (m), optional "failure_spec"
/// {"critical_values", "failure_magnitudes"}}. Numbers are written with 17
/// significant digits so a save/load cycle is lossless.

#pragma once
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "crashnet/network.hpp"

namespace crashnet {

struct NetworkDocument {
  FinancialNetwork network;
  std::optional<FailureSpec> failure;
};

/// %.17g; round-trips every finite double.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

template <class Vec>
void write_row(std::ostream& os, const Vec& row) {
  os << '[';
  for (Eigen::Index k = 0; k < row.size(); ++k) {
    if (k) os << ", ";
    os << format_double(row[k]);
  }
  os << ']';
}

inline void write_matrix(std::ostream& os, const Matrix& a,
                         const std::string& indent) {
  os << "[\n";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    os << indent << "  ";
    write_row(os, Vector(a.row(i).transpose()));
    os << (i + 1 < a.rows() ? ",\n" : "\n");
  }
  os << indent << ']';
}

inline std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline const nlohmann::json& require(const nlohmann::json& obj,
                                     const std::string& field) {
  auto it = obj.find(field);
  if (it == obj.end()) throw ParseError("missing field '" + field + "'");
  return *it;
}

inline double number_at(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + " is not a number");
  return v.get<double>();
}

inline Vector read_vector(const nlohmann::json& obj, const std::string& field,
                          std::size_t len) {
  const auto& arr = require(obj, field);
  if (!arr.is_array()) throw ParseError("'" + field + "' must be an array");
  if (arr.size() != len)
    throw ParseError("'" + field + "' has " + std::to_string(arr.size()) +
                     " entries, expected " + std::to_string(len));
  Vector v(static_cast<Eigen::Index>(len));
  for (std::size_t k = 0; k < len; ++k)
    v[static_cast<Eigen::Index>(k)] =
        number_at(arr[k], field + "[" + std::to_string(k) + "]");
  return v;
}

inline Matrix read_matrix(const nlohmann::json& obj, const std::string& field,
                          std::size_t rows, std::size_t cols) {
  const auto& arr = require(obj, field);
  if (!arr.is_array()) throw ParseError("'" + field + "' must be an array");
  if (arr.size() < rows)
    throw ParseError("'" + field + "' is missing row " +
                     std::to_string(arr.size()) + " (expected " +
                     std::to_string(rows) + " rows)");
  if (arr.size() > rows)
    throw ParseError("'" + field + "' has extra row " + std::to_string(rows) +
                     " (expected " + std::to_string(rows) + " rows)");
  Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = arr[i];
    const std::string where = field + " row " + std::to_string(i);
    if (!row.is_array() || row.size() != cols)
      throw ParseError(where + " must have " + std::to_string(cols) +
                       " entries");
    for (std::size_t j = 0; j < cols; ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          number_at(row[j], where + " column " + std::to_string(j));
  }
  return a;
}

}  // namespace detail

inline std::string network_to_json(const FinancialNetwork& net,
                                   const FailureSpec* failure = nullptr) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"n\": " << net.n_institutions() << ",\n";
  os << "  \"m\": " << net.n_assets() << ",\n";
  os << "  \"ownership\": ";
  detail::write_matrix(os, net.ownership, "  ");
  os << ",\n  \"cross_holdings\": ";
  detail::write_matrix(os, net.cross_holdings, "  ");
  os << ",\n  \"self_ownership\": ";
  detail::write_row(os, net.self_ownership);
  os << ",\n  \"prices\": ";
  detail::write_row(os, net.prices);
  if (failure) {
    os << ",\n  \"failure_spec\": {\n    \"critical_values\": ";
    detail::write_row(os, failure->critical_values);
    os << ",\n    \"failure_magnitudes\": ";
    detail::write_row(os, failure->failure_magnitudes);
    os << "\n  }";
  }
  os << "\n}\n";
  return os.str();
}

/// Parses and validates a network document. Throws ParseError naming the
/// offending line or field.
inline NetworkDocument network_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), detail::line_of_byte(text, e.byte));
  }
  if (!doc.is_object()) throw ParseError("network document must be an object");

  const auto& jn = detail::require(doc, "n");
  const auto& jm = detail::require(doc, "m");
  if (!jn.is_number_unsigned() || !jm.is_number_unsigned() ||
      jn.get<std::size_t>() < 1 || jm.get<std::size_t>() < 1)
    throw ParseError("'n' and 'm' must be positive integers");
  const auto n = jn.get<std::size_t>();
  const auto m = jm.get<std::size_t>();

  NetworkDocument out;
  auto& net = out.network;
  net.ownership = detail::read_matrix(doc, "ownership", n, m);
  net.cross_holdings = detail::read_matrix(doc, "cross_holdings", n, n);
  net.self_ownership = detail::read_vector(doc, "self_ownership", n);
  net.prices = detail::read_vector(doc, "prices", m);

  if (auto it = doc.find("failure_spec"); it != doc.end() && !it->is_null()) {
    FailureSpec fs;
    fs.critical_values = detail::read_vector(*it, "critical_values", n);
    fs.failure_magnitudes = detail::read_vector(*it, "failure_magnitudes", n);
    auto bad = validate(fs, n);
    if (!bad.empty()) throw ParseError("failure_spec: " + bad.front().message);
    out.failure = std::move(fs);
  }

  auto bad = validate(net);
  if (!bad.empty()) {
    std::string msg = "invalid network:";
    for (const auto& v : bad) msg += " " + v.message + ";";
    throw ParseError(msg);
  }
  return out;
}

inline void save_network(const FinancialNetwork& net, const std::string& path,
                         const FailureSpec* failure = nullptr) {
  std::ofstream os(path);
  if (!os) throw ParameterError("cannot open '" + path + "' for writing");
  os << network_to_json(net, failure);
  if (!os) throw ParameterError("write to '" + path + "' failed");
}

inline NetworkDocument load_network(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return network_from_json(ss.str());
}

}  // namespace crashnet
