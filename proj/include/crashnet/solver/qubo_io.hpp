/// @file qubo_io.hpp
/// @brief Text interchange format read by qbsolv-style tools.
/// @details
///   c offset <value>
///   c ancilla <id> <kind> <source vars...>     (one per registered ancilla)
///   p qubo 0 <maxNodes> <nNodes> <nCouplers>
///   i i <value>                                 (nNodes lines)
///   i j <value>                                 (nCouplers lines, i < j)
/// Only nonzero coefficients are written; maxNodes carries the size.
/// Values use 17 significant digits, so a round trip is exact.

#pragma once
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "crashnet/error.hpp"
#include "crashnet/qubo.hpp"

namespace crashnet {

namespace detail {

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

inline std::uint64_t parse_index(const std::string& tok, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw ParseError("expected a non-negative integer, got '" + tok + "'", line);
  return v;
}

inline double parse_value(const std::string& tok, std::size_t line) {
  // strtod is correctly rounded, so %.17g text comes back bit-identical
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || !std::isfinite(v))
    throw ParseError("expected a finite number, got '" + tok + "'", line);
  return v;
}

inline GadgetKind parse_kind(const std::string& tok, std::size_t line) {
  for (auto k : {GadgetKind::k_ancilla, GadgetKind::single_ancilla, GadgetKind::k_ancilla_fallback})
    if (tok == to_string(k)) return k;
  throw ParseError("unknown ancilla kind '" + tok + "'", line);
}

}  // namespace detail

inline std::string write_qubo_string(const Qubo& q) {
  if (auto issues = q.check(); !issues.empty())
    throw ParameterError("write_qubo: " + issues.front());
  if (!std::isfinite(q.offset())) throw ParameterError("write_qubo: non-finite offset");
  std::string out = "c offset " + detail::g17(q.offset()) + "\n";
  for (const auto& [id, info] : q.ancillas()) {
    out += "c ancilla " + std::to_string(id) + " " + to_string(info.kind);
    for (VarId v : info.source_term) out += " " + std::to_string(v);
    out += "\n";
  }
  out += "p qubo 0 " + std::to_string(q.size()) + " " + std::to_string(q.num_linear_nonzero()) +
         " " + std::to_string(q.quadratic().size()) + "\n";
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q.linear()[i] != 0.0)
      out += std::to_string(i) + " " + std::to_string(i) + " " + detail::g17(q.linear()[i]) + "\n";
  for (const auto& [ij, v] : q.quadratic())
    out += std::to_string(ij.first) + " " + std::to_string(ij.second) + " " + detail::g17(v) + "\n";
  return out;
}

inline Qubo read_qubo_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  double offset = 0.0;
  struct PendingAncilla {
    VarId id;
    AncillaInfo info;
    std::size_t line;
  };
  std::vector<PendingAncilla> ancillas;
  bool have_header = false;
  std::size_t max_nodes = 0, n_nodes = 0, n_couplers = 0;
  std::size_t seen_nodes = 0, seen_couplers = 0;
  Qubo q;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "c") {
      if (tok.size() >= 3 && tok[1] == "offset") {
        offset = detail::parse_value(tok[2], lineno);
      } else if (tok.size() >= 5 && tok[1] == "ancilla") {
        PendingAncilla a{static_cast<VarId>(detail::parse_index(tok[2], lineno)),
                         {{}, detail::parse_kind(tok[3], lineno)}, lineno};
        for (std::size_t k = 4; k < tok.size(); ++k)
          a.info.source_term.push_back(static_cast<VarId>(detail::parse_index(tok[k], lineno)));
        ancillas.push_back(std::move(a));
      }
      continue;
    }
    if (tok[0] == "p") {
      if (have_header) throw ParseError("second problem line", lineno);
      if (tok.size() != 6 || tok[1] != "qubo")
        throw ParseError("problem line must read 'p qubo 0 <maxNodes> <nNodes> <nCouplers>'", lineno);
      max_nodes = detail::parse_index(tok[3], lineno);
      n_nodes = detail::parse_index(tok[4], lineno);
      n_couplers = detail::parse_index(tok[5], lineno);
      if (n_nodes > max_nodes)
        throw ParseError("nNodes " + std::to_string(n_nodes) + " exceeds maxNodes " +
                             std::to_string(max_nodes), lineno);
      q = Qubo(max_nodes);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError("data line before the problem line", lineno);
    if (tok.size() != 3) throw ParseError("data line needs 'i j value'", lineno);
    const auto i = detail::parse_index(tok[0], lineno);
    const auto j = detail::parse_index(tok[1], lineno);
    const double v = detail::parse_value(tok[2], lineno);
    if (i >= max_nodes || j >= max_nodes)
      throw ParseError("index out of range for maxNodes " + std::to_string(max_nodes), lineno);
    if (i == j) {
      if (seen_couplers > 0) throw ParseError("diagonal entry after coupler entries", lineno);
      if (++seen_nodes > n_nodes)
        throw ParseError("more diagonal entries than the declared " + std::to_string(n_nodes),
                         lineno);
      q.add_linear(static_cast<VarId>(i), v);
    } else {
      if (i > j) throw ParseError("coupler must have i < j", lineno);
      if (q.quadratic().count({static_cast<VarId>(i), static_cast<VarId>(j)}))
        throw ParseError("duplicate coupler", lineno);
      if (++seen_couplers > n_couplers)
        throw ParseError("more couplers than the declared " + std::to_string(n_couplers), lineno);
      q.add_quadratic(static_cast<VarId>(i), static_cast<VarId>(j), v);
    }
  }
  if (!have_header) throw ParseError("missing problem line", lineno);
  if (seen_nodes != n_nodes)
    throw ParseError("header declares " + std::to_string(n_nodes) + " diagonal entries, body has " +
                         std::to_string(seen_nodes), lineno);
  if (seen_couplers != n_couplers)
    throw ParseError("header declares " + std::to_string(n_couplers) + " couplers, body has " +
                         std::to_string(seen_couplers), lineno);
  q.set_offset(offset);
  for (auto& a : ancillas) {
    if (a.id >= max_nodes) throw ParseError("ancilla index out of range", a.line);
    for (VarId v : a.info.source_term)
      if (v >= max_nodes) throw ParseError("ancilla source variable out of range", a.line);
    q.register_ancilla(a.id, std::move(a.info));
  }
  return q;
}

inline void write_qubo_file(const Qubo& q, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::parameter, "cannot open '" + path + "' for writing");
  out << write_qubo_string(q);
  if (!out) throw Error(ErrorKind::parameter, "write to '" + path + "' failed");
}

inline Qubo read_qubo_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return read_qubo_string(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace crashnet
