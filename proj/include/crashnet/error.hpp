/// @file error.hpp
/// @brief Exception hierarchy shared by every crashnet module.
/// @details Each error carries a kind so the command-line front end can map
/// failures onto stable exit codes.

#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace crashnet {

enum class ErrorKind {
  parameter,  ///< invalid argument or precondition breach
  numeric,    ///< singular or ill-conditioned linear algebra
  resource,   ///< enumeration or expansion cap exceeded
  parse,      ///< malformed input document
  gadget,     ///< quadratization gadget failed certification
  remote,     ///< remote sampler transport or integrity failure
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::resource: return "resource";
    case ErrorKind::parse: return "parse";
    case ErrorKind::gadget: return "gadget";
    case ErrorKind::remote: return "remote";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what)
      : Error(ErrorKind::parameter, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::numeric, what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what)
      : Error(ErrorKind::resource, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(ErrorKind::parse,
              line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  /// 1-based line number, or 0 when the failure is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A quadratization gadget whose ancilla-minimized energy does not reproduce
/// the target term. Carries the offending logical configuration (spins) and,
/// for small gadgets, the full energy table indexed by state bitmask.
class GadgetError : public Error {
 public:
  GadgetError(const std::string& what, std::vector<int> witness,
              std::vector<double> energy_table = {})
      : Error(ErrorKind::gadget, what),
        witness_(std::move(witness)),
        energy_table_(std::move(energy_table)) {}
  const std::vector<int>& witness() const noexcept { return witness_; }
  const std::vector<double>& energy_table() const noexcept { return energy_table_; }

 private:
  std::vector<int> witness_;
  std::vector<double> energy_table_;
};

class RemoteError : public Error {
 public:
  explicit RemoteError(const std::string& what)
      : Error(ErrorKind::remote, what) {}
};

/// Rethrows @p e as the same error type with @p context prepended.
[[noreturn]] inline void rethrow_with_context(const Error& e, const std::string& context) {
  const std::string what = context + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::parameter: throw ParameterError(what);
    case ErrorKind::numeric: throw NumericError(what);
    case ErrorKind::resource: throw ResourceError(what);
    case ErrorKind::parse: throw ParseError(what);
    case ErrorKind::remote: throw RemoteError(what);
    case ErrorKind::gadget:
      if (const auto* g = dynamic_cast<const GadgetError*>(&e))
        throw GadgetError(what, g->witness(), g->energy_table());
      break;
  }
  throw Error(e.kind(), what);
}

}  // namespace crashnet
