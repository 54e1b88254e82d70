#ifndef BDS_IO_HPP
#define BDS_IO_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "bds/dynamics.hpp"

namespace bds {

class SchemaError : public std::runtime_error {
public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public std::runtime_error {
public:
  ValidationReport report;
  ValidationError(const std::string& what, ValidationReport rep)
      : std::runtime_error(what), report(std::move(rep)) {}
};

using Json = nlohmann::ordered_json;

/// Parses a system document (JSON: backend, atoms/window, labels, actions, or
/// a preset block).  Throws SchemaError / ValidationError.
System parse_system(const std::string& text);

/// Canonical serialization; parse_system(serialize_system(sys).dump()) yields
/// a system with an identical digest.
Json serialize_system(const System& sys);
std::string system_digest(const System& sys);

/// Parse an element literal: "{u,v}" over the finite backend, "{1,2}" or
/// "~{3}" over the cofinite one; "top" and "{}" work everywhere.
BoolElem parse_elem_text(const System& sys, const std::string& text);

struct RunFlags {
  bool json = false;
  bool dot = false;
  std::string ideal_seed;           // quotient
  std::string expr;                 // semigroup-eval
  std::string expr_x;               // cover-check
  std::vector<std::string> expr_z;  // cover-check
  std::string elem_a, elem_b;       // cofinal: optional condition-2 probe
  int depth = 3;
  std::size_t cap = 1000000;
  std::size_t spectrum_limit = 12;
};

struct Report {
  std::string command;
  std::string digest;
  Json result;
  std::vector<std::string> diagnostics;
  int exit_code = 0;  // 0 computed, 1 input error, 2 inconclusive/unsupported

  Json to_json() const;
  std::string to_text() const;
};

const std::vector<std::string>& command_list();
Report run(const std::string& command, const System& sys, const RunFlags& flags);

}  // namespace bds

#endif
