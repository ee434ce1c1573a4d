#pragma once

#include <stdexcept>
#include <string>

namespace synthcap {

// Input could not be parsed or fails basic validation (CLI exit code 2).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Requested computation exceeds the enumeration budget (CLI exit code 3).
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Requested point or configuration is infeasible (CLI exit code 3).
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// An internal consistency check failed (CLI exit code 4).
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace synthcap
