#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tgs {

using AtomId = std::uint32_t;
using ActionId = std::uint32_t;
using ClockId = std::uint32_t;
using LocationId = std::uint32_t;

enum class CmpOp { Lt, Le, Eq, Ge, Gt };

inline const char* to_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

template <typename T>
bool cmp_holds(const T& lhs, CmpOp op, const T& rhs) {
  switch (op) {
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ge: return lhs >= rhs;
    case CmpOp::Gt: return lhs > rhs;
  }
  return false;
}

enum class Owner { Controller, Environment };

inline const char* to_string(Owner o) {
  return o == Owner::Controller ? "controller" : "environment";
}

struct SourceLoc {
  std::string file;
  int line = 0;
  int col = 0;
};

// Error with a source position, formatted as file:line:col: message.
class Diagnostic : public std::runtime_error {
 public:
  Diagnostic(SourceLoc loc, const std::string& message)
      : std::runtime_error(loc.file + ":" + std::to_string(loc.line) + ":" +
                           std::to_string(loc.col) + ": " + message),
        loc_(std::move(loc)) {}

  const SourceLoc& where() const { return loc_; }

 private:
  SourceLoc loc_;
};

// Thrown when a configurable bound (atom count, node budget, ...) is hit.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& message)
      : std::runtime_error(message) {}
};

}  // namespace tgs
