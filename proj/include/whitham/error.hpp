#pragma once

#include <stdexcept>
#include <string>

namespace whitham {

enum class ErrorKind {
  DegreeBound,
  UndefinedRoots,
  NumericalFailure,
  NoSolution,
  Shape,
  Precondition,
  Geometry,
  RealityViolation,
  CurveViolation,
  NotDeformable,
  Inconsistent,
  Degenerate,
  StepSize,
  ProjectionFailure,
  UndefinedConformalType,
  Parse,
  Usage,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace whitham
