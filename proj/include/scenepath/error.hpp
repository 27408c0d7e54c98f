#pragma once

#include <stdexcept>
#include <string>

namespace scenepath {

enum class ErrorKind {
  Parse,
  Validation,
  OutOfExtent,
  UnknownId,
  UnknownVerb,
  UnknownLandmark,
  MissingSource,
  ChainBreak,
  DegenerateGraph,
  Unreachable,
  ImpassableTop,
  Infeasible,
  Stuck,
  RetryExhausted,
  Io,
};

const char* to_string(ErrorKind kind);

/// Library error. `where` locates the failure: a JSON pointer into a scene
/// document, an instruction index, or a planner stage and segment.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string where, const std::string& message)
      : std::runtime_error(where.empty() ? message : where + ": " + message),
        kind_(kind),
        where_(std::move(where)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& where() const noexcept { return where_; }

 private:
  ErrorKind kind_;
  std::string where_;
};

}  // namespace scenepath
