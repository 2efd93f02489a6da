#pragma once

#include <stdexcept>
#include <string>

namespace mpcv {

enum class ErrorKind {
    Syntax,
    Structural,
    Unbound,
    Ownership,
    Assertion,
    Stuck,
    Linearity,
    Hint,  // an `as` equivalence that is not entailed
    Infeasible,
    Solver,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace mpcv
