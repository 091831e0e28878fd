#pragma once

#include <stdexcept>
#include <string>

namespace tiltci {

// Broad failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  domain,          // argument outside the mathematical domain
  config,          // invalid configuration / prior class spec
  numeric,         // non-finite intermediate value
  degenerate,      // zero selection mass, degenerate proportion, ...
  inversion,       // untilting impossible
  undefined,       // ratio functional with zero denominator
  insufficient,    // not enough data
  parse,           // malformed input file
  solver,          // LP failure other than infeasibility
  empty_localization,  // LP infeasible: band and prior class incompatible
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace tiltci
