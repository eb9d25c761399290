#pragma once

#include <stdexcept>
#include <string>

namespace hardyspec {

enum class ErrorKind {
  Domain,       // argument outside the mathematical domain
  Pole,         // Gamma at a non-positive integer
  Overflow,     // result not representable
  Parameter,    // unsupported or inconsistent parameter combination
  Singularity,  // evaluation at a singular point
  Convergence,  // iterative solver hit its cap
  Validation,   // configuration rejected
  Evolution,    // integrator failure
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hardyspec
