#pragma once

#include <stdexcept>
#include <string>

namespace zdsec {

// Argument outside its documented domain (probability outside [0,1], lambda
// outside [0,1], ...).
struct InputDomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A documented precondition of the operation does not hold (e.g. the payoff
// ordering assumption). The message names the failing inequality.
struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

// No ZD strategy can enforce the requested linear relation.
struct FeasibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The payoff table is outside the case a named construction or closed form
// covers. The message lists the failed inequality.
struct CaseMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateDenominatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config file problems; message carries "path:line:col:" where applicable.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace zdsec
