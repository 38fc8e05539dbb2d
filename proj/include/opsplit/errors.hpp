#ifndef OPSPLIT_ERRORS_HPP
#define OPSPLIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace opsplit {

// Bad arguments: dimension mismatch, out-of-range parameters, bad weights.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric parameter outside the domain of a closed-form bound (e.g. sigma = 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation called in a state where it is undefined (empty accumulator,
// certificate requested after a null step, ...).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A computed quantity violated an invariant the theory guarantees.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A callback (e.g. an inner solver) returned output that breaks its contract.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Iteration cap reached.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// A reference solver failed to converge; its output must not be used.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace opsplit

#endif  // OPSPLIT_ERRORS_HPP
