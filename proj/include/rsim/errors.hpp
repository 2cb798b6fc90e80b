#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace rsim {

// A power series or iteration did not settle within its term budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The Fock cutoff demanded by the tail policy exceeds the dimension budget.
class InfeasibleCutoff : public std::runtime_error {
 public:
  InfeasibleCutoff(const std::string& what, std::size_t required_dimension)
      : std::runtime_error(what), required_dimension_(required_dimension) {}
  std::size_t required_dimension() const { return required_dimension_; }

 private:
  std::size_t required_dimension_;
};

// Input sits on a pole of a closed-form expression.
class SingularInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Warnings go through a replaceable sink so tests and the CLI can capture them.
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace rsim
