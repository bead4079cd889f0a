#pragma once

#include <stdexcept>

namespace covpart {

// Bad caller input: violated preconditions, malformed files, invalid flags.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal accounting violation, e.g. a clustering stage exceeding its
// cell budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace covpart
