#pragma once

#include <stdexcept>
#include <string>

namespace rocofscreen {

/// Bad or inconsistent input: parse failures, validation violations, dangling
/// references. The CLI maps these to exit code 1.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A computation that could not complete: divergence, singular matrices,
/// simulation blow-up. The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace rocofscreen
