#pragma once

#include <stdexcept>
#include <string>

namespace vitalradar {

// Bad input: unreadable or inconsistent files, unphysical parameters.
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
  public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure while processing: undefined phase, singular calibration.
// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vitalradar
