#pragma once

#include <stdexcept>
#include <string>

namespace apharm {

/// Malformed arguments: dimension mismatch, non-positive parameters, bad files.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric self-check failed, e.g. a winding integral that is not an integer.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A hinge density that no arithmetic-progression family realizes.
class UnsupportedDensity : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

}  // namespace apharm
