#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

/// Malformed input: bad spec, out-of-range site, mismatched shapes.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested object would exceed a configured size limit or overflow.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite entries or a failed decomposition.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qwalk
