#pragma once

#include <stdexcept>
#include <string>

namespace iepinn {

// Raised for malformed inputs: bad configs, invariant violations, file
// format problems. The CLI maps this to exit code 1; everything else is 2.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace iepinn
