#pragma once

#include <stdexcept>
#include <string>

namespace wdyn {

// Bad arguments, malformed files, inconsistent configuration. CLI exit code 1.
struct input_error : std::invalid_argument {
  explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

// Non-finite state, singular factors, aborted integrations. CLI exit code 2.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wdyn
