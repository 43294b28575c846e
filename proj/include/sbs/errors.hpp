#pragma once

#include <stdexcept>
#include <string>

namespace sbs {

// Bad user input: malformed files, invalid parameters. CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure while running an otherwise valid job. CLI exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A metric cannot be formed from the data (zero denominator). CLI exit code 3.
class StatisticalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sbs
