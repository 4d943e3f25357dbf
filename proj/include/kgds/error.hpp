#pragma once

#include <stdexcept>
#include <string>

namespace kgds {

/// Bad arguments or a malformed configuration. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation budget or combinatorial guard was exceeded. Exit code 3.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failure; the message carries the path. Exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A moment ratio whose denominator vanished.
class UndefinedRatioError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Two independent computations disagreed. Indicates a bug, never user error.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kResourceLimit = 3,
  kIo = 4,
};

}  // namespace kgds
