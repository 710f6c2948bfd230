#pragma once

#include <stdexcept>
#include <string>

namespace ssod {

// Data or invariant violations. The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / parse-level failures. Also exit code 2 at the CLI.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad invocation (flags, missing arguments). Exit code 1 at the CLI.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ssod
