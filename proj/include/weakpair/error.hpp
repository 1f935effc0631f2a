#pragma once

#include <stdexcept>
#include <string>

namespace weakpair {

// Bad argument, shape mismatch, invalid range. Maps to CLI exit code 3.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Unreadable or unwritable files. Maps to CLI exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace weakpair
