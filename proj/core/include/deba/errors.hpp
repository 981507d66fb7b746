#pragma once

#include <stdexcept>
#include <string>

namespace deba {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Precondition violations: bad shapes, wrong color space, out-of-range
// parameters, non-finite values.
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(what) {}
};

// Requested splice depth exceeds min(rows, cols).
class KTooLarge : public InvalidInput {
 public:
  explicit KTooLarge(const std::string& what) : InvalidInput(what) {}
};

// Malformed file contents: bad magic, truncated records, failed
// integrity hashes.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(what) {}
};

// Training produced a non-finite loss.
class TrainingDiverged : public Error {
 public:
  explicit TrainingDiverged(const std::string& what) : Error(what) {}
};

}  // namespace deba
