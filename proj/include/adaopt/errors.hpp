#pragma once

#include <stdexcept>
#include <string>

namespace adaopt {

// Error taxonomy shared by every module. Each throwing site uses the most
// specific class so callers (and the CLI exit-code mapping) can tell a bad
// input apart from a corrupted state or a malformed file.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand lengths disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value lies outside the mathematical domain of the operation
// (sqrt of a negative, nonzero/0, negative sequence entry, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A parameter violates its documented contract.
class ParamError : public Error {
 public:
  using Error::Error;
};

// A NaN or infinity reached a public operation boundary.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed input bytes; the message carries the byte offset when known.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Bad configuration key, value, or subcommand usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A bounded search ran out of candidates before finding a solution.
class SearchExhausted : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace adaopt
