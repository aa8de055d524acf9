#ifndef L2SRL_ERRORS_HPP_
#define L2SRL_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace l2srl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. line is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(line ? "line " + std::to_string(line) + ": " + reason : reason),
        line_(line),
        reason_(reason) {}

  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class IllFormedTagSequence : public Error {
 public:
  using Error::Error;
};

class InvalidFrame : public Error {
 public:
  using Error::Error;
};

class MismatchedCorpora : public Error {
 public:
  using Error::Error;
};

class MissingMetadata : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class PairingError : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidPredicateIndex : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace l2srl

#endif  // L2SRL_ERRORS_HPP_
