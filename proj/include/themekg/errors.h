#pragma once

#include <stdexcept>
#include <string>

namespace themekg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A named entity, category or file does not exist.
class NotFound : public Error {
 public:
  using Error::Error;
};

// An ontology operation would break an ontology invariant.
class OntologyError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. line() is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string &message, size_t line = 0)
      : Error(line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// An external capability failed (after retries, for production providers).
class ProviderError : public Error {
 public:
  ProviderError(std::string provider, const std::string &message)
      : Error(provider + ": " + message), provider_(std::move(provider)) {}
  const std::string &provider() const { return provider_; }

 private:
  std::string provider_;
};

}  // namespace themekg
