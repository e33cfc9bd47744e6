#ifndef ONTO_ERRORS_HPP
#define ONTO_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace onto {

// Invalid argument to a library operation (shape mismatch, bad precondition).
class ArgumentError : public std::runtime_error {
 public:
  explicit ArgumentError(const std::string& what) : std::runtime_error(what) {}
};

// Input bytes are not valid UTF-8.
class DecodeError : public std::runtime_error {
 public:
  explicit DecodeError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed structured input. Carries a 1-based line number when known (0 = unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  explicit ParseError(const std::string& what) : ParseError(what, 0) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Model/feature-space mismatch (fingerprint, class list, dims).
class CompatibilityError : public std::runtime_error {
 public:
  explicit CompatibilityError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem / stream failure.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration key or value.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace onto

#endif  // ONTO_ERRORS_HPP
