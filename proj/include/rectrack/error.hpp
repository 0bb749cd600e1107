#pragma once

#include <stdexcept>
#include <string>

namespace rectrack {

// Raised when a numeric computation produces non-finite values or an
// otherwise unusable result (singular innovation, failed Cholesky, ...).
// step() identifies the sequence step for unrolled computations, -1 if n/a.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, long step = -1)
      : std::runtime_error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what),
        step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

// Raised by file parsers; line() is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, long line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace rectrack
