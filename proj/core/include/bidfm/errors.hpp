#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bidfm {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or cluster counts that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An iterative routine hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Model parameters that break one or more model invariants.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// A value outside the support required by an edge distribution.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input that an algorithm does not accept (e.g. negative weights for a
// Laplacian-based method, or K < 2 for ratio embeddings).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed file or config content.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line = 0);
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace bidfm
