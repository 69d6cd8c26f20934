#pragma once

#include <stdexcept>
#include <string>

namespace nvcr {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

class InvalidFrame : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_frame"; }
};

class NonHermitian : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "non_hermitian"; }
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "convergence"; }
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace nvcr
