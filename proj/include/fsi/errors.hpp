#pragma once

#include "fsi/core.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fsi {

enum class ErrorKind {
  validation,   // malformed input or violated precondition
  infeasible,   // not-a-frame, direct-sum failure, infeasible spectrum
  internal,     // a cross-check between two computations disagreed
  resource,     // configured budget exceeded
};

/// Base of every error raised by the library. `code` is a stable
/// machine-readable identifier; `fibers` lists offending fiber indices.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message,
        std::vector<Index> fibers = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }
  const std::vector<Index>& fibers() const noexcept { return fibers_; }

 private:
  ErrorKind kind_;
  std::string code_;
  std::vector<Index> fibers_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string code, const std::string& message,
                  std::vector<Index> fibers = {})
      : Error(ErrorKind::validation, std::move(code), message, std::move(fibers)) {}
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(std::string code, const std::string& message,
                  std::vector<Index> fibers = {})
      : Error(ErrorKind::infeasible, std::move(code), message, std::move(fibers)) {}
};

class InternalError : public Error {
 public:
  InternalError(std::string code, const std::string& message,
                std::vector<Index> fibers = {})
      : Error(ErrorKind::internal, std::move(code), message, std::move(fibers)) {}
};

class ResourceError : public Error {
 public:
  ResourceError(std::string code, const std::string& message)
      : Error(ErrorKind::resource, std::move(code), message) {}
};

/// Process exit status for an error category (0 is success).
int exit_code(ErrorKind kind) noexcept;

const char* to_string(ErrorKind kind) noexcept;

}  // namespace fsi
