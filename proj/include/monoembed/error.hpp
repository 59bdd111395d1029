#pragma once

#include <stdexcept>
#include <string>

namespace monoembed {

/// Failure categories. The CLI maps each one to a process exit code.
enum class ErrorKind {
  usage = 2,
  input = 3,
  network = 4,
  non_convergence = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& what) { throw Error(ErrorKind::input, what); }
[[noreturn]] inline void fail_usage(const std::string& what) { throw Error(ErrorKind::usage, what); }
[[noreturn]] inline void fail_network(const std::string& what) { throw Error(ErrorKind::network, what); }

}  // namespace monoembed
