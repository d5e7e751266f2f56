#pragma once

#include <stdexcept>
#include <string>

namespace ncnet {

// Failure categories surfaced through the C API as status codes.
enum class Errc {
  invalid_argument = 1,
  precondition = 2,
  parse = 3,
  cap_exceeded = 4,
  io = 5,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace ncnet
