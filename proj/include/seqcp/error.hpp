#pragma once

#include <stdexcept>
#include <string>

namespace seqcp {

// Usage errors are caller mistakes (bad flags, invalid parameters); data
// errors come from inputs (malformed CSV, corrupted cache, missing months).
enum class ErrorKind { Usage, Data };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) {
  return Error(ErrorKind::Usage, what);
}

inline Error data_error(const std::string& what) {
  return Error(ErrorKind::Data, what);
}

}  // namespace seqcp
