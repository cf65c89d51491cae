#pragma once
#include <stdexcept>
#include <string>
#include <utility>

namespace savnav {

// Every rejection path throws Error. `category` is a stable machine-parseable
// token; the CLI prints it on the single error line and exits nonzero.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(category + ": " + message), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

[[noreturn]] inline void fail(const std::string& category, const std::string& message) {
  throw Error(category, message);
}

inline void require(bool cond, const std::string& category, const std::string& message) {
  if (!cond) fail(category, message);
}

}  // namespace savnav
