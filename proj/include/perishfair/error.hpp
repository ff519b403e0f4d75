#pragma once

#include <stdexcept>
#include <string>

namespace perishfair {

// Every failure raised by the library derives from Error; the code lets
// callers (and the CLI) branch without string matching.
enum class ErrorCode {
  kInvalidSchedule,
  kMissingPath,
  kInvalidDelta,
  kInvalidMean,
  kInvalidConfig,
  kInvalidInput,
  kOverdraw,
  kDataIntegrity,
  kUnknownInstance,
  kParse,
  kIo,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace perishfair
