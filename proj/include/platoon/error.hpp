#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace platoon {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Validation,
  InfeasibleEvent,
  IneligibleLeader,
  UnknownDriver,
  InvalidSegment,
  RoleMismatch,
  NotAuthority,
  AlreadyMinted,
  UnknownAccount,
  InsufficientAllowance,
  InsufficientBalance,
  DuplicateRecord,
  ValidationFailed,
  Corrupt,
  Io,
  Overflow,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the core library carries one of the codes above so
// the C API can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace platoon
