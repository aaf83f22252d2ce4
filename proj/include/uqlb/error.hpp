#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace uqlb {

// Every failure mode that crosses a module boundary. Names are stable: they
// travel over the wire as the `code` of a structured error response.
enum class ErrorCode {
  MalformedBody,
  SchemaViolation,
  NotSupported,
  UnknownModel,
  PortInUse,
  PortExhausted,
  Unreachable,
  Timeout,
  RemoteError,
  IoError,
  DimensionMismatch,
  NotPositiveDefinite,
  NumericalBreakdown,
  NoConvergence,
  NoCapacity,
  UpstreamFailure,
  RegistrationTimeout,
  UnreachableServer,
  PreflightMismatch,
  AllocationExpired,
  SubmitRejected,
  UnknownHandle,
  SpawnFailure,
  TimeLimitExceeded,
  ZeroComputeTime,
  EmptyRecords,
  NonFiniteIntegrand,
  KeyMismatch,
  InvalidArgument,
  Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

// Parses a wire code back into an enum; unknown names map to RemoteError.
ErrorCode error_code_from_string(std::string_view name) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// Raised by a client when the server answered with a structured error.
class RemoteError : public Error {
 public:
  RemoteError(std::string remote_code, const std::string& message)
      : Error(ErrorCode::RemoteError, remote_code + ": " + message),
        remote_code_(std::move(remote_code)),
        remote_message_(message) {}

  const std::string& remote_code() const noexcept { return remote_code_; }
  const std::string& remote_message() const noexcept { return remote_message_; }

 private:
  std::string remote_code_;
  std::string remote_message_;
};

}  // namespace uqlb
