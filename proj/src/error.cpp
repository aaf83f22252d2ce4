#include "uqlb/error.hpp"

#include <array>
#include <utility>

namespace uqlb {

namespace {

constexpr std::array kNames = {
    std::pair{ErrorCode::MalformedBody, std::string_view{"MalformedBody"}},
    std::pair{ErrorCode::SchemaViolation, std::string_view{"SchemaViolation"}},
    std::pair{ErrorCode::NotSupported, std::string_view{"NotSupported"}},
    std::pair{ErrorCode::UnknownModel, std::string_view{"UnknownModel"}},
    std::pair{ErrorCode::PortInUse, std::string_view{"PortInUse"}},
    std::pair{ErrorCode::PortExhausted, std::string_view{"PortExhausted"}},
    std::pair{ErrorCode::Unreachable, std::string_view{"Unreachable"}},
    std::pair{ErrorCode::Timeout, std::string_view{"Timeout"}},
    std::pair{ErrorCode::RemoteError, std::string_view{"RemoteError"}},
    std::pair{ErrorCode::IoError, std::string_view{"IoError"}},
    std::pair{ErrorCode::DimensionMismatch, std::string_view{"DimensionMismatch"}},
    std::pair{ErrorCode::NotPositiveDefinite, std::string_view{"NotPositiveDefinite"}},
    std::pair{ErrorCode::NumericalBreakdown, std::string_view{"NumericalBreakdown"}},
    std::pair{ErrorCode::NoConvergence, std::string_view{"NoConvergence"}},
    std::pair{ErrorCode::NoCapacity, std::string_view{"NoCapacity"}},
    std::pair{ErrorCode::UpstreamFailure, std::string_view{"UpstreamFailure"}},
    std::pair{ErrorCode::RegistrationTimeout, std::string_view{"RegistrationTimeout"}},
    std::pair{ErrorCode::UnreachableServer, std::string_view{"UnreachableServer"}},
    std::pair{ErrorCode::PreflightMismatch, std::string_view{"PreflightMismatch"}},
    std::pair{ErrorCode::AllocationExpired, std::string_view{"AllocationExpired"}},
    std::pair{ErrorCode::SubmitRejected, std::string_view{"SubmitRejected"}},
    std::pair{ErrorCode::UnknownHandle, std::string_view{"UnknownHandle"}},
    std::pair{ErrorCode::SpawnFailure, std::string_view{"SpawnFailure"}},
    std::pair{ErrorCode::TimeLimitExceeded, std::string_view{"TimeLimitExceeded"}},
    std::pair{ErrorCode::ZeroComputeTime, std::string_view{"ZeroComputeTime"}},
    std::pair{ErrorCode::EmptyRecords, std::string_view{"EmptyRecords"}},
    std::pair{ErrorCode::NonFiniteIntegrand, std::string_view{"NonFiniteIntegrand"}},
    std::pair{ErrorCode::KeyMismatch, std::string_view{"KeyMismatch"}},
    std::pair{ErrorCode::InvalidArgument, std::string_view{"InvalidArgument"}},
    std::pair{ErrorCode::Internal, std::string_view{"Internal"}},
};

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "Internal";
}

ErrorCode error_code_from_string(std::string_view name) noexcept {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return ErrorCode::RemoteError;
}

}  // namespace uqlb
