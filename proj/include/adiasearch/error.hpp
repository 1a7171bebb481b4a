#ifndef ADIASEARCH_ERROR_HPP
#define ADIASEARCH_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace adiasearch {

enum class ErrorKind {
    NonStochastic,
    NotIrreducible,
    NotAperiodic,
    NotReversible,
    InvalidMarkedSet,
    SingularSystem,
    BadParams,
    SOutOfRange,
    EigensolverFailure,
    DegenerateDenominator,
    SAtOne,
    DimensionCap,
    NonUnitaryDrift,
    StepControlFailure,
    WalkDidNotAbsorb,
    ParseError,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so the CLI can map it
/// onto an exit code; what() is "<KindName>: <detail>".
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + detail),
          kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

inline std::string_view error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NonStochastic: return "NonStochastic";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::NotAperiodic: return "NotAperiodic";
    case ErrorKind::NotReversible: return "NotReversible";
    case ErrorKind::InvalidMarkedSet: return "InvalidMarkedSet";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::SOutOfRange: return "SOutOfRange";
    case ErrorKind::EigensolverFailure: return "EigensolverFailure";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::SAtOne: return "SAtOne";
    case ErrorKind::DimensionCap: return "DimensionCap";
    case ErrorKind::NonUnitaryDrift: return "NonUnitaryDrift";
    case ErrorKind::StepControlFailure: return "StepControlFailure";
    case ErrorKind::WalkDidNotAbsorb: return "WalkDidNotAbsorb";
    case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

} // namespace adiasearch

#endif
