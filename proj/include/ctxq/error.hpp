#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctxq {

enum class ErrorKind {
    DimensionMismatch,
    NonFinite,
    NotHermitian,
    NotCommuting,
    NoConvergence,
    NotProjector,
    NotOrthogonal,
    NotComplete,
    NonIntegerTrace,
    IndexOutOfRange,
    TypeMismatch,
    NotComparable,
    UnknownPoint,
    TargetMismatch,
    ZeroMass,
    RankNotOne,
    ZeroVector,
    NotInContext,
    NotUnit,
    NotTraceOneProjector,
    MissingAssignment,
    InvalidTable,
    UnknownContext,
    InvalidWeight,
    DuplicatePoint,
    NotNormalized,
};

inline std::string_view error_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NotCommuting: return "NotCommuting";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::NotProjector: return "NotProjector";
        case ErrorKind::NotOrthogonal: return "NotOrthogonal";
        case ErrorKind::NotComplete: return "NotComplete";
        case ErrorKind::NonIntegerTrace: return "NonIntegerTrace";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::TypeMismatch: return "TypeMismatch";
        case ErrorKind::NotComparable: return "NotComparable";
        case ErrorKind::UnknownPoint: return "UnknownPoint";
        case ErrorKind::TargetMismatch: return "TargetMismatch";
        case ErrorKind::ZeroMass: return "ZeroMass";
        case ErrorKind::RankNotOne: return "RankNotOne";
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::NotInContext: return "NotInContext";
        case ErrorKind::NotUnit: return "NotUnit";
        case ErrorKind::NotTraceOneProjector: return "NotTraceOneProjector";
        case ErrorKind::MissingAssignment: return "MissingAssignment";
        case ErrorKind::InvalidTable: return "InvalidTable";
        case ErrorKind::UnknownContext: return "UnknownContext";
        case ErrorKind::InvalidWeight: return "InvalidWeight";
        case ErrorKind::DuplicatePoint: return "DuplicatePoint";
        case ErrorKind::NotNormalized: return "NotNormalized";
    }
    return "Unknown";
}

/// Domain error raised by every ctxq operation. `kind()` is stable and
/// machine-checkable; `what()` carries the human diagnostic.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &detail)
        : std::runtime_error(std::string(error_name(kind)) + (detail.empty() ? "" : ": " + detail)),
          kind_(kind),
          detail_(detail) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string &detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace ctxq
