#pragma once

#include <stdexcept>
#include <string>

namespace opdyn {

// One error code per failure mode the library can report. Callers that care
// about the class of failure check code(); the message carries the details.
enum class Errc {
    ZeroVector,
    DimensionMismatch,
    DomainError,
    DegenerateUpdate,
    NotStable,
    NotActive,
    NotOdd,
    IndexOutOfRange,
    InvalidParams,
    InvalidSpec,
    NotInactive,
    StructureViolation,
    WrongArity,
    NoProgress,
    PreconditionViolated,
    IoError,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::ZeroVector: return "ZeroVector";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::DomainError: return "DomainError";
        case Errc::DegenerateUpdate: return "DegenerateUpdate";
        case Errc::NotStable: return "NotStable";
        case Errc::NotActive: return "NotActive";
        case Errc::NotOdd: return "NotOdd";
        case Errc::IndexOutOfRange: return "IndexOutOfRange";
        case Errc::InvalidParams: return "InvalidParams";
        case Errc::InvalidSpec: return "InvalidSpec";
        case Errc::NotInactive: return "NotInactive";
        case Errc::StructureViolation: return "StructureViolation";
        case Errc::WrongArity: return "WrongArity";
        case Errc::NoProgress: return "NoProgress";
        case Errc::PreconditionViolated: return "PreconditionViolated";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

class SimError : public std::runtime_error {
public:
    SimError(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw SimError(code, what);
}

} // namespace opdyn
