#pragma once

#include <stdexcept>
#include <string>

namespace symiso {

enum class Errc {
    NotHermitian,
    NotPSD,
    DomainError,
    OutOfDomain,
    NegativeValue,
    ShapeMismatch,
    InvalidArgument,
    WeightTooShort,
    GenerationFailure,
    ClassificationFailure,
    SplitMissing,
    PlanMismatch,
    CalibrationError,
    Singular,
    JMissing,
    InternalError,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NotHermitian: return "NotHermitian";
        case Errc::NotPSD: return "NotPSD";
        case Errc::DomainError: return "DomainError";
        case Errc::OutOfDomain: return "OutOfDomain";
        case Errc::NegativeValue: return "NegativeValue";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::WeightTooShort: return "WeightTooShort";
        case Errc::GenerationFailure: return "GenerationFailure";
        case Errc::ClassificationFailure: return "ClassificationFailure";
        case Errc::SplitMissing: return "SplitMissing";
        case Errc::PlanMismatch: return "PlanMismatch";
        case Errc::CalibrationError: return "CalibrationError";
        case Errc::Singular: return "Singular";
        case Errc::JMissing: return "JMissing";
        case Errc::InternalError: return "InternalError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace symiso
