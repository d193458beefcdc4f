#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace hflat {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline const cplx kI{0.0, 1.0};

// Artifact-wide default tolerances.  The o(1) remainders in the underlying
// theory carry no quantitative bounds; every threshold below is an artifact
// constant and is documented in the README.
struct Tolerances {
    double quad_abs = 1e-10;        // adaptive quadrature absolute target
    double ode_tol = 1e-10;         // RK local error target
    double det_drift = 1e-8;        // SL(2,C) determinant drift per unit length
    double clearance_rel = 1e-3;    // path clearance, relative to local scale
    double series_leading_rel = 1e-7;  // leading-coefficient detection threshold
    double alpha_band = 1e-6;       // equality band for end-type trichotomies
    double identity_rel = 1e-6;     // generic pointwise identity tolerance
};

inline const Tolerances& default_tol() {
    static Tolerances t;
    return t;
}

enum class ErrorCode {
    PoleHit,
    BranchAmbiguous,
    ClearanceViolation,
    ToleranceNotMet,
    EssentialOrIrregular,
    ConstantInput,
    ZeroForm,
    DegenerateData,
    DegenerateMetric,
    GaussMapsCollide,
    PeriodViolation,
    BranchPointOnPath,
    NotFiniteType,
    NotRegularEnd,
    NonRealAlpha,
    InconsistentClassification,
    RouteDisagreement,
    SignConventionUnresolvable,
    DegreeUndetermined,
    UmbilicInRegion,
    SheetInconsistency,
    BetaDegenerate,
    NotUmbilic,
    IrregularEnd,
    QsVanishesAtBasepoint,
    NoAdmissibleS,
    InvalidPoint,
    ParseError,
    SpecError,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::PoleHit: return "PoleHit";
        case ErrorCode::BranchAmbiguous: return "BranchAmbiguous";
        case ErrorCode::ClearanceViolation: return "ClearanceViolation";
        case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
        case ErrorCode::EssentialOrIrregular: return "EssentialOrIrregular";
        case ErrorCode::ConstantInput: return "ConstantInput";
        case ErrorCode::ZeroForm: return "ZeroForm";
        case ErrorCode::DegenerateData: return "DegenerateData";
        case ErrorCode::DegenerateMetric: return "DegenerateMetric";
        case ErrorCode::GaussMapsCollide: return "GaussMapsCollide";
        case ErrorCode::PeriodViolation: return "PeriodViolation";
        case ErrorCode::BranchPointOnPath: return "BranchPointOnPath";
        case ErrorCode::NotFiniteType: return "NotFiniteType";
        case ErrorCode::NotRegularEnd: return "NotRegularEnd";
        case ErrorCode::NonRealAlpha: return "NonRealAlpha";
        case ErrorCode::InconsistentClassification: return "InconsistentClassification";
        case ErrorCode::RouteDisagreement: return "RouteDisagreement";
        case ErrorCode::SignConventionUnresolvable: return "SignConventionUnresolvable";
        case ErrorCode::DegreeUndetermined: return "DegreeUndetermined";
        case ErrorCode::UmbilicInRegion: return "UmbilicInRegion";
        case ErrorCode::SheetInconsistency: return "SheetInconsistency";
        case ErrorCode::BetaDegenerate: return "BetaDegenerate";
        case ErrorCode::NotUmbilic: return "NotUmbilic";
        case ErrorCode::IrregularEnd: return "IrregularEnd";
        case ErrorCode::QsVanishesAtBasepoint: return "QsVanishesAtBasepoint";
        case ErrorCode::NoAdmissibleS: return "NoAdmissibleS";
        case ErrorCode::InvalidPoint: return "InvalidPoint";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SpecError: return "SpecError";
    }
    return "Unknown";
}

}  // namespace hflat
