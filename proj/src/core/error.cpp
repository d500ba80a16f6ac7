#include "eqf/error.hpp"

namespace eqf {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::UnparseableRow: return "UnparseableRow";
    case Errc::NonPositivePrice: return "NonPositivePrice";
    case Errc::DuplicateDate: return "DuplicateDate";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InvalidAnchor: return "InvalidAnchor";
    case Errc::LagTooLarge: return "LagTooLarge";
    case Errc::SingularToeplitz: return "SingularToeplitz";
    case Errc::SingularRegression: return "SingularRegression";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::NonFiniteLikelihood: return "NonFiniteLikelihood";
    case Errc::TooFewObservations: return "TooFewObservations";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DegenerateSeries: return "DegenerateSeries";
    case Errc::InvalidHorizon: return "InvalidHorizon";
    case Errc::OrderTooLarge: return "OrderTooLarge";
    case Errc::SingularDesign: return "SingularDesign";
    case Errc::SingularCovariance: return "SingularCovariance";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::DivergedTraining: return "DivergedTraining";
    case Errc::BadDims: return "BadDims";
    case Errc::ZeroActual: return "ZeroActual";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::IoError: return "IoError";
    case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

bool is_numerical(Errc code) noexcept {
    switch (code) {
    case Errc::SingularToeplitz:
    case Errc::SingularRegression:
    case Errc::DegenerateVariance:
    case Errc::NonFiniteLikelihood:
    case Errc::NoConvergence:
    case Errc::DegenerateSeries:
    case Errc::SingularDesign:
    case Errc::SingularCovariance:
    case Errc::NonFiniteGradient:
    case Errc::DivergedTraining:
    case Errc::ZeroDenominator:
        return true;
    default:
        return false;
    }
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code), detail_(detail) {}

}  // namespace eqf
