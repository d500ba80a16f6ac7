#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eqf {

enum class Errc {
    MissingColumn,
    UnparseableRow,
    NonPositivePrice,
    DuplicateDate,
    SeriesTooShort,
    LengthMismatch,
    InvalidAnchor,
    LagTooLarge,
    SingularToeplitz,
    SingularRegression,
    DegenerateVariance,
    InvalidParams,
    NonFiniteLikelihood,
    TooFewObservations,
    NoConvergence,
    DegenerateSeries,
    InvalidHorizon,
    OrderTooLarge,
    SingularDesign,
    SingularCovariance,
    ShapeMismatch,
    NonFiniteGradient,
    DivergedTraining,
    BadDims,
    ZeroActual,
    ZeroDenominator,
    IoError,
    ConfigError,
};

std::string_view errc_name(Errc code) noexcept;

// Numerical failures (as opposed to bad input or configuration).
bool is_numerical(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail);

    Errc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

}  // namespace eqf
