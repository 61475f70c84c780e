#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gazeaffect {

/// Domain error kinds raised across the pipeline.
enum class Errc {
    MalformedRow,
    NonMonotonicTime,
    UnknownEmotion,
    WrongPointCount,
    MissingTrial,
    OrphanTrial,
    IoFailure,
    ZeroScreenDimension,
    NoNeutralTrials,
    TooFewSamples,
    DegenerateWindow,
    OutOfRangeRating,
    OutOfRangeTrait,
    EmptyDataset,
    ConstantInput,
    LengthMismatch,
    SingularDesign,
    ConvergenceFailure,
    InsufficientRaters,
    EmptyClass,
    ShapeMismatch,
    NonFiniteActivation,
    NonFiniteGradient,
    DivergenceDetected,
    EmptySplit,
    InvalidSpec,
    InvalidConfig,
    MissingInput,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace gazeaffect
