#pragma once

#include <stdexcept>
#include <string>

namespace causim {

// Base of every error raised by the library. `kind()` is a stable identifier
// used in machine-readable error output.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define CAUSIM_DEFINE_ERROR(Name)                                                   \
    class Name : public Error {                                                     \
    public:                                                                         \
        explicit Name(const std::string& message) : Error(#Name, message) {}        \
    }

CAUSIM_DEFINE_ERROR(InvalidArgumentError);

// Model and graph structure
CAUSIM_DEFINE_ERROR(CycleError);
CAUSIM_DEFINE_ERROR(UnknownParentError);
CAUSIM_DEFINE_ERROR(DuplicateAssignmentError);
CAUSIM_DEFINE_ERROR(UnknownNodeError);
CAUSIM_DEFINE_ERROR(InvalidModelError);
CAUSIM_DEFINE_ERROR(NonlinearModelError);
CAUSIM_DEFINE_ERROR(SingularCovarianceError);
CAUSIM_DEFINE_ERROR(OverlappingSetsError);
CAUSIM_DEFINE_ERROR(TooManyCandidatesError);

// Data and estimation
CAUSIM_DEFINE_ERROR(MissingColumnError);
CAUSIM_DEFINE_ERROR(InsufficientDataError);
CAUSIM_DEFINE_ERROR(RankDeficientError);
CAUSIM_DEFINE_ERROR(DegenerateColumnError);
CAUSIM_DEFINE_ERROR(SeparationError);
CAUSIM_DEFINE_ERROR(NonBinaryTargetError);

// Function approximators
CAUSIM_DEFINE_ERROR(DivergenceError);
CAUSIM_DEFINE_ERROR(DegenerateTargetError);
CAUSIM_DEFINE_ERROR(MissingFeatureError);
CAUSIM_DEFINE_ERROR(InvalidConfigError);

// Attribution
CAUSIM_DEFINE_ERROR(TooManyFeaturesError);
CAUSIM_DEFINE_ERROR(EmptyBackgroundError);

// Files and experiments
CAUSIM_DEFINE_ERROR(ParseError);
CAUSIM_DEFINE_ERROR(IoError);
CAUSIM_DEFINE_ERROR(UnknownExperimentError);
CAUSIM_DEFINE_ERROR(ConfigValidationError);

#undef CAUSIM_DEFINE_ERROR

}  // namespace causim
