#pragma once

#include <limits>
#include <string>
#include <vector>

#include "causim/dataset.hpp"
#include "causim/split.hpp"

namespace causim {

struct StepwiseStep {
    std::string added;
    double in_sample_r2 = 0.0;
    double held_out_r2 = 0.0;  // may be negative
};

struct StepwiseTrace {
    std::string target;
    std::vector<StepwiseStep> steps;

    std::vector<std::string> selected() const;
};

// Greedy forward selection. Each step fits OLS on the training rows for
// every remaining candidate and adds the one with the highest in-sample R^2
// (earliest candidate on ties), provided the R^2 gain exceeds `min_gain`.
// Held-out R^2 is measured on the test rows against the test-row mean.
// Candidates that would make the design rank deficient are skipped.
// Throws InsufficientDataError with fewer than two candidates or when the
// split leaves fewer than three training rows or two test rows.
StepwiseTrace stepwise_forward(const Dataset& data, std::string_view target,
                               const std::vector<std::string>& candidates, const SplitPlan& split,
                               double min_gain = 0.0);

}  // namespace causim
