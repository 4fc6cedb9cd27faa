#include "causim/stepwise.hpp"

#include <algorithm>

#include "causim/error.hpp"
#include "causim/estimators.hpp"
#include "causim/stats.hpp"

namespace causim {

std::vector<std::string> StepwiseTrace::selected() const {
    std::vector<std::string> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.added);
    return out;
}

StepwiseTrace stepwise_forward(const Dataset& data, std::string_view target,
                               const std::vector<std::string>& candidates, const SplitPlan& split, double min_gain) {
    if (candidates.size() < 2) throw InsufficientDataError("stepwise selection needs at least two candidates");
    if (split.train.size() < 3 || split.test.size() < 2) {
        throw InsufficientDataError("stepwise selection needs at least three training and two test rows");
    }
    for (auto i : split.train) {
        if (i >= data.n_rows()) throw InvalidArgumentError("split references row beyond the dataset");
    }
    for (auto i : split.test) {
        if (i >= data.n_rows()) throw InvalidArgumentError("split references row beyond the dataset");
    }
    for (const auto& c : candidates) (void)data.column(c);

    const Dataset train = data.select_rows(split.train);
    const Dataset test = data.select_rows(split.test);
    const auto test_y = test.column(target);

    StepwiseTrace trace;
    trace.target = std::string(target);
    std::vector<std::string> chosen;
    std::vector<std::string> remaining = candidates;
    double current = 0.0;

    while (!remaining.empty()) {
        std::size_t best = remaining.size();
        FitResult best_fit;
        for (std::size_t c = 0; c < remaining.size(); ++c) {
            auto regressors = chosen;
            regressors.push_back(remaining[c]);
            try {
                auto fit = ols_fit(train, target, regressors);
                if (best == remaining.size() || fit.r_squared > best_fit.r_squared) {
                    best = c;
                    best_fit = std::move(fit);
                }
            } catch (const RankDeficientError&) {
            } catch (const InsufficientDataError&) {
            }
        }
        if (best == remaining.size() || !(best_fit.r_squared - current > min_gain)) break;

        chosen.push_back(remaining[best]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
        current = best_fit.r_squared;
        const auto pred = best_fit.predict(test);
        trace.steps.push_back({chosen.back(), current, stats::r_squared(test_y, pred)});
    }
    return trace;
}

}  // namespace causim
