#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "causim/dataset.hpp"
#include "causim/gbt.hpp"

namespace causim {

// Model output for one row given in the explained feature order.
using PredictFn = std::function<double(std::span<const double>)>;

inline constexpr std::size_t kMaxShapleyFeatures = 12;
inline constexpr std::size_t kDefaultBackgroundRows = 256;

struct Attribution {
    std::vector<std::string> features;
    std::vector<double> phi;
    double base_value = 0.0;  // mean model output over the background
    double prediction = 0.0;  // f(instance)
    // base + sum(phi) - prediction
    double efficiency_residual = 0.0;
};

// Interventional Shapley values by enumerating all coalitions. The value
// of coalition S is the mean of f over background rows with the S features
// replaced by the instance's values. The background matrix is copied once
// so one explainer can serve many instances.
class ShapleyExplainer {
public:
    // Throws TooManyFeaturesError beyond 12 features, EmptyBackgroundError
    // for an empty background and MissingFeatureError for absent columns.
    ShapleyExplainer(PredictFn model, const Dataset& background, std::vector<std::string> features);

    const std::vector<std::string>& features() const noexcept { return features_; }
    std::size_t background_rows() const noexcept { return rows_; }

    Attribution explain(std::span<const double> instance) const;
    Attribution explain(const Dataset& data, std::size_t row) const;
    std::vector<Attribution> explain_all(const Dataset& data) const;

    // Coalition values v(mask) for all 2^d masks; bit j set means feature j
    // takes the instance value.
    std::vector<double> coalition_values(std::span<const double> instance) const;

private:
    PredictFn model_;
    std::vector<std::string> features_;
    std::vector<double> background_;  // row-major, rows_ x features_.size()
    std::size_t rows_ = 0;
};

// One summand of an additive model. `fn` receives a full-width row but may
// only read the listed feature indices.
struct ModelPart {
    std::vector<std::size_t> features;
    PredictFn fn;
};

// Exact Shapley values for f = constant + sum of parts. Shapley values add
// over summands and a summand gives zero credit to features it never reads,
// so each part is enumerated over its own features only. Agrees with
// ShapleyExplainer on the summed model up to rounding.
class AdditiveShapleyExplainer {
public:
    AdditiveShapleyExplainer(std::vector<ModelPart> parts, double constant, const Dataset& background,
                             std::vector<std::string> features);

    const std::vector<std::string>& features() const noexcept { return features_; }

    Attribution explain(std::span<const double> instance) const;
    std::vector<Attribution> explain_all(const Dataset& data) const;

private:
    std::vector<ModelPart> parts_;
    double constant_ = 0.0;
    std::vector<std::string> features_;
    std::vector<double> background_;
    std::size_t rows_ = 0;
};

// One part per tree of the ensemble, on the margin (log-odds) scale. The
// parts reference `model`, which must outlive them.
std::vector<ModelPart> tree_parts(const GbtModel& model);

// Convenience wrapper over ShapleyExplainer for a single instance.
Attribution shapley_exact(const PredictFn& model, std::span<const double> instance, const Dataset& background,
                          const std::vector<std::string>& features);

// Shapley values from coalition values v indexed by bit mask.
std::vector<double> shapley_from_values(std::span<const double> values, std::size_t n_features);

struct AttributionSummary {
    std::vector<std::string> features;
    std::vector<double> mean_abs_phi;
    std::vector<bool> relevant;
    double relevant_mass = 0.0;
    double irrelevant_mass = 0.0;  // sum of mean |phi| over irrelevant features
    std::size_t n_instances = 0;
    double max_abs_efficiency_residual = 0.0;
};

// Throws InvalidArgumentError when `relevant` names a feature outside
// `features` or the attribution list is empty.
AttributionSummary summarize_attributions(const std::vector<Attribution>& attributions,
                                          const std::vector<std::string>& relevant);

AttributionSummary attribution_summary(const PredictFn& model, const Dataset& eval, const Dataset& background,
                                       const std::vector<std::string>& features,
                                       const std::vector<std::string>& relevant);

// At most `max_rows` rows chosen by a seeded shuffle (all rows when the
// data is smaller), kept in their original order.
Dataset background_sample(const Dataset& data, std::size_t max_rows, std::uint64_t seed);

void write_attribution_csv_header(std::ostream& out);
void write_attribution_csv_rows(std::ostream& out, std::size_t instance, const Attribution& a);
nlohmann::ordered_json attribution_to_json(const Attribution& a);
nlohmann::ordered_json summary_to_json(const AttributionSummary& s);

}  // namespace causim
