#include "causim/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "causim/error.hpp"
#include "causim/split.hpp"
#include "features.hpp"

namespace causim {

namespace {

std::vector<double> row_major(const Dataset& data, const std::vector<std::string>& features) {
    const auto cols = detail::feature_columns(data, features);
    const std::size_t d = features.size();
    std::vector<double> out(data.n_rows() * d);
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) out[i * d + j] = cols[j][i];
    }
    return out;
}

}  // namespace

ShapleyExplainer::ShapleyExplainer(PredictFn model, const Dataset& background, std::vector<std::string> features)
    : model_(std::move(model)), features_(std::move(features)) {
    if (!model_) throw InvalidArgumentError("explainer needs a model");
    if (features_.size() > kMaxShapleyFeatures) {
        throw TooManyFeaturesError("exact enumeration supports at most 12 features, got " +
                                   std::to_string(features_.size()));
    }
    if (background.empty() || background.n_rows() == 0) throw EmptyBackgroundError("background sample is empty");
    background_ = row_major(background, features_);
    rows_ = background.n_rows();
}

std::vector<double> ShapleyExplainer::coalition_values(std::span<const double> instance) const {
    const std::size_t d = features_.size();
    if (instance.size() != d) throw InvalidArgumentError("instance width differs from feature count");
    const std::size_t masks = std::size_t{1} << d;
    std::vector<double> values(masks);
    std::vector<double> z(d);
    for (std::size_t mask = 0; mask < masks; ++mask) {
        double sum = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double* b = background_.data() + i * d;
            for (std::size_t j = 0; j < d; ++j) z[j] = (mask >> j) & 1U ? instance[j] : b[j];
            sum += model_(z);
        }
        values[mask] = sum / static_cast<double>(rows_);
    }
    return values;
}

std::vector<double> shapley_from_values(std::span<const double> values, std::size_t n_features) {
    const std::size_t d = n_features;
    if (values.size() != (std::size_t{1} << d)) throw InvalidArgumentError("need 2^d coalition values");
    // weight[s] = s! (d - s - 1)! / d! = 1 / (d * C(d - 1, s))
    std::vector<double> weight(d);
    std::uint64_t binom = 1;
    for (std::size_t s = 0; s < d; ++s) {
        weight[s] = 1.0 / (static_cast<double>(d) * static_cast<double>(binom));
        binom = binom * (d - 1 - s) / (s + 1);
    }
    std::vector<double> phi(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        double acc = 0.0;
        for (std::size_t mask = 0; mask < values.size(); ++mask) {
            if (mask & bit) continue;
            const auto s = static_cast<std::size_t>(std::popcount(mask));
            acc += weight[s] * (values[mask | bit] - values[mask]);
        }
        phi[j] = acc;
    }
    return phi;
}

Attribution ShapleyExplainer::explain(std::span<const double> instance) const {
    const auto v = coalition_values(instance);
    Attribution a;
    a.features = features_;
    a.phi = shapley_from_values(v, features_.size());
    a.base_value = v.front();
    a.prediction = model_(instance);
    double total = a.base_value;
    for (double p : a.phi) total += p;
    a.efficiency_residual = total - a.prediction;
    return a;
}

Attribution ShapleyExplainer::explain(const Dataset& data, std::size_t row) const {
    return explain(data.row(row, features_));
}

std::vector<Attribution> ShapleyExplainer::explain_all(const Dataset& data) const {
    (void)detail::feature_columns(data, features_);
    std::vector<Attribution> out;
    out.reserve(data.n_rows());
    for (std::size_t r = 0; r < data.n_rows(); ++r) out.push_back(explain(data, r));
    return out;
}

AdditiveShapleyExplainer::AdditiveShapleyExplainer(std::vector<ModelPart> parts, double constant,
                                                   const Dataset& background, std::vector<std::string> features)
    : parts_(std::move(parts)), constant_(constant), features_(std::move(features)) {
    if (features_.size() > kMaxShapleyFeatures) {
        throw TooManyFeaturesError("exact enumeration supports at most 12 features, got " +
                                   std::to_string(features_.size()));
    }
    if (background.empty() || background.n_rows() == 0) throw EmptyBackgroundError("background sample is empty");
    for (auto& p : parts_) {
        if (!p.fn) throw InvalidArgumentError("model part without a function");
        std::sort(p.features.begin(), p.features.end());
        p.features.erase(std::unique(p.features.begin(), p.features.end()), p.features.end());
        if (!p.features.empty() && p.features.back() >= features_.size()) {
            throw InvalidArgumentError("model part reads a feature index out of range");
        }
    }
    background_ = row_major(background, features_);
    rows_ = background.n_rows();
}

Attribution AdditiveShapleyExplainer::explain(std::span<const double> instance) const {
    const std::size_t d = features_.size();
    if (instance.size() != d) throw InvalidArgumentError("instance width differs from feature count");
    Attribution a;
    a.features = features_;
    a.phi.assign(d, 0.0);
    a.base_value = constant_;
    a.prediction = constant_;
    std::vector<double> z(d);
    std::vector<double> local;
    for (const auto& part : parts_) {
        const std::size_t k = part.features.size();
        local.assign(std::size_t{1} << k, 0.0);
        for (std::size_t mask = 0; mask < local.size(); ++mask) {
            double sum = 0.0;
            for (std::size_t i = 0; i < rows_; ++i) {
                std::copy_n(background_.data() + i * d, d, z.data());
                for (std::size_t j = 0; j < k; ++j) {
                    if ((mask >> j) & 1U) z[part.features[j]] = instance[part.features[j]];
                }
                sum += part.fn(z);
            }
            local[mask] = sum / static_cast<double>(rows_);
        }
        const auto phi = shapley_from_values(local, k);
        for (std::size_t j = 0; j < k; ++j) a.phi[part.features[j]] += phi[j];
        a.base_value += local.front();
        a.prediction += part.fn(instance);
    }
    double total = a.base_value;
    for (double p : a.phi) total += p;
    a.efficiency_residual = total - a.prediction;
    return a;
}

std::vector<Attribution> AdditiveShapleyExplainer::explain_all(const Dataset& data) const {
    const auto rows = row_major(data, features_);
    const std::size_t d = features_.size();
    std::vector<Attribution> out;
    out.reserve(data.n_rows());
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
        out.push_back(explain(std::span<const double>(rows.data() + r * d, d)));
    }
    return out;
}

std::vector<ModelPart> tree_parts(const GbtModel& model) {
    std::vector<ModelPart> parts;
    parts.reserve(model.trees.size());
    for (const auto& tree : model.trees) {
        parts.push_back({tree.used_features(), [&tree](std::span<const double> x) { return tree.evaluate(x); }});
    }
    return parts;
}

Attribution shapley_exact(const PredictFn& model, std::span<const double> instance, const Dataset& background,
                          const std::vector<std::string>& features) {
    return ShapleyExplainer(model, background, features).explain(instance);
}

AttributionSummary summarize_attributions(const std::vector<Attribution>& attributions,
                                          const std::vector<std::string>& relevant) {
    if (attributions.empty()) throw InvalidArgumentError("no attributions to summarize");
    AttributionSummary s;
    s.features = attributions.front().features;
    const std::size_t d = s.features.size();
    for (const auto& r : relevant) {
        if (std::find(s.features.begin(), s.features.end(), r) == s.features.end()) {
            throw InvalidArgumentError("relevant feature '" + r + "' is not explained");
        }
    }
    s.mean_abs_phi.assign(d, 0.0);
    s.relevant.assign(d, false);
    for (std::size_t j = 0; j < d; ++j) {
        s.relevant[j] = std::find(relevant.begin(), relevant.end(), s.features[j]) != relevant.end();
    }
    for (const auto& a : attributions) {
        if (a.features != s.features) throw InvalidArgumentError("attributions cover different features");
        for (std::size_t j = 0; j < d; ++j) s.mean_abs_phi[j] += std::fabs(a.phi[j]);
        s.max_abs_efficiency_residual = std::max(s.max_abs_efficiency_residual, std::fabs(a.efficiency_residual));
    }
    s.n_instances = attributions.size();
    for (std::size_t j = 0; j < d; ++j) {
        s.mean_abs_phi[j] /= static_cast<double>(s.n_instances);
        (s.relevant[j] ? s.relevant_mass : s.irrelevant_mass) += s.mean_abs_phi[j];
    }
    return s;
}

AttributionSummary attribution_summary(const PredictFn& model, const Dataset& eval, const Dataset& background,
                                       const std::vector<std::string>& features,
                                       const std::vector<std::string>& relevant) {
    ShapleyExplainer explainer(model, background, features);
    return summarize_attributions(explainer.explain_all(eval), relevant);
}

Dataset background_sample(const Dataset& data, std::size_t max_rows, std::uint64_t seed) {
    if (max_rows == 0) throw EmptyBackgroundError("background size must be positive");
    if (data.n_rows() <= max_rows) return data;
    auto p = permutation(data.n_rows(), seed);
    p.resize(max_rows);
    std::sort(p.begin(), p.end());
    return data.select_rows(p);
}

void write_attribution_csv_header(std::ostream& out) { out << "instance,feature,phi\n"; }

void write_attribution_csv_rows(std::ostream& out, std::size_t instance, const Attribution& a) {
    for (std::size_t j = 0; j < a.features.size(); ++j) out << fmt::format("{},{},{}\n", instance, a.features[j], a.phi[j]);
}

nlohmann::ordered_json attribution_to_json(const Attribution& a) {
    nlohmann::ordered_json j;
    j["features"] = a.features;
    j["phi"] = a.phi;
    j["base_value"] = a.base_value;
    j["prediction"] = a.prediction;
    j["efficiency_residual"] = a.efficiency_residual;
    return j;
}

nlohmann::ordered_json summary_to_json(const AttributionSummary& s) {
    nlohmann::ordered_json j;
    j["features"] = s.features;
    j["mean_abs_phi"] = s.mean_abs_phi;
    std::vector<std::string> relevant;
    for (std::size_t k = 0; k < s.features.size(); ++k) {
        if (s.relevant[k]) relevant.push_back(s.features[k]);
    }
    j["relevant"] = relevant;
    j["relevant_mass"] = s.relevant_mass;
    j["irrelevant_mass"] = s.irrelevant_mass;
    j["n_instances"] = s.n_instances;
    j["max_abs_efficiency_residual"] = s.max_abs_efficiency_residual;
    return j;
}

}  // namespace causim
