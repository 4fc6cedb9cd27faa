#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "causim/dataset.hpp"

namespace causim {

enum class GbtLoss { squared, logistic };

std::string to_string(GbtLoss loss);
GbtLoss parse_gbt_loss(std::string_view s);

struct GbtConfig {
    std::size_t n_trees = 100;
    std::size_t max_depth = 3;
    double learning_rate = 0.1;
    std::size_t min_leaf = 20;
    std::size_t max_bins = 64;
    // Fraction of rows drawn (without replacement) for each tree.
    double subsample = 1.0;
    GbtLoss loss = GbtLoss::squared;
    std::uint64_t seed = 0;

    void validate() const;
};

// Internal nodes send x[feature] <= threshold left. Leaves carry the
// already-shrunk contribution to the margin.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double evaluate(std::span<const double> x) const;
    std::size_t depth() const;
    // Sorted distinct feature indices referenced by internal nodes.
    std::vector<std::size_t> used_features() const;
};

struct GbtModel {
    std::vector<std::string> features;
    GbtLoss loss = GbtLoss::squared;
    double learning_rate = 0.1;
    double base_score = 0.0;  // target mean, or log-odds for logistic loss
    std::vector<RegressionTree> trees;
    // Training loss after 0, 1, ..., n_trees trees. Not serialized.
    std::vector<double> training_loss;

    // Throws InvalidModelError on bad feature indices or broken links.
    void validate() const;

    double margin_row(std::span<const double> x) const;
    // Margin mapped through the link: identity, or sigmoid for logistic loss.
    double predict_row(std::span<const double> x) const;
    std::vector<double> predict(const Dataset& data) const;
    std::vector<double> predict_margin(const Dataset& data) const;
};

// Stagewise boosting on negative loss gradients with depth-limited trees.
// Split candidates are quantile cut points (at most max_bins bins per
// feature); split gain is the reduction in squared error of the residuals.
// Leaves take the mean residual (squared loss) or a Newton step that is
// halved until the leaf's loss does not increase (logistic loss).
// Throws DegenerateTargetError for a constant target.
GbtModel gbt_train(const Dataset& train, std::string_view target, const std::vector<std::string>& features,
                   const GbtConfig& config = {});

}  // namespace causim
