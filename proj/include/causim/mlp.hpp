#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causim/dataset.hpp"

namespace causim {

enum class Activation { tanh, relu };
enum class OutputKind { identity, logistic };
enum class Optimizer { gradient_descent, adam };

std::string to_string(Activation a);
std::string to_string(OutputKind o);
std::string to_string(Optimizer o);
Activation parse_activation(std::string_view s);
OutputKind parse_output_kind(std::string_view s);
Optimizer parse_optimizer(std::string_view s);

struct MlpConfig {
    std::vector<std::size_t> hidden{32};
    Activation activation = Activation::tanh;
    OutputKind output = OutputKind::identity;
    Optimizer optimizer = Optimizer::gradient_descent;
    double learning_rate = 0.01;
    std::size_t epochs = 20000;
    // Standardize inputs (and, for identity output, the target) before
    // training; the scaling is stored in the model.
    bool standardize = true;
    std::uint64_t seed = 0;

    void validate() const;
};

// Feed-forward network. Layer l maps layer_sizes[l] -> layer_sizes[l+1] with
// weights[l] of shape (out x in). Hidden layers apply `activation`, the last
// layer applies `output`.
struct MlpModel {
    std::vector<std::string> features;
    std::vector<std::size_t> layer_sizes;
    Activation activation = Activation::tanh;
    OutputKind output = OutputKind::identity;
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    std::vector<double> input_mean;
    std::vector<double> input_scale;
    double output_mean = 0.0;
    double output_scale = 1.0;
    // Full-batch training loss on the internal scale, one entry per epoch
    // plus the initial loss. Not serialized.
    std::vector<double> training_loss;

    std::size_t n_parameters() const;
    // Throws InvalidModelError on inconsistent shapes or non-finite values.
    void validate() const;

    // Prediction for one row given in `features` order (original units;
    // probabilities for logistic output).
    double predict_row(std::span<const double> x) const;
    std::vector<double> predict(const Dataset& data) const;
};

// Builds an untrained network with seeded N(0, 1/fan_in) weights and zero
// biases. Scaling is the identity.
MlpModel mlp_init(std::vector<std::string> features, const MlpConfig& config);

MlpModel mlp_train(const Dataset& train, std::string_view target, const std::vector<std::string>& features,
                   const MlpConfig& config = {});

// Parameters flattened layer by layer: weights (column-major) then biases.
std::vector<double> get_parameters(const MlpModel& model);
void set_parameters(MlpModel& model, std::span<const double> params);

struct LossGradient {
    double loss = 0.0;
    std::vector<double> gradient;  // same layout as get_parameters
};

// Mean loss and its gradient over the given rows on the internal scale:
// columns of `inputs` are already-scaled samples, `targets` scaled targets.
// Squared error for identity output, cross-entropy for logistic output.
LossGradient mlp_loss_gradient(const MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets);

// Applies the model's stored input scaling to the feature columns of `data`
// (features x rows) and its output scaling to `target`.
Eigen::MatrixXd mlp_scaled_inputs(const MlpModel& model, const Dataset& data);
Eigen::VectorXd mlp_scaled_targets(const MlpModel& model, const Dataset& data, std::string_view target);

}  // namespace causim
