#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "causim/dataset.hpp"

namespace causim {

// Distribution of the exogenous term of one structural assignment. The drawn
// value is `scale * X` with X ~ gaussian(a = mean, b = sd), uniform(a = lo,
// b = hi) or the constant a.
struct NoiseSpec {
    enum class Kind { gaussian, uniform, constant };

    Kind kind = Kind::gaussian;
    double a = 0.0;
    double b = 1.0;
    double scale = 1.0;

    static NoiseSpec gaussian(double mean, double sd, double scale = 1.0) {
        return {Kind::gaussian, mean, sd, scale};
    }
    static NoiseSpec standard_normal(double scale = 1.0) { return gaussian(0.0, 1.0, scale); }
    static NoiseSpec uniform(double lo, double hi, double scale = 1.0) {
        return {Kind::uniform, lo, hi, scale};
    }
    static NoiseSpec constant(double c) { return {Kind::constant, c, 0.0, 1.0}; }

    // Inverse-CDF transform of a uniform variate u in (0, 1).
    double draw(double u) const;
    double mean() const;
    double variance() const;
    void validate() const;

    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

// Deterministic part of a custom assignment: receives the parent values in
// the order of `StructuralAssignment::parents`.
using StructuralFunction = std::function<double(std::span<const double>)>;

// One ":=" line of a structural causal model. A linear assignment computes
// intercept + sum_k weights[k] * parent_k + noise; a custom one computes
// intercept + function(parents) + noise.
struct StructuralAssignment {
    enum class Kind { linear, custom };

    Kind kind = Kind::linear;
    std::vector<std::string> parents;
    std::vector<double> weights;
    double intercept = 0.0;
    NoiseSpec noise;
    StructuralFunction function;

    static StructuralAssignment exogenous(NoiseSpec noise) {
        return {Kind::linear, {}, {}, 0.0, noise, {}};
    }
    static StructuralAssignment linear(std::vector<std::string> parents, std::vector<double> weights,
                                       NoiseSpec noise, double intercept = 0.0) {
        return {Kind::linear, std::move(parents), std::move(weights), intercept, noise, {}};
    }
    static StructuralAssignment custom(std::vector<std::string> parents, StructuralFunction fn,
                                       NoiseSpec noise, double intercept = 0.0) {
        return {Kind::custom, std::move(parents), {}, intercept, noise, std::move(fn)};
    }

    double evaluate(std::span<const double> parent_values, double noise_value) const;
};

// Unvalidated list of (node, assignment) pairs in declaration order.
class ModelSpec {
public:
    ModelSpec& add(std::string node, StructuralAssignment assignment) {
        entries_.emplace_back(std::move(node), std::move(assignment));
        return *this;
    }

    const std::vector<std::pair<std::string, StructuralAssignment>>& entries() const noexcept {
        return entries_;
    }

private:
    std::vector<std::pair<std::string, StructuralAssignment>> entries_;
};

// A validated, immutable structural causal model. Only `validate_model`
// constructs one, so every instance is acyclic and well-formed and carries
// its cached topological order.
class StructuralModel {
public:
    const std::vector<std::string>& nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    bool contains(std::string_view node) const noexcept;
    std::size_t index_of(std::string_view node) const;

    const StructuralAssignment& assignment(std::size_t index) const { return assignments_.at(index); }
    const StructuralAssignment& assignment(std::string_view node) const {
        return assignments_[index_of(node)];
    }

    const std::vector<std::size_t>& parent_indices(std::size_t index) const {
        return parents_.at(index);
    }
    const std::vector<std::size_t>& topological_order() const noexcept { return order_; }

    // (parent, child) pairs in declaration order.
    std::vector<std::pair<std::string, std::string>> edges() const;

    bool is_linear() const noexcept;
    ModelSpec to_spec() const;

private:
    friend StructuralModel validate_model(const ModelSpec& spec);

    std::vector<std::string> nodes_;
    std::vector<StructuralAssignment> assignments_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::size_t> order_;
};

// Checks acyclicity and well-formedness and caches the evaluation order.
// Throws CycleError, UnknownParentError, DuplicateAssignmentError or
// InvalidModelError.
StructuralModel validate_model(const ModelSpec& spec);

// Draws n rows. The noise of node i in row r is a pure function of
// (seed, i, r), so results do not depend on evaluation order and identical
// inputs give bit-identical datasets.
Dataset sample(const StructuralModel& model, std::size_t n, std::uint64_t seed);

// Graph surgery: `node` loses its parents and takes the given value or
// distribution. All other assignments are unchanged.
StructuralModel intervene(const StructuralModel& model, std::string_view node, double value);
StructuralModel intervene(const StructuralModel& model, std::string_view node, NoiseSpec noise);

}  // namespace causim
