#include "causim/scm.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "causim/error.hpp"
#include "causim/rng.hpp"

namespace causim {

double NoiseSpec::draw(double u) const {
    switch (kind) {
        case Kind::gaussian:
            return scale * (a + b * rng::normal_quantile(u));
        case Kind::uniform:
            return scale * (a + (b - a) * u);
        case Kind::constant:
            return scale * a;
    }
    return 0.0;
}

double NoiseSpec::mean() const {
    switch (kind) {
        case Kind::gaussian:
        case Kind::constant:
            return scale * a;
        case Kind::uniform:
            return scale * 0.5 * (a + b);
    }
    return 0.0;
}

double NoiseSpec::variance() const {
    switch (kind) {
        case Kind::gaussian:
            return scale * scale * b * b;
        case Kind::uniform:
            return scale * scale * (b - a) * (b - a) / 12.0;
        case Kind::constant:
            return 0.0;
    }
    return 0.0;
}

void NoiseSpec::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(scale)) {
        throw InvalidModelError("noise parameters must be finite");
    }
    if (kind == Kind::gaussian && b < 0.0) {
        throw InvalidModelError("gaussian noise needs sd >= 0");
    }
    if (kind == Kind::uniform && a > b) {
        throw InvalidModelError("uniform noise needs lo <= hi");
    }
}

double StructuralAssignment::evaluate(std::span<const double> parent_values,
                                      double noise_value) const {
    double value = intercept + noise_value;
    if (kind == Kind::linear) {
        for (std::size_t k = 0; k < weights.size(); ++k) value += weights[k] * parent_values[k];
    } else {
        value += function(parent_values);
    }
    return value;
}

bool StructuralModel::contains(std::string_view node) const noexcept {
    return std::find(nodes_.begin(), nodes_.end(), node) != nodes_.end();
}

std::size_t StructuralModel::index_of(std::string_view node) const {
    const auto it = std::find(nodes_.begin(), nodes_.end(), node);
    if (it == nodes_.end()) throw UnknownNodeError("unknown node '" + std::string(node) + "'");
    return static_cast<std::size_t>(it - nodes_.begin());
}

std::vector<std::pair<std::string, std::string>> StructuralModel::edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        for (const auto p : parents_[i]) out.emplace_back(nodes_[p], nodes_[i]);
    }
    return out;
}

bool StructuralModel::is_linear() const noexcept {
    return std::all_of(assignments_.begin(), assignments_.end(), [](const auto& a) {
        return a.kind == StructuralAssignment::Kind::linear;
    });
}

ModelSpec StructuralModel::to_spec() const {
    ModelSpec spec;
    for (std::size_t i = 0; i < nodes_.size(); ++i) spec.add(nodes_[i], assignments_[i]);
    return spec;
}

namespace {

// Returns one cycle among `remaining` nodes (those Kahn's algorithm could not
// order), as a closed node sequence.
std::vector<std::string> find_cycle(const std::vector<std::string>& nodes,
                                    const std::vector<std::vector<std::size_t>>& parents,
                                    const std::vector<bool>& remaining) {
    // Every remaining node has a remaining parent; walk parents until a
    // node repeats.
    std::size_t start = 0;
    while (!remaining[start]) ++start;
    std::vector<std::size_t> walk;
    std::vector<int> seen_at(nodes.size(), -1);
    std::size_t cur = start;
    while (seen_at[cur] < 0) {
        seen_at[cur] = static_cast<int>(walk.size());
        walk.push_back(cur);
        for (const auto p : parents[cur]) {
            if (remaining[p]) {
                cur = p;
                break;
            }
        }
    }
    std::vector<std::string> cycle;
    for (std::size_t i = static_cast<std::size_t>(seen_at[cur]); i < walk.size(); ++i) {
        cycle.push_back(nodes[walk[i]]);
    }
    std::reverse(cycle.begin(), cycle.end());
    cycle.push_back(cycle.front());
    return cycle;
}

}  // namespace

StructuralModel validate_model(const ModelSpec& spec) {
    StructuralModel m;
    std::map<std::string, std::size_t, std::less<>> index;
    for (const auto& [node, assignment] : spec.entries()) {
        if (node.empty()) throw InvalidModelError("node names must be non-empty");
        if (!index.emplace(node, m.nodes_.size()).second) {
            throw DuplicateAssignmentError("node '" + node + "' has more than one assignment");
        }
        m.nodes_.push_back(node);
        m.assignments_.push_back(assignment);
    }

    const std::size_t n = m.nodes_.size();
    m.parents_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = m.assignments_[i];
        a.noise.validate();
        if (a.kind == StructuralAssignment::Kind::linear && a.weights.size() != a.parents.size()) {
            throw InvalidModelError("node '" + m.nodes_[i] + "' has " +
                                    std::to_string(a.weights.size()) + " weights for " +
                                    std::to_string(a.parents.size()) + " parents");
        }
        if (a.kind == StructuralAssignment::Kind::custom && !a.function) {
            throw InvalidModelError("custom node '" + m.nodes_[i] + "' has no function");
        }
        for (const auto& p : a.parents) {
            const auto it = index.find(p);
            if (it == index.end()) {
                throw UnknownParentError("node '" + m.nodes_[i] + "' references unknown parent '" +
                                         p + "'");
            }
            if (std::find(m.parents_[i].begin(), m.parents_[i].end(), it->second) !=
                m.parents_[i].end()) {
                throw InvalidModelError("node '" + m.nodes_[i] + "' lists parent '" + p + "' twice");
            }
            m.parents_[i].push_back(it->second);
        }
    }

    // Kahn's algorithm; ties broken by declaration order.
    std::vector<std::size_t> indegree(n);
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t i = 0; i < n; ++i) {
        indegree[i] = m.parents_[i].size();
        for (const auto p : m.parents_[i]) children[p].push_back(i);
    }
    std::vector<bool> done(n, false);
    while (m.order_.size() < n) {
        std::size_t next = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!done[i] && indegree[i] == 0) {
                next = i;
                break;
            }
        }
        if (next == n) {
            std::vector<bool> remaining(n);
            for (std::size_t i = 0; i < n; ++i) remaining[i] = !done[i];
            const auto cycle = find_cycle(m.nodes_, m.parents_, remaining);
            std::string text;
            for (std::size_t i = 0; i < cycle.size(); ++i) text += (i ? " -> " : "") + cycle[i];
            throw CycleError("model contains a cycle: " + text);
        }
        done[next] = true;
        m.order_.push_back(next);
        for (const auto c : children[next]) --indegree[c];
    }
    return m;
}

Dataset sample(const StructuralModel& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InsufficientDataError("sample size must be at least 1");
    const std::size_t k = model.size();
    std::vector<std::vector<double>> columns(k, std::vector<double>(n));
    std::vector<double> parent_values;
    for (std::size_t r = 0; r < n; ++r) {
        for (const auto i : model.topological_order()) {
            const auto& a = model.assignment(i);
            const auto& parents = model.parent_indices(i);
            parent_values.resize(parents.size());
            for (std::size_t p = 0; p < parents.size(); ++p) parent_values[p] = columns[parents[p]][r];
            const double u = rng::to_unit_open(rng::derive(seed, i, r));
            columns[i][r] = a.evaluate(parent_values, a.noise.draw(u));
        }
    }
    Dataset data(seed);
    for (std::size_t i = 0; i < k; ++i) data.add_column(model.nodes()[i], std::move(columns[i]));
    return data;
}

StructuralModel intervene(const StructuralModel& model, std::string_view node, NoiseSpec noise) {
    const std::size_t target = model.index_of(node);
    ModelSpec spec;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (i == target) {
            spec.add(model.nodes()[i], StructuralAssignment::exogenous(noise));
        } else {
            spec.add(model.nodes()[i], model.assignment(i));
        }
    }
    return validate_model(spec);
}

StructuralModel intervene(const StructuralModel& model, std::string_view node, double value) {
    return intervene(model, node, NoiseSpec::constant(value));
}

}  // namespace causim
