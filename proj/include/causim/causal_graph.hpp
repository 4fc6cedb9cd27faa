#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace causim {

class StructuralModel;

struct Edge {
    std::string parent;
    std::string child;
};

using NodeSet = std::vector<std::string>;
using Path = std::vector<std::string>;

// Directed acyclic graph with an observed/latent flag per node. Acyclicity
// is checked on construction.
class Dag {
public:
    // Throws UnknownNodeError for edges with undeclared endpoints, CycleError
    // for cycles (including self loops), InvalidArgumentError for duplicates.
    Dag(std::vector<std::string> nodes, const std::vector<Edge>& edges,
        const std::vector<std::string>& latent = {});

    static Dag from_model(const StructuralModel& model, const std::vector<std::string>& latent = {});

    const std::vector<std::string>& nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    bool contains(std::string_view node) const noexcept;
    std::size_t index_of(std::string_view node) const;

    const std::vector<std::size_t>& parents(std::size_t i) const { return parents_.at(i); }
    const std::vector<std::size_t>& children(std::size_t i) const { return children_.at(i); }
    bool has_edge(std::string_view parent, std::string_view child) const;
    bool is_observed(std::size_t i) const { return observed_.at(i); }
    bool is_observed(std::string_view node) const { return observed_[index_of(node)]; }
    NodeSet observed_nodes() const;
    std::vector<Edge> edges() const;

    // Ancestors / descendants including the node itself, as index flags.
    std::vector<bool> ancestors_of(const std::vector<std::size_t>& seeds) const;
    std::vector<bool> descendants_of(std::size_t node) const;

    // Copy with every edge leaving `node` removed.
    Dag without_outgoing(std::string_view node) const;

private:
    Dag() = default;
    void check_acyclic() const;

    std::vector<std::string> nodes_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<bool> observed_;
};

// Kahn's algorithm with ties broken by node name.
std::vector<std::string> topological_sort(const Dag& g);

// d-separation of X and Y given Z by reachability over (node, direction)
// states. X, Y, Z must be pairwise disjoint (OverlappingSetsError).
bool d_separated(const Dag& g, const NodeSet& x, const NodeSet& y, const NodeSet& z);

// Same query answered by separation in the moralized ancestral graph.
bool d_separated_moralized(const Dag& g, const NodeSet& x, const NodeSet& y, const NodeSet& z);

// Simple paths from cause to outcome whose first edge points into cause,
// enumerated depth-first with neighbours in name order.
std::vector<Path> backdoor_paths(const Dag& g, std::string_view cause, std::string_view outcome);

// Renders a path with edge directions, e.g. "x0 <- x2 -> x3 -> y".
std::string format_path(const Dag& g, const Path& path);

// Backdoor criterion: no member of Z descends from cause, and Z
// d-separates cause from outcome once cause's outgoing edges are removed.
bool is_valid_backdoor_set(const Dag& g, std::string_view cause, std::string_view outcome,
                           const NodeSet& z);

struct AdjustmentAnalysis {
    std::string cause;
    std::string outcome;
    std::vector<Path> backdoor_paths;
    // Observed candidates actually searched, sorted by name.
    NodeSet candidates;
    // Every valid subset of `candidates`; bit i stands for candidates[i].
    std::vector<std::uint32_t> valid_masks;
    // Inclusion-minimal valid sets, by size then name.
    std::vector<NodeSet> minimal_sets;
    bool identifiable = false;

    std::vector<NodeSet> valid_sets() const;
};

inline constexpr std::size_t kMaxAdjustmentCandidates = 20;

// Exhaustive search over subsets of `candidates` (latent nodes and the
// query pair itself are dropped). More than 20 remaining candidates throws
// TooManyCandidatesError.
AdjustmentAnalysis minimal_backdoor_sets(const Dag& g, std::string_view cause,
                                         std::string_view outcome, const NodeSet& candidates);

// minimal_backdoor_sets over all observed nodes.
AdjustmentAnalysis analyze_adjustment(const Dag& g, std::string_view cause, std::string_view outcome);

}  // namespace causim
