#include "causim/causal_graph.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <queue>
#include <set>

#include "causim/error.hpp"
#include "causim/scm.hpp"

namespace causim {

Dag::Dag(std::vector<std::string> nodes, const std::vector<Edge>& edges,
         const std::vector<std::string>& latent)
    : nodes_(std::move(nodes)) {
    {
        std::set<std::string_view> seen;
        for (const auto& n : nodes_) {
            if (n.empty()) throw InvalidArgumentError("node names must be non-empty");
            if (!seen.insert(n).second) throw InvalidArgumentError("duplicate node '" + n + "'");
        }
    }
    parents_.resize(nodes_.size());
    children_.resize(nodes_.size());
    observed_.assign(nodes_.size(), true);
    for (const auto& e : edges) {
        const auto p = index_of(e.parent);
        const auto c = index_of(e.child);
        if (p == c) throw CycleError("self loop on '" + e.parent + "'");
        if (std::find(parents_[c].begin(), parents_[c].end(), p) != parents_[c].end()) {
            throw InvalidArgumentError("duplicate edge " + e.parent + " -> " + e.child);
        }
        parents_[c].push_back(p);
        children_[p].push_back(c);
    }
    for (const auto& l : latent) observed_[index_of(l)] = false;
    check_acyclic();
}

Dag Dag::from_model(const StructuralModel& model, const std::vector<std::string>& latent) {
    std::vector<Edge> edges;
    for (auto& [p, c] : model.edges()) edges.push_back({p, c});
    return Dag(model.nodes(), edges, latent);
}

bool Dag::contains(std::string_view node) const noexcept {
    return std::find(nodes_.begin(), nodes_.end(), node) != nodes_.end();
}

std::size_t Dag::index_of(std::string_view node) const {
    const auto it = std::find(nodes_.begin(), nodes_.end(), node);
    if (it == nodes_.end()) throw UnknownNodeError("unknown node '" + std::string(node) + "'");
    return static_cast<std::size_t>(it - nodes_.begin());
}

bool Dag::has_edge(std::string_view parent, std::string_view child) const {
    const auto p = index_of(parent);
    const auto& ps = parents_[index_of(child)];
    return std::find(ps.begin(), ps.end(), p) != ps.end();
}

NodeSet Dag::observed_nodes() const {
    NodeSet out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (observed_[i]) out.push_back(nodes_[i]);
    }
    return out;
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    for (std::size_t c = 0; c < nodes_.size(); ++c) {
        for (const auto p : parents_[c]) out.push_back({nodes_[p], nodes_[c]});
    }
    return out;
}

std::vector<bool> Dag::ancestors_of(const std::vector<std::size_t>& seeds) const {
    std::vector<bool> mark(nodes_.size(), false);
    std::vector<std::size_t> stack(seeds.begin(), seeds.end());
    while (!stack.empty()) {
        const auto n = stack.back();
        stack.pop_back();
        if (mark[n]) continue;
        mark[n] = true;
        for (const auto p : parents_[n]) stack.push_back(p);
    }
    return mark;
}

std::vector<bool> Dag::descendants_of(std::size_t node) const {
    std::vector<bool> mark(nodes_.size(), false);
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
        const auto n = stack.back();
        stack.pop_back();
        if (mark[n]) continue;
        mark[n] = true;
        for (const auto c : children_[n]) stack.push_back(c);
    }
    return mark;
}

Dag Dag::without_outgoing(std::string_view node) const {
    const auto v = index_of(node);
    Dag g = *this;
    for (const auto c : g.children_[v]) {
        auto& ps = g.parents_[c];
        ps.erase(std::remove(ps.begin(), ps.end(), v), ps.end());
    }
    g.children_[v].clear();
    return g;
}

void Dag::check_acyclic() const { (void)topological_sort(*this); }

std::vector<std::string> topological_sort(const Dag& g) {
    const auto n = g.size();
    std::vector<std::size_t> indegree(n);
    auto by_name = [&](std::size_t a, std::size_t b) { return g.nodes()[a] > g.nodes()[b]; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_name)> ready(by_name);
    for (std::size_t i = 0; i < n; ++i) {
        indegree[i] = g.parents(i).size();
        if (indegree[i] == 0) ready.push(i);
    }
    std::vector<std::string> order;
    order.reserve(n);
    while (!ready.empty()) {
        const auto v = ready.top();
        ready.pop();
        order.push_back(g.nodes()[v]);
        for (const auto c : g.children(v)) {
            if (--indegree[c] == 0) ready.push(c);
        }
    }
    if (order.size() != n) {
        std::string stuck;
        for (std::size_t i = 0; i < n; ++i) {
            if (indegree[i] > 0) stuck += (stuck.empty() ? "" : ", ") + g.nodes()[i];
        }
        throw CycleError("graph contains a cycle through {" + stuck + "}");
    }
    return order;
}

namespace {

struct QuerySets {
    std::vector<std::size_t> x, y, z;
};

QuerySets resolve(const Dag& g, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
    QuerySets q;
    std::vector<int> owner(g.size(), -1);
    auto add = [&](const NodeSet& names, std::vector<std::size_t>& out, int tag) {
        for (const auto& name : names) {
            const auto i = g.index_of(name);
            if (owner[i] == tag) continue;
            if (owner[i] >= 0) throw OverlappingSetsError("node '" + name + "' appears in two query sets");
            owner[i] = tag;
            out.push_back(i);
        }
    };
    add(x, q.x, 0);
    add(y, q.y, 1);
    add(z, q.z, 2);
    return q;
}

}  // namespace

bool d_separated(const Dag& g, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
    const auto q = resolve(g, x, y, z);
    const auto n = g.size();
    std::vector<bool> in_z(n, false);
    for (const auto v : q.z) in_z[v] = true;
    // A collider is open iff it is an ancestor of (or in) Z.
    const auto opens_collider = g.ancestors_of(q.z);

    // State (v, up): reached v from one of its children; (v, down): from a parent.
    std::vector<bool> seen_up(n, false), seen_down(n, false);
    std::deque<std::pair<std::size_t, bool>> queue;
    for (const auto v : q.x) queue.emplace_back(v, true);
    std::vector<bool> reachable(n, false);
    while (!queue.empty()) {
        const auto [v, up] = queue.front();
        queue.pop_front();
        auto& seen = up ? seen_up : seen_down;
        if (seen[v]) continue;
        seen[v] = true;
        if (!in_z[v]) reachable[v] = true;

        if (up && !in_z[v]) {
            for (const auto p : g.parents(v)) queue.emplace_back(p, true);
            for (const auto c : g.children(v)) queue.emplace_back(c, false);
        } else if (!up) {
            if (!in_z[v]) {
                for (const auto c : g.children(v)) queue.emplace_back(c, false);
            }
            if (opens_collider[v]) {
                for (const auto p : g.parents(v)) queue.emplace_back(p, true);
            }
        }
    }
    return std::none_of(q.y.begin(), q.y.end(), [&](std::size_t v) { return reachable[v]; });
}

bool d_separated_moralized(const Dag& g, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
    const auto q = resolve(g, x, y, z);
    const auto n = g.size();
    std::vector<std::size_t> seeds = q.x;
    seeds.insert(seeds.end(), q.y.begin(), q.y.end());
    seeds.insert(seeds.end(), q.z.begin(), q.z.end());
    const auto keep = g.ancestors_of(seeds);

    std::vector<std::set<std::size_t>> adj(n);
    for (std::size_t v = 0; v < n; ++v) {
        if (!keep[v]) continue;
        const auto& ps = g.parents(v);
        for (std::size_t a = 0; a < ps.size(); ++a) {
            adj[v].insert(ps[a]);
            adj[ps[a]].insert(v);
            for (std::size_t b = a + 1; b < ps.size(); ++b) {
                adj[ps[a]].insert(ps[b]);
                adj[ps[b]].insert(ps[a]);
            }
        }
    }

    std::vector<bool> blocked(n, false);
    for (const auto v : q.z) blocked[v] = true;
    std::vector<bool> target(n, false);
    for (const auto v : q.y) target[v] = true;
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack(q.x.begin(), q.x.end());
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        if (seen[v]) continue;
        seen[v] = true;
        if (target[v]) return false;
        for (const auto w : adj[v]) {
            if (!seen[w] && !blocked[w] && keep[w]) stack.push_back(w);
        }
    }
    return true;
}

std::vector<Path> backdoor_paths(const Dag& g, std::string_view cause, std::string_view outcome) {
    const auto c = g.index_of(cause);
    const auto o = g.index_of(outcome);
    if (c == o) throw InvalidArgumentError("cause and outcome must differ");

    const auto n = g.size();
    std::vector<std::vector<std::size_t>> neighbours(n);
    for (std::size_t v = 0; v < n; ++v) {
        for (const auto p : g.parents(v)) neighbours[v].push_back(p);
        for (const auto ch : g.children(v)) neighbours[v].push_back(ch);
        std::sort(neighbours[v].begin(), neighbours[v].end(),
                  [&](std::size_t a, std::size_t b) { return g.nodes()[a] < g.nodes()[b]; });
    }
    auto parents_sorted = g.parents(c);
    std::sort(parents_sorted.begin(), parents_sorted.end(),
              [&](std::size_t a, std::size_t b) { return g.nodes()[a] < g.nodes()[b]; });

    std::vector<Path> out;
    std::vector<bool> on_path(n, false);
    std::vector<std::size_t> path{c};
    on_path[c] = true;

    std::function<void(std::size_t)> extend = [&](std::size_t v) {
        if (v == o) {
            Path p;
            for (const auto i : path) p.push_back(g.nodes()[i]);
            out.push_back(std::move(p));
            return;
        }
        for (const auto w : neighbours[v]) {
            if (on_path[w]) continue;
            on_path[w] = true;
            path.push_back(w);
            extend(w);
            path.pop_back();
            on_path[w] = false;
        }
    };
    for (const auto p : parents_sorted) {
        on_path[p] = true;
        path.push_back(p);
        extend(p);
        path.pop_back();
        on_path[p] = false;
    }
    return out;
}

std::string format_path(const Dag& g, const Path& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) out += g.has_edge(path[i - 1], path[i]) ? " -> " : " <- ";
        out += path[i];
    }
    return out;
}

bool is_valid_backdoor_set(const Dag& g, std::string_view cause, std::string_view outcome,
                           const NodeSet& z) {
    const auto c = g.index_of(cause);
    const auto o = g.index_of(outcome);
    if (c == o) throw InvalidArgumentError("cause and outcome must differ");
    const auto desc = g.descendants_of(c);
    for (const auto& name : z) {
        const auto v = g.index_of(name);
        if (v == c || v == o) {
            throw OverlappingSetsError("adjustment set contains the cause or outcome '" + name + "'");
        }
        if (desc[v]) return false;
    }
    const Dag cut = g.without_outgoing(cause);
    return d_separated(cut, {std::string(cause)}, {std::string(outcome)}, z);
}

std::vector<NodeSet> AdjustmentAnalysis::valid_sets() const {
    std::vector<NodeSet> out;
    out.reserve(valid_masks.size());
    for (const auto mask : valid_masks) {
        NodeSet s;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (mask & (1u << i)) s.push_back(candidates[i]);
        }
        out.push_back(std::move(s));
    }
    return out;
}

AdjustmentAnalysis minimal_backdoor_sets(const Dag& g, std::string_view cause,
                                         std::string_view outcome, const NodeSet& candidates) {
    AdjustmentAnalysis a;
    a.cause = std::string(cause);
    a.outcome = std::string(outcome);
    a.backdoor_paths = backdoor_paths(g, cause, outcome);

    std::set<std::string> pool;
    for (const auto& name : candidates) {
        const auto v = g.index_of(name);
        if (name == cause || name == outcome || !g.is_observed(v)) continue;
        pool.insert(name);
    }
    if (pool.size() > kMaxAdjustmentCandidates) {
        throw TooManyCandidatesError(std::to_string(pool.size()) + " adjustment candidates exceed the limit of " +
                                     std::to_string(kMaxAdjustmentCandidates));
    }
    a.candidates.assign(pool.begin(), pool.end());

    const auto k = a.candidates.size();
    const std::uint32_t full = k == 0 ? 0u : ((1u << k) - 1u);
    std::vector<std::uint32_t> masks;
    masks.reserve(std::size_t{1} << k);
    for (std::uint32_t m = 0;; ++m) {
        masks.push_back(m);
        if (m == full) break;
    }
    // By size, then by the name order of the members.
    std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t x, std::uint32_t y) {
        const int px = std::popcount(x);
        const int py = std::popcount(y);
        if (px != py) return px < py;
        // Lexicographic on ascending member indices: the lowest differing
        // bit decides, and the mask holding it sorts first.
        const std::uint32_t diff = x ^ y;
        const std::uint32_t lowest = diff & (~diff + 1u);
        return (x & lowest) != 0;
    });

    std::vector<std::uint32_t> minimal;
    for (const auto m : masks) {
        NodeSet z;
        for (std::size_t i = 0; i < k; ++i) {
            if (m & (1u << i)) z.push_back(a.candidates[i]);
        }
        if (!is_valid_backdoor_set(g, cause, outcome, z)) continue;
        a.valid_masks.push_back(m);
        const bool contains_minimal =
            std::any_of(minimal.begin(), minimal.end(), [m](std::uint32_t s) { return (s & m) == s; });
        if (!contains_minimal) {
            minimal.push_back(m);
            a.minimal_sets.push_back(std::move(z));
        }
    }
    a.identifiable = !a.minimal_sets.empty();
    return a;
}

AdjustmentAnalysis analyze_adjustment(const Dag& g, std::string_view cause, std::string_view outcome) {
    return minimal_backdoor_sets(g, cause, outcome, g.observed_nodes());
}

}  // namespace causim
