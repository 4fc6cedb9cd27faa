#include "causim/graph_io.hpp"

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "causim/error.hpp"

namespace causim {

namespace {

struct EdgeList {
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
};

EdgeList parse_edges(std::istream& in) {
    EdgeList out;
    std::set<std::string> seen;
    auto declare = [&](const std::string& n) {
        if (seen.insert(n).second) out.nodes.push_back(n);
    };
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
        std::istringstream words(text);
        std::vector<std::string> w;
        for (std::string s; words >> s;) w.push_back(s);
        if (w.empty()) continue;
        if (w.size() == 1) {
            declare(w[0]);
        } else if (w.size() == 2) {
            declare(w[0]);
            declare(w[1]);
            out.edges.push_back({w[0], w[1]});
        } else {
            throw ParseError("line " + std::to_string(line) + ": expected 'parent child'");
        }
    }
    return out;
}

}  // namespace

Dag read_edge_list(std::istream& edges) {
    auto parsed = parse_edges(edges);
    return Dag(std::move(parsed.nodes), parsed.edges);
}

Dag read_edge_list(std::istream& edges, std::istream& observed) {
    auto parsed = parse_edges(edges);
    std::set<std::string> obs;
    for (std::string s; observed >> s;) {
        if (std::find(parsed.nodes.begin(), parsed.nodes.end(), s) == parsed.nodes.end()) {
            throw UnknownNodeError("observed list names unknown node '" + s + "'");
        }
        obs.insert(s);
    }
    std::vector<std::string> latent;
    for (const auto& n : parsed.nodes) {
        if (!obs.count(n)) latent.push_back(n);
    }
    return Dag(std::move(parsed.nodes), parsed.edges, latent);
}

void write_edge_list(std::ostream& out, const Dag& g) {
    // Declare every node up front so the reader reproduces node order.
    for (std::size_t i = 0; i < g.size(); ++i) out << g.nodes()[i] << '\n';
    for (const auto& e : g.edges()) out << e.parent << ' ' << e.child << '\n';
}

void write_observed_list(std::ostream& out, const Dag& g) {
    for (const auto& n : g.observed_nodes()) out << n << '\n';
}

std::string to_dot(const Dag& g, const std::string& name) {
    std::ostringstream out;
    out << "digraph " << name << " {\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        out << "  \"" << g.nodes()[i] << '"';
        if (!g.is_observed(i)) out << " [style=dashed]";
        out << ";\n";
    }
    for (const auto& e : g.edges()) out << "  \"" << e.parent << "\" -> \"" << e.child << "\";\n";
    out << "}\n";
    return out.str();
}

}  // namespace causim
