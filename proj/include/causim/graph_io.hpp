#pragma once

#include <iosfwd>
#include <string>

#include "causim/causal_graph.hpp"

namespace causim {

// Edge list: one `parent child` pair per line; a line with a single name
// declares an isolated node; `#` starts a comment. Nodes are ordered by
// first appearance.
//
// The optional observed list holds whitespace-separated node names; when it
// is given, every node not listed is latent. Without it all nodes are
// observed.
Dag read_edge_list(std::istream& edges);
Dag read_edge_list(std::istream& edges, std::istream& observed);

void write_edge_list(std::ostream& out, const Dag& g);
void write_observed_list(std::ostream& out, const Dag& g);

// Graphviz DOT; latent nodes are drawn dashed.
std::string to_dot(const Dag& g, const std::string& name = "causal_graph");

}  // namespace causim
