#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "amrpe/linearize.hpp"

namespace amrpe {

/// One linearization segment: a head label, its (role, target) label pairs,
/// and the closing <stop> label. Indices refer into the LabelSequence.
struct Subgraph {
    int head = -1;
    std::vector<std::pair<int, int>> role_edges; // (role index, target index)
    int stop_index = -1;
};

/// Directed, edge-unlabeled graph over the labels of a linearization.
/// Node i is label i; co-referring pointer nodes share connectivity after
/// merging but are kept as distinct nodes, so node count always equals the
/// label count.
struct Spg {
    int n = 0;
    std::vector<std::string> node_labels;
    std::vector<std::pair<int, int>> edges;       // sorted by (u, v), unique
    std::map<int, std::vector<int>> pointer_groups; // pointer -> node indices

    bool has_edge(int u, int v) const;
    std::vector<std::vector<int>> out_neighbors() const;
};

/// Splits a sequence at each <stop>. Throws malformed_segment for a segment
/// without a head, a role without a target, or a missing terminator.
std::vector<Subgraph> to_subgraphs(const LabelSequence& seq);

/// Expands each labeled pair (head -r-> target) into unlabeled edges
/// head->r and r->target.
std::vector<std::pair<int, int>> role_expand(const Subgraph& sub);

/// Appends the segment's head -> <stop> edge.
void add_stop_nodes(const Subgraph& sub, std::vector<std::pair<int, int>>& edges);

/// Unions in- and out-edge sets across each pointer group; every member ends
/// with the union. Duplicate nodes are retained, not collapsed.
Spg merge_pointers(const Spg& spg);

/// Full transformation: segment, role-expand, add stop edges, then merge
/// pointer groups. Records the (identity) alignment into seq.
Spg transform(LabelSequence& seq);

std::string spg_to_json(const Spg& spg);
std::string spg_to_dot(const Spg& spg);

} // namespace amrpe
