#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "amrpe/errors.hpp"

namespace amrpe {

/// A concept node of an AMR graph. Attribute constants (quoted strings,
/// numbers, "-", "+") are stored as leaf nodes with synthesized ids
/// ("attr_0", ...) so the rest of the pipeline treats them uniformly.
struct AmrNode {
    std::string id;            // variable name or synthesized attribute id
    std::string concept_label; // e.g. "want-01", or the constant literal
    bool is_attribute = false;
};

struct AmrEdge {
    int source = -1; // index into AmrGraph::nodes
    int target = -1;
    std::string role; // ":ARG0", ":mod", ...
};

/// Rooted, directed, edge-labeled semantic graph. Edges keep the order in
/// which they appeared in the source text; re-entrancy is multiple edges
/// targeting one node.
struct AmrGraph {
    std::vector<AmrNode> nodes;
    std::vector<AmrEdge> edges;
    int root = 0;

    int node_index(std::string_view id) const;
    std::vector<std::vector<int>> out_edge_indices() const; // per source node
    std::vector<int> in_degrees() const;

    /// Checks structural invariants; throws Error(invariant_violation) or
    /// Error(cycle_detected). Lenient-parsed graphs may carry cycles, which
    /// validate(true) tolerates.
    void validate(bool allow_cycles = false) const;
};

struct GraphStats {
    int depth = 0;
    int node_count = 0;
    int edge_count = 0;
    int reentrancy_count = 0;
};

struct CorpusEntry {
    std::string id;
    std::string sentence;
    AmrGraph graph;
    std::string raw_penman;
};

/// Parses a single Penman expression (metadata lines already stripped).
/// strict rejects cyclic graphs with cycle_detected; lenient keeps the
/// back edges (they are excluded from depth computation).
AmrGraph parse_penman(std::string_view text, bool strict = true);

/// Deterministic single-line Penman text. parse_penman(serialize_penman(g))
/// is isomorphic to g and a second serialization is a fixed point.
std::string serialize_penman(const AmrGraph& g);

struct CorpusReadOptions {
    bool strict = false;
    /// Called for each malformed block in lenient mode (1-based line).
    std::function<void(long line, const std::string& message)> on_warning;
};

/// Reads a corpus of blank-line-separated blocks with "# ::" metadata.
/// Entries without "# ::id" get synthesized ids "g0", "g1", ...
std::vector<CorpusEntry> read_corpus(std::istream& in, const CorpusReadOptions& opts = {});

/// depth = edges on the longest root-to-node directed path (back edges of a
/// lenient cyclic graph excluded); reentrancy_count = nodes with in-degree > 1.
GraphStats graph_stats(const AmrGraph& g);

/// {"root", "nodes", "edges"} with stable key order.
std::string graph_to_json(const AmrGraph& g);

/// Canonical structural key: variables renamed by DFS discovery order, node
/// and edge lists sorted. Equal keys == isomorphic graphs for round-trip use.
std::string canonical_signature(const AmrGraph& g);

} // namespace amrpe
