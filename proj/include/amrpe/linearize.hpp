#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "amrpe/amr.hpp"

namespace amrpe {

enum class LabelKind {
    ConceptWithPointer, // "<P0> want-01" (pointer + concept, one label)
    Role,               // ":ARG0"
    PointerRef,         // "<P2>"
    Stop,               // "<stop>"
};

const char* label_kind_name(LabelKind kind);

struct Label {
    LabelKind kind;
    std::string text;
    int pointer = -1; // ConceptWithPointer / PointerRef only
};

struct LabelSequence {
    std::vector<Label> labels;
    /// label index -> SPG node index; filled by spg::transform (identity).
    std::vector<int> alignment;
    std::string source_graph_id;

    int size() const { return static_cast<int>(labels.size()); }
};

/// Breadth-first linearization with <Pn> pointer tokens. Pointers are
/// assigned in first-discovery order. Every node with outgoing edges emits
/// one segment terminated by <stop>; the root always emits a segment, other
/// leaves never do.
LabelSequence bfs_linearize(const AmrGraph& g, std::string graph_id = {});

/// Space-joined label texts, bit-exact stable.
std::string render_labels(const LabelSequence& seq);

/// Inverse of render_labels up to alignment (left empty). Quoted constants
/// may contain spaces and are kept as one token.
LabelSequence parse_labels(std::string_view text);

/// Sidecar JSON: per-label text/kind/pointer plus the alignment.
std::string labels_to_json(const LabelSequence& seq);

} // namespace amrpe
