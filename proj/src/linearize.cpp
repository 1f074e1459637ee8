#include "amrpe/linearize.hpp"

#include <cctype>
#include <deque>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace amrpe {

using ordered_json = nlohmann::ordered_json;

const char* label_kind_name(LabelKind kind) {
    switch (kind) {
    case LabelKind::ConceptWithPointer: return "concept";
    case LabelKind::Role: return "role";
    case LabelKind::PointerRef: return "pointer_ref";
    case LabelKind::Stop: return "stop";
    }
    return "?";
}

namespace {

std::string pointer_token(int p) { return "<P" + std::to_string(p) + ">"; }

Label concept_label(int pointer, const std::string& concept_text) {
    return {LabelKind::ConceptWithPointer, pointer_token(pointer) + " " + concept_text, pointer};
}

Label pointer_ref_label(int pointer) {
    return {LabelKind::PointerRef, pointer_token(pointer), pointer};
}

} // namespace

LabelSequence bfs_linearize(const AmrGraph& g, std::string graph_id) {
    g.validate(/*allow_cycles=*/true);
    auto out = g.out_edge_indices();

    LabelSequence seq;
    seq.source_graph_id = std::move(graph_id);
    std::vector<int> pointer_of(g.nodes.size(), -1);
    std::vector<char> mentioned(g.nodes.size(), 0);
    int next_pointer = 0;
    std::deque<int> queue;

    pointer_of[g.root] = next_pointer++;
    queue.push_back(g.root);

    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (out[u].empty() && u != g.root) continue; // leaves get no segment

        if (!mentioned[u]) {
            // only the root expands before being mentioned as a target
            seq.labels.push_back(concept_label(pointer_of[u], g.nodes[u].concept_label));
            mentioned[u] = 1;
        } else {
            seq.labels.push_back(pointer_ref_label(pointer_of[u]));
        }
        for (int e : out[u]) {
            const AmrEdge& edge = g.edges[e];
            seq.labels.push_back({LabelKind::Role, edge.role, -1});
            int v = edge.target;
            if (!mentioned[v]) {
                pointer_of[v] = next_pointer++;
                mentioned[v] = 1;
                seq.labels.push_back(concept_label(pointer_of[v], g.nodes[v].concept_label));
                queue.push_back(v);
            } else {
                seq.labels.push_back(pointer_ref_label(pointer_of[v]));
            }
        }
        seq.labels.push_back({LabelKind::Stop, "<stop>", -1});
    }

    seq.alignment.resize(seq.labels.size());
    for (int i = 0; i < seq.size(); ++i) seq.alignment[i] = i;
    return seq;
}

std::string render_labels(const LabelSequence& seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.labels.size(); ++i) {
        if (i) out += ' ';
        out += seq.labels[i].text;
    }
    return out;
}

namespace {

// whitespace tokens, except quoted spans stay inside one token
std::vector<std::string> split_label_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
            if (text[i] == '"') {
                ++i;
                while (i < text.size() && text[i] != '"') {
                    if (text[i] == '\\' && i + 1 < text.size()) ++i;
                    ++i;
                }
                if (i < text.size()) ++i; // closing quote
            } else {
                ++i;
            }
        }
        tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

bool parse_pointer_token(const std::string& tok, int* value) {
    if (tok.size() < 4 || tok.compare(0, 2, "<P") != 0 || tok.back() != '>') return false;
    for (std::size_t i = 2; i + 1 < tok.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
    *value = std::stoi(tok.substr(2, tok.size() - 3));
    return true;
}

} // namespace

LabelSequence parse_labels(std::string_view text) {
    auto tokens = split_label_tokens(text);
    LabelSequence seq;
    std::unordered_map<int, bool> pointer_defined;

    std::size_t i = 0;
    while (i < tokens.size()) {
        const std::string& tok = tokens[i];
        int ptr = -1;
        if (tok == "<stop>") {
            seq.labels.push_back({LabelKind::Stop, tok, -1});
            ++i;
        } else if (!tok.empty() && tok[0] == ':') {
            if (tok.size() < 2) fail(errc::unknown_label_shape, "bare ':' token");
            seq.labels.push_back({LabelKind::Role, tok, -1});
            ++i;
        } else if (parse_pointer_token(tok, &ptr)) {
            bool concept_follows = false;
            if (i + 1 < tokens.size()) {
                const std::string& nxt = tokens[i + 1];
                int dummy;
                concept_follows =
                    nxt != "<stop>" && !(nxt[0] == ':') && !parse_pointer_token(nxt, &dummy);
            }
            if (concept_follows) {
                if (pointer_defined[ptr])
                    fail(errc::pointer_redefinition, "pointer " + tok + " defined twice");
                pointer_defined[ptr] = true;
                seq.labels.push_back({LabelKind::ConceptWithPointer, tok + " " + tokens[i + 1], ptr});
                i += 2;
            } else {
                seq.labels.push_back({LabelKind::PointerRef, tok, ptr});
                ++i;
            }
        } else {
            fail(errc::unknown_label_shape, "unexpected token '" + tok + "'");
        }
    }
    return seq;
}

std::string labels_to_json(const LabelSequence& seq) {
    ordered_json j;
    j["labels"] = ordered_json::array();
    for (const auto& label : seq.labels) {
        ordered_json l;
        l["text"] = label.text;
        l["kind"] = label_kind_name(label.kind);
        if (label.pointer >= 0)
            l["pointer"] = label.pointer;
        else
            l["pointer"] = nullptr;
        j["labels"].push_back(std::move(l));
    }
    j["alignment"] = seq.alignment;
    return j.dump();
}

} // namespace amrpe
