#include "amrpe/spg.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

namespace amrpe {

using ordered_json = nlohmann::ordered_json;

bool Spg::has_edge(int u, int v) const {
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

std::vector<std::vector<int>> Spg::out_neighbors() const {
    std::vector<std::vector<int>> out(n);
    for (auto [u, v] : edges) out[u].push_back(v);
    return out;
}

std::vector<Subgraph> to_subgraphs(const LabelSequence& seq) {
    if (seq.labels.empty()) fail(errc::malformed_segment, "empty label sequence");
    std::vector<Subgraph> subs;
    const auto& labels = seq.labels;
    std::size_t i = 0;
    while (i < labels.size()) {
        Subgraph sub;
        if (labels[i].kind != LabelKind::ConceptWithPointer &&
            labels[i].kind != LabelKind::PointerRef)
            fail(errc::malformed_segment,
                 "segment at label " + std::to_string(i) + " has no head");
        sub.head = static_cast<int>(i++);
        while (i < labels.size() && labels[i].kind != LabelKind::Stop) {
            if (labels[i].kind != LabelKind::Role)
                fail(errc::malformed_segment,
                     "expected a role at label " + std::to_string(i));
            int role_idx = static_cast<int>(i++);
            if (i >= labels.size() || (labels[i].kind != LabelKind::ConceptWithPointer &&
                                       labels[i].kind != LabelKind::PointerRef))
                fail(errc::malformed_segment,
                     "role '" + labels[role_idx].text + "' has no target");
            sub.role_edges.emplace_back(role_idx, static_cast<int>(i++));
        }
        if (i >= labels.size())
            fail(errc::malformed_segment, "segment is missing its <stop> terminator");
        sub.stop_index = static_cast<int>(i++);
        subs.push_back(std::move(sub));
    }
    return subs;
}

std::vector<std::pair<int, int>> role_expand(const Subgraph& sub) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(sub.role_edges.size() * 2);
    for (auto [role, target] : sub.role_edges) {
        edges.emplace_back(sub.head, role);
        edges.emplace_back(role, target);
    }
    return edges;
}

void add_stop_nodes(const Subgraph& sub, std::vector<std::pair<int, int>>& edges) {
    edges.emplace_back(sub.head, sub.stop_index);
}

Spg merge_pointers(const Spg& spg) {
    std::vector<std::set<int>> in(spg.n), out(spg.n);
    for (auto [u, v] : spg.edges) {
        out[u].insert(v);
        in[v].insert(u);
    }

    std::set<std::pair<int, int>> merged(spg.edges.begin(), spg.edges.end());
    for (const auto& [pointer, members] : spg.pointer_groups) {
        if (members.size() < 2) continue;
        // unions over the pre-merge connectivity; groups are disjoint and
        // only ever linked through role/stop nodes, so order is irrelevant
        std::set<int> in_union, out_union;
        for (int m : members) {
            in_union.insert(in[m].begin(), in[m].end());
            out_union.insert(out[m].begin(), out[m].end());
        }
        for (int m : members) {
            for (int v : in_union) merged.emplace(v, m);
            for (int w : out_union) merged.emplace(m, w);
        }
    }

    Spg result = spg;
    result.edges.assign(merged.begin(), merged.end());
    return result;
}

Spg transform(LabelSequence& seq) {
    auto subs = to_subgraphs(seq);

    Spg spg;
    spg.n = seq.size();
    spg.node_labels.reserve(seq.labels.size());
    for (const auto& label : seq.labels) spg.node_labels.push_back(label.text);

    for (int i = 0; i < seq.size(); ++i) {
        const Label& label = seq.labels[i];
        if (label.pointer >= 0) spg.pointer_groups[label.pointer].push_back(i);
    }
    for (const auto& label : seq.labels) {
        if (label.kind != LabelKind::PointerRef) continue;
        const auto& group = spg.pointer_groups[label.pointer];
        bool defined = false;
        for (int m : group)
            if (seq.labels[m].kind == LabelKind::ConceptWithPointer) defined = true;
        if (!defined)
            fail(errc::dangling_pointer,
                 "pointer <P" + std::to_string(label.pointer) + "> is never defined");
    }

    std::set<std::pair<int, int>> all;
    for (const auto& sub : subs) {
        auto edges = role_expand(sub);
        add_stop_nodes(sub, edges);
        all.insert(edges.begin(), edges.end());
    }
    spg.edges.assign(all.begin(), all.end());

    Spg merged = merge_pointers(spg);
    seq.alignment.resize(seq.labels.size());
    for (int i = 0; i < seq.size(); ++i) seq.alignment[i] = i;
    return merged;
}

std::string spg_to_json(const Spg& spg) {
    ordered_json j;
    j["n"] = spg.n;
    j["labels"] = spg.node_labels;
    j["edges"] = ordered_json::array();
    for (auto [u, v] : spg.edges) j["edges"].push_back(ordered_json::array({u, v}));
    ordered_json groups = ordered_json::object();
    for (const auto& [pointer, members] : spg.pointer_groups)
        groups[std::to_string(pointer)] = members;
    j["pointer_groups"] = std::move(groups);
    return j.dump();
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string spg_to_dot(const Spg& spg) {
    std::string out = "digraph spg {\n";
    for (int i = 0; i < spg.n; ++i)
        out += "  n" + std::to_string(i) + " [label=\"" + std::to_string(i) + ": " +
               dot_escape(spg.node_labels[i]) + "\"];\n";
    for (auto [u, v] : spg.edges)
        out += "  n" + std::to_string(u) + " -> n" + std::to_string(v) + ";\n";
    out += "}\n";
    return out;
}

} // namespace amrpe
