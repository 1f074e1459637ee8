#include "amrpe/amr.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace amrpe {

using ordered_json = nlohmann::ordered_json;

int AmrGraph::node_index(std::string_view id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id) return static_cast<int>(i);
    return -1;
}

std::vector<std::vector<int>> AmrGraph::out_edge_indices() const {
    std::vector<std::vector<int>> out(nodes.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
        out[edges[e].source].push_back(static_cast<int>(e));
    return out;
}

std::vector<int> AmrGraph::in_degrees() const {
    std::vector<int> deg(nodes.size(), 0);
    for (const auto& e : edges) ++deg[e.target];
    return deg;
}

namespace {

// DFS edge classification from the root in stored edge order. Back edges
// (edges into a node on the current stack) close cycles; the remaining
// edges form a DAG whose reverse post-order is returned.
struct Traversal {
    std::vector<int> topo_order;       // nodes reachable from root, topological
    std::vector<char> is_back_edge;    // per edge index
    bool has_cycle = false;
};

Traversal classify_edges(const AmrGraph& g) {
    const int n = static_cast<int>(g.nodes.size());
    Traversal t;
    t.is_back_edge.assign(g.edges.size(), 0);
    std::vector<int> color(n, 0); // 0 white, 1 gray, 2 black
    auto out = g.out_edge_indices();

    // explicit stack: (node, next out-edge position)
    std::vector<std::pair<int, std::size_t>> stack;
    if (n == 0) return t;
    stack.emplace_back(g.root, 0);
    color[g.root] = 1;
    std::vector<int> post;
    while (!stack.empty()) {
        auto& [u, pos] = stack.back();
        if (pos < out[u].size()) {
            int e = out[u][pos++];
            int v = g.edges[e].target;
            if (color[v] == 0) {
                color[v] = 1;
                stack.emplace_back(v, 0);
            } else if (color[v] == 1) {
                t.is_back_edge[e] = 1;
                t.has_cycle = true;
            }
        } else {
            color[u] = 2;
            post.push_back(u);
            stack.pop_back();
        }
    }
    t.topo_order.assign(post.rbegin(), post.rend());
    return t;
}

} // namespace

void AmrGraph::validate(bool allow_cycles) const {
    if (nodes.empty()) fail(errc::invariant_violation, "graph has no nodes");
    if (root < 0 || root >= static_cast<int>(nodes.size()))
        fail(errc::invariant_violation, "root index out of range");
    std::unordered_set<std::string> seen_ids;
    for (const auto& node : nodes) {
        if (node.concept_label.empty())
            fail(errc::invariant_violation, "empty concept on node '" + node.id + "'");
        if (!seen_ids.insert(node.id).second)
            fail(errc::invariant_violation, "duplicate node id '" + node.id + "'");
    }
    const int n = static_cast<int>(nodes.size());
    std::vector<int> outdeg(n, 0), indeg(n, 0);
    for (const auto& e : edges) {
        if (e.source < 0 || e.source >= n || e.target < 0 || e.target >= n)
            fail(errc::invariant_violation, "edge endpoint out of range");
        if (e.role.empty() || e.role[0] != ':')
            fail(errc::invariant_violation, "role '" + e.role + "' must start with ':'");
        ++outdeg[e.source];
        ++indeg[e.target];
    }
    for (int i = 0; i < n; ++i)
        if (nodes[i].is_attribute && outdeg[i] > 0)
            fail(errc::invariant_violation,
                 "attribute node '" + nodes[i].id + "' has outgoing edges");
    auto t = classify_edges(*this);
    if (!allow_cycles) {
        if (t.has_cycle) fail(errc::cycle_detected, "graph has a directed cycle");
        if (indeg[root] > 0)
            fail(errc::invariant_violation, "root has an incoming edge");
    }
    if (static_cast<int>(t.topo_order.size()) != n)
        fail(errc::invariant_violation, "graph has nodes unreachable from the root");
}

// ---------------------------------------------------------------------------
// Penman parsing

namespace {

struct PenmanToken {
    enum class Kind { open, close, slash, atom, string, end } kind;
    std::string text;
    long line = 1;
};

class PenmanLexer {
public:
    explicit PenmanLexer(std::string_view s) : s_(s) {}

    PenmanToken next() {
        skip_ws();
        PenmanToken tok;
        tok.line = line_;
        if (i_ >= s_.size()) {
            tok.kind = PenmanToken::Kind::end;
            return tok;
        }
        char c = s_[i_];
        if (c == '(') { ++i_; tok.kind = PenmanToken::Kind::open; tok.text = "("; return tok; }
        if (c == ')') { ++i_; tok.kind = PenmanToken::Kind::close; tok.text = ")"; return tok; }
        if (c == '/') { ++i_; tok.kind = PenmanToken::Kind::slash; tok.text = "/"; return tok; }
        if (c == '"') {
            std::size_t start = i_++;
            while (i_ < s_.size()) {
                if (s_[i_] == '\\' && i_ + 1 < s_.size()) { i_ += 2; continue; }
                if (s_[i_] == '"') { ++i_; break; }
                if (s_[i_] == '\n') ++line_;
                ++i_;
            }
            if (i_ > s_.size() || s_[i_ - 1] != '"' || i_ - start < 2)
                fail(errc::malformed_penman, "unterminated string literal", line_);
            tok.kind = PenmanToken::Kind::string;
            tok.text = std::string(s_.substr(start, i_ - start));
            return tok;
        }
        std::size_t start = i_;
        while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) &&
               s_[i_] != '(' && s_[i_] != ')' && s_[i_] != '/' && s_[i_] != '"')
            ++i_;
        tok.kind = PenmanToken::Kind::atom;
        tok.text = std::string(s_.substr(start, i_ - start));
        return tok;
    }

private:
    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
            if (s_[i_] == '\n') ++line_;
            ++i_;
        }
    }

    std::string_view s_;
    std::size_t i_ = 0;
    long line_ = 1;
};

bool is_numeric_constant(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    bool digit = false, dot = false;
    for (; i < s.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(s[i]))) { digit = true; continue; }
        if (s[i] == '.' && !dot) { dot = true; continue; }
        return false;
    }
    return digit;
}

bool is_constant_atom(const std::string& s) {
    return s == "-" || s == "+" || is_numeric_constant(s);
}

class PenmanParser {
public:
    explicit PenmanParser(std::string_view text) : lexer_(text) { advance(); }

    AmrGraph parse(bool strict) {
        if (cur_.kind == PenmanToken::Kind::end)
            fail(errc::empty_input, "no Penman expression found");
        if (cur_.kind != PenmanToken::Kind::open)
            fail(errc::unbalanced_parens, "expected '(' to open the expression", cur_.line);
        int root = parse_node();
        if (cur_.kind != PenmanToken::Kind::end)
            fail(errc::unbalanced_parens, "trailing content after the expression", cur_.line);
        resolve_references();
        graph_.root = root;
        graph_.validate(/*allow_cycles=*/!strict);
        return std::move(graph_);
    }

private:
    void advance() { cur_ = lexer_.next(); }

    int parse_node() {
        long open_line = cur_.line;
        advance(); // consume '('
        if (cur_.kind != PenmanToken::Kind::atom)
            fail(errc::malformed_penman, "expected a variable after '('", cur_.line);
        std::string var = cur_.text;
        advance();
        if (cur_.kind != PenmanToken::Kind::slash)
            fail(errc::malformed_penman, "expected '/' after variable '" + var + "'", cur_.line);
        advance();
        if (cur_.kind != PenmanToken::Kind::atom && cur_.kind != PenmanToken::Kind::string)
            fail(errc::malformed_penman, "expected a concept after '/'", cur_.line);
        if (var_index_.count(var))
            fail(errc::duplicate_variable_definition, "variable '" + var + "'", cur_.line);
        int idx = add_node(var, cur_.text, /*attribute=*/false);
        var_index_[var] = idx;
        advance();

        while (true) {
            if (cur_.kind == PenmanToken::Kind::close) { advance(); return idx; }
            if (cur_.kind == PenmanToken::Kind::end)
                fail(errc::unbalanced_parens, "missing ')' for node opened here", open_line);
            if (cur_.kind != PenmanToken::Kind::atom || cur_.text.empty() || cur_.text[0] != ':')
                fail(errc::malformed_penman, "expected a role or ')' inside node '" + var + "'",
                     cur_.line);
            std::string role = cur_.text;
            if (role.size() < 2)
                fail(errc::malformed_penman, "bare ':' is not a role", cur_.line);
            advance();
            int edge_idx = static_cast<int>(graph_.edges.size());
            graph_.edges.push_back({idx, -1, role});
            parse_target(edge_idx, role);
        }
    }

    void parse_target(int edge_idx, const std::string& role) {
        switch (cur_.kind) {
        case PenmanToken::Kind::open:
            graph_.edges[edge_idx].target = parse_node();
            return;
        case PenmanToken::Kind::string:
            graph_.edges[edge_idx].target = add_attribute(cur_.text);
            advance();
            return;
        case PenmanToken::Kind::atom:
            if (is_constant_atom(cur_.text)) {
                graph_.edges[edge_idx].target = add_attribute(cur_.text);
            } else {
                pending_refs_.push_back({edge_idx, cur_.text, cur_.line});
            }
            advance();
            return;
        default:
            fail(errc::malformed_penman, "role '" + role + "' has no target", cur_.line);
        }
    }

    int add_node(std::string id, std::string concept_label, bool attribute) {
        graph_.nodes.push_back({std::move(id), std::move(concept_label), attribute});
        return static_cast<int>(graph_.nodes.size()) - 1;
    }

    int add_attribute(const std::string& literal) {
        return add_node("attr_" + std::to_string(attr_count_++), literal, true);
    }

    void resolve_references() {
        for (const auto& ref : pending_refs_) {
            auto it = var_index_.find(ref.var);
            if (it == var_index_.end())
                fail(errc::dangling_variable,
                     "variable '" + ref.var + "' referenced but never defined", ref.line);
            graph_.edges[ref.edge_idx].target = it->second;
        }
        // a user variable can shadow a synthesized attribute id; rename the
        // attribute until unique
        std::unordered_set<std::string> ids;
        for (const auto& node : graph_.nodes)
            if (!node.is_attribute) ids.insert(node.id);
        for (auto& node : graph_.nodes) {
            if (!node.is_attribute) continue;
            while (ids.count(node.id)) node.id += "_";
            ids.insert(node.id);
        }
    }

    struct PendingRef {
        int edge_idx;
        std::string var;
        long line;
    };

    PenmanLexer lexer_;
    PenmanToken cur_;
    AmrGraph graph_;
    std::unordered_map<std::string, int> var_index_;
    std::vector<PendingRef> pending_refs_;
    int attr_count_ = 0;
};

} // namespace

AmrGraph parse_penman(std::string_view text, bool strict) {
    return PenmanParser(text).parse(strict);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void serialize_node(const AmrGraph& g, int node, std::vector<char>& defined,
                    const std::vector<std::vector<int>>& out, std::string& sink) {
    const AmrNode& nd = g.nodes[node];
    if (nd.is_attribute || defined[node]) {
        sink += nd.is_attribute ? nd.concept_label : nd.id;
        return;
    }
    defined[node] = 1;
    sink += '(';
    sink += nd.id;
    sink += " / ";
    sink += nd.concept_label;
    for (int e : out[node]) {
        sink += ' ';
        sink += g.edges[e].role;
        sink += ' ';
        serialize_node(g, g.edges[e].target, defined, out, sink);
    }
    sink += ')';
}

} // namespace

std::string serialize_penman(const AmrGraph& g) {
    g.validate(/*allow_cycles=*/false);
    auto indeg = g.in_degrees();
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (g.nodes[i].is_attribute && indeg[i] > 1)
            fail(errc::invariant_violation, "re-entrant attribute node cannot be serialized");
    std::string out;
    std::vector<char> defined(g.nodes.size(), 0);
    serialize_node(g, g.root, defined, g.out_edge_indices(), out);
    return out;
}

// ---------------------------------------------------------------------------
// Corpus reading

namespace {

struct Block {
    std::string id;
    std::string sentence;
    std::string penman;
    long first_line = 0; // 1-based line of the first Penman line
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<CorpusEntry> read_corpus(std::istream& in, const CorpusReadOptions& opts) {
    std::vector<CorpusEntry> entries;
    Block block;
    long line_no = 0;
    int synth_counter = 0;

    auto flush_block = [&]() {
        if (block.penman.empty() && block.id.empty() && block.sentence.empty()) {
            block = {};
            return;
        }
        long at = block.first_line > 0 ? block.first_line : line_no;
        try {
            if (block.penman.empty())
                fail(errc::malformed_penman, "metadata block without a graph");
            CorpusEntry entry;
            entry.graph = parse_penman(block.penman, opts.strict);
            entry.raw_penman = block.penman;
            entry.sentence = block.sentence;
            entry.id = block.id.empty() ? "g" + std::to_string(synth_counter) : block.id;
            ++synth_counter;
            entries.push_back(std::move(entry));
        } catch (const Error& err) {
            if (opts.strict) throw Error(errc::parse_error_at, err.what(), at);
            ++synth_counter;
            if (opts.on_warning) opts.on_warning(at, err.what());
        }
        block = {};
    };

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) {
            flush_block();
            continue;
        }
        if (t[0] == '#') {
            if (t.rfind("# ::", 0) == 0) {
                std::string rest = t.substr(4);
                std::size_t sp = rest.find_first_of(" \t");
                std::string key = sp == std::string::npos ? rest : rest.substr(0, sp);
                std::string value = sp == std::string::npos ? "" : trim(rest.substr(sp + 1));
                if (key == "id" && block.id.empty()) block.id = value;
                if (key == "snt" && block.sentence.empty()) block.sentence = value;
            }
            continue;
        }
        if (block.penman.empty()) block.first_line = line_no;
        if (!block.penman.empty()) block.penman += '\n';
        block.penman += line;
    }
    if (in.bad()) fail(errc::io_error, "stream read failure", line_no);
    flush_block();
    return entries;
}

// ---------------------------------------------------------------------------
// Stats and exports

GraphStats graph_stats(const AmrGraph& g) {
    GraphStats stats;
    stats.node_count = static_cast<int>(g.nodes.size());
    stats.edge_count = static_cast<int>(g.edges.size());
    for (int d : g.in_degrees())
        if (d > 1) ++stats.reentrancy_count;

    auto t = classify_edges(g);
    std::vector<int> depth(g.nodes.size(), 0);
    auto out = g.out_edge_indices();
    for (int u : t.topo_order) {
        for (int e : out[u]) {
            if (t.is_back_edge[e]) continue;
            int v = g.edges[e].target;
            depth[v] = std::max(depth[v], depth[u] + 1);
        }
    }
    for (int u : t.topo_order) stats.depth = std::max(stats.depth, depth[u]);
    return stats;
}

std::string graph_to_json(const AmrGraph& g) {
    ordered_json j;
    j["root"] = g.nodes[g.root].id;
    j["nodes"] = ordered_json::array();
    for (const auto& node : g.nodes) {
        ordered_json n;
        n["id"] = node.id;
        n["concept"] = node.concept_label;
        n["attribute"] = node.is_attribute;
        j["nodes"].push_back(std::move(n));
    }
    j["edges"] = ordered_json::array();
    for (const auto& edge : g.edges) {
        ordered_json e;
        e["source"] = g.nodes[edge.source].id;
        e["role"] = edge.role;
        e["target"] = g.nodes[edge.target].id;
        j["edges"].push_back(std::move(e));
    }
    return j.dump();
}

std::string canonical_signature(const AmrGraph& g) {
    // rename nodes by DFS discovery order from the root (stored edge order),
    // then compare sorted node/edge lists
    std::vector<int> canon(g.nodes.size(), -1);
    int next = 0;
    auto out = g.out_edge_indices();
    std::vector<std::pair<int, std::size_t>> stack;
    canon[g.root] = next++;
    stack.emplace_back(g.root, 0);
    while (!stack.empty()) {
        auto& [u, pos] = stack.back();
        if (pos < out[u].size()) {
            int v = g.edges[out[u][pos++]].target;
            if (canon[v] == -1) {
                canon[v] = next++;
                stack.emplace_back(v, 0);
            }
        } else {
            stack.pop_back();
        }
    }

    std::vector<std::string> node_keys;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        node_keys.push_back("n" + std::to_string(canon[i]) + "=" + g.nodes[i].concept_label +
                            (g.nodes[i].is_attribute ? "#a" : ""));
    std::sort(node_keys.begin(), node_keys.end());
    std::vector<std::string> edge_keys;
    for (const auto& e : g.edges)
        edge_keys.push_back("n" + std::to_string(canon[e.source]) + e.role + ">n" +
                            std::to_string(canon[e.target]));
    std::sort(edge_keys.begin(), edge_keys.end());

    std::string sig = "root=n" + std::to_string(canon[g.root]) + ";";
    for (const auto& k : node_keys) { sig += k; sig += ';'; }
    sig += '|';
    for (const auto& k : edge_keys) { sig += k; sig += ';'; }
    return sig;
}

} // namespace amrpe
