#include <doctest.h>

#include <set>

#include "amrpe/spg.hpp"
#include "support/synth.hpp"

using namespace amrpe;

namespace {

const char* kFig2b =
    "(w / want-01 :ARG0 (c / child) :ARG1 (b / believe-01 :ARG0 (p / parent) :ARG1 c))";

// the worked example's merged edge set
const std::set<std::pair<int, int>> kMergedEdges = {
    {0, 1}, {0, 3}, {0, 5}, {1, 2},  {1, 10}, {3, 4},  {3, 6},  {4, 7},
    {4, 9}, {4, 11}, {6, 7}, {6, 9}, {6, 11}, {7, 8},  {9, 2},  {9, 10},
};

LabelSequence fig2c_sequence() { return bfs_linearize(parse_penman(kFig2b)); }

std::set<std::pair<int, int>> edge_set(const Spg& spg) {
    return {spg.edges.begin(), spg.edges.end()};
}

} // namespace

TEST_SUITE("spg") {

TEST_CASE("segmentation at stop labels") {
    LabelSequence seq = fig2c_sequence();
    auto subs = to_subgraphs(seq);
    REQUIRE(subs.size() == 2);
    CHECK(subs[0].head == 0);
    CHECK(subs[0].role_edges == std::vector<std::pair<int, int>>{{1, 2}, {3, 4}});
    CHECK(subs[0].stop_index == 5);
    CHECK(subs[1].head == 6);
    CHECK(subs[1].role_edges == std::vector<std::pair<int, int>>{{7, 8}, {9, 10}});
    CHECK(subs[1].stop_index == 11);

    auto tiny = to_subgraphs(parse_labels("<P0> alpha <stop>"));
    REQUIRE(tiny.size() == 1);
    CHECK(tiny[0].head == 0);
    CHECK(tiny[0].role_edges.empty());
    CHECK(tiny[0].stop_index == 1);
}

TEST_CASE("malformed segments") {
    auto expect_malformed = [](const char* text) {
        try {
            LabelSequence seq = parse_labels(text);
            to_subgraphs(seq);
            FAIL("expected MalformedSegment for: " << text);
        } catch (const Error& err) {
            CHECK(err.code() == errc::malformed_segment);
        }
    };
    expect_malformed(":ARG0 <P1> x <stop>");       // no head
    expect_malformed("<P0> x :ARG0 <stop>");       // role without target
    expect_malformed("<P0> x :ARG0 <P1> y");       // missing terminator
    expect_malformed("<P0> x <stop> <stop>");      // empty segment
    expect_malformed("");                          // no labels at all
}

TEST_CASE("role expansion doubles each labeled edge") {
    LabelSequence seq = fig2c_sequence();
    auto subs = to_subgraphs(seq);
    auto edges = role_expand(subs[0]);
    CHECK(edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 3}, {3, 4}});

    Subgraph bare{0, {}, 1};
    CHECK(role_expand(bare).empty());
    Subgraph one{0, {{1, 2}}, 3};
    CHECK(role_expand(one).size() == 2);
}

TEST_CASE("stop edges attach to the segment head") {
    LabelSequence seq = fig2c_sequence();
    auto subs = to_subgraphs(seq);
    auto edges = role_expand(subs[0]);
    add_stop_nodes(subs[0], edges);
    CHECK(edges.back() == std::pair<int, int>{0, 5});

    std::vector<std::pair<int, int>> minimal;
    Subgraph tiny{0, {}, 1};
    add_stop_nodes(tiny, minimal);
    CHECK(minimal == std::vector<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("worked example transform") {
    LabelSequence seq = fig2c_sequence();
    Spg spg = transform(seq);
    CHECK(spg.n == 12);
    CHECK(spg.edges.size() == 16);
    CHECK(edge_set(spg) == kMergedEdges);
    REQUIRE(spg.pointer_groups.count(1));
    REQUIRE(spg.pointer_groups.count(2));
    CHECK(spg.pointer_groups.at(1) == std::vector<int>{2, 10});
    CHECK(spg.pointer_groups.at(2) == std::vector<int>{4, 6});
    CHECK(seq.alignment.size() == 12);
}

TEST_CASE("merge is the identity without re-entrancy") {
    LabelSequence seq = bfs_linearize(parse_penman("(a / alpha :ARG0 (b / beta))"));
    Spg spg = transform(seq);
    CHECK(spg.n == 4);
    CHECK(edge_set(spg) == std::set<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 3}});
    Spg merged = merge_pointers(spg);
    CHECK(merged.edges == spg.edges);
}

TEST_CASE("merged members union their connectivity") {
    Spg spg;
    spg.n = 4;
    spg.node_labels = {"a", "b", "u1", "u2"};
    spg.edges = {{0, 2}, {1, 3}}; // u1 gets in {a}, u2 gets in {b}
    spg.pointer_groups[0] = {2, 3};
    Spg merged = merge_pointers(spg);
    CHECK(edge_set(merged) ==
          std::set<std::pair<int, int>>{{0, 2}, {0, 3}, {1, 2}, {1, 3}});
}

TEST_CASE("minimal transform") {
    LabelSequence seq = parse_labels("<P0> alpha <stop>");
    Spg spg = transform(seq);
    CHECK(spg.n == 2);
    CHECK(spg.edges == std::vector<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("dangling pointer reference") {
    LabelSequence seq = parse_labels("<P0> alpha :ARG0 <P5> <stop>");
    try {
        transform(seq);
        FAIL("expected DanglingPointer");
    } catch (const Error& err) {
        CHECK(err.code() == errc::dangling_pointer);
    }
}

TEST_CASE("structural invariants on random graphs") {
    SplitMix64 rng(23);
    for (int i = 0; i < 40; ++i) {
        AmrGraph g = synth::random_amr(rng, 2, 20);
        LabelSequence seq = bfs_linearize(g);
        auto subs = to_subgraphs(seq);

        // pre-merge role nodes have in-degree 1 and out-degree 1
        std::set<std::pair<int, int>> pre;
        for (const auto& sub : subs) {
            auto edges = role_expand(sub);
            add_stop_nodes(sub, edges);
            pre.insert(edges.begin(), edges.end());
        }
        std::vector<int> indeg(seq.size(), 0), outdeg(seq.size(), 0);
        for (auto [u, v] : pre) {
            ++outdeg[u];
            ++indeg[v];
        }
        for (int idx = 0; idx < seq.size(); ++idx) {
            if (seq.labels[idx].kind == LabelKind::Role) {
                CHECK(indeg[idx] == 1);
                CHECK(outdeg[idx] == 1);
            }
        }

        Spg spg = transform(seq);
        CHECK(spg.n == seq.size());

        // stop nodes keep out-degree 0; members of a group share in/out sets
        std::vector<std::set<int>> in(spg.n), out(spg.n);
        for (auto [u, v] : spg.edges) {
            out[u].insert(v);
            in[v].insert(u);
        }
        for (int idx = 0; idx < seq.size(); ++idx)
            if (seq.labels[idx].kind == LabelKind::Stop) CHECK(out[idx].empty());
        for (const auto& [pointer, members] : spg.pointer_groups) {
            for (std::size_t m = 1; m < members.size(); ++m) {
                CHECK(in[members[m]] == in[members[0]]);
                CHECK(out[members[m]] == out[members[0]]);
            }
        }

        // post-merge role degrees equal the sizes of their endpoint groups
        auto group_size = [&](int idx) -> std::size_t {
            int pointer = seq.labels[idx].pointer;
            return pointer >= 0 ? spg.pointer_groups.at(pointer).size() : 1;
        };
        for (const auto& sub : subs) {
            for (auto [role_idx, target_idx] : sub.role_edges) {
                CHECK(in[role_idx].size() == group_size(sub.head));
                CHECK(out[role_idx].size() == group_size(target_idx));
            }
        }

        // swapping any two co-referring nodes is a graph automorphism
        for (const auto& [pointer, members] : spg.pointer_groups) {
            if (members.size() < 2) continue;
            std::vector<int> perm(spg.n);
            for (int v = 0; v < spg.n; ++v) perm[v] = v;
            std::swap(perm[members[0]], perm[members[1]]);
            std::set<std::pair<int, int>> mapped;
            for (auto [u, v] : spg.edges) mapped.emplace(perm[u], perm[v]);
            CHECK(mapped == edge_set(spg));
        }

        // determinism
        LabelSequence seq2 = bfs_linearize(g);
        Spg spg2 = transform(seq2);
        CHECK(spg2.edges == spg.edges);
        CHECK(spg2.node_labels == spg.node_labels);
    }
}

TEST_CASE("exports") {
    LabelSequence seq = fig2c_sequence();
    Spg spg = transform(seq);
    std::string json = spg_to_json(spg);
    CHECK(json.find("\"n\":12") != std::string::npos);
    CHECK(json.find("\"pointer_groups\"") != std::string::npos);
    std::string dot = spg_to_dot(spg);
    CHECK(dot.rfind("digraph spg {", 0) == 0);
    CHECK(dot.find("n0 -> n1;") != std::string::npos);
    CHECK(dot.find("<P0> want-01") != std::string::npos);
}

} // TEST_SUITE
