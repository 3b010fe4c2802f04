#include <doctest.h>

#include <algorithm>
#include <functional>

#include "phikit/enumerate.hpp"
#include "phikit/graph.hpp"
#include "phikit/rng.hpp"

using namespace phikit;

namespace {

// vertex-count tree-depth by plain recursion: split into components, else try every root
int vertex_td(const SimpleGraph& g, std::uint64_t set) {
    if (!set) return 0;
    std::uint64_t comp = set & -set, frontier = comp;
    while (frontier) {
        int v = __builtin_ctzll(frontier);
        frontier &= frontier - 1;
        std::uint64_t nb = g.adj[v] & set & ~comp;
        comp |= nb;
        frontier |= nb;
    }
    if (comp != set) return std::max(vertex_td(g, comp), vertex_td(g, set & ~comp));
    int best = 1 << 20;
    for (std::uint64_t r = set; r; r &= r - 1) best = std::min(best, 1 + vertex_td(g, set & ~(r & -r)));
    return best;
}

int edge_td(const SimpleGraph& g) {
    int d = vertex_td(g, g.n == 64 ? ~0ULL : (1ULL << g.n) - 1);
    return std::max(d - 1, 0);
}

VertexSet vs_of(std::initializer_list<Vertex> v) { return make_vertex_set(std::vector<Vertex>(v)); }

}  // namespace

TEST_CASE("generators have the expected sizes") {
    PatternGraph p3 = build_path(3);
    CHECK(p3.num_edges() == 3);
    CHECK(p3.num_vertices() == 4);
    PatternGraph t2 = build_complete_binary_tree(2);
    CHECK(t2.num_edges() == 6);
    CHECK(t2.num_vertices() == 7);
    for (int k = 1; k <= 6; ++k) {
        PatternGraph t = build_complete_binary_tree(k);
        CHECK(t.num_vertices() == (std::size_t{1} << (k + 1)) - 1);
        CHECK(t.num_edges() == (std::size_t{1} << (k + 1)) - 2);
    }
}

TEST_CASE("level sizes of T_x") {
    for (int k = 1; k <= 6; ++k)
        for (std::int64_t i : {std::int64_t{0}, std::int64_t{3}}) {
            PatternGraph t = subtree_at(tv(k, i));
            for (int j = 0; j <= k; ++j) {
                std::int64_t cnt = std::count_if(t.vertices().begin(), t.vertices().end(),
                                                 [&](Vertex v) { return tlevel(v) == j; });
                CHECK(cnt == (std::int64_t{1} << (k - j)));
            }
        }
}

TEST_CASE("restrict_away") {
    PatternGraph f = graph_union(build_path_range(0, 2), build_path_range(4, 6));
    CHECK(restrict_away(f, {}) == f);
    CHECK(restrict_away(f, f.vertices()).empty());
    // S touches the second path only
    CHECK(restrict_away(f, vs_of({6})) == build_path_range(0, 2));
    CHECK(restrict_away(f, vs_of({3})) == f);
}

TEST_CASE("restrict_away is idempotent") {
    PatternGraph t3 = build_complete_binary_tree(3);
    Rng rng(7);
    for (int it = 0; it < 300; ++it) {
        PatternGraph f = sample_uniform_subgraph(t3, rng);
        std::vector<Vertex> s;
        for (Vertex v : t3.vertices())
            if (rng.bernoulli(0.15)) s.push_back(v);
        VertexSet sv = make_vertex_set(s);
        PatternGraph once = restrict_away(f, sv);
        CHECK(restrict_away(once, sv) == once);
        CHECK(is_subgraph(once, f));
        CHECK_FALSE(vs_intersects(once.vertices(), sv));
    }
}

TEST_CASE("components of F|S on P_inf") {
    PatternGraph f = graph_union(graph_union(build_path_range(0, 4), build_path_range(6, 8)),
                                 graph_union(build_path_range(9, 14), build_path_range(17, 21)));
    auto comps = decompose_components(f, vs_of({0, 6, 8, 21}));
    REQUIRE(comps.size() == 4);
    CHECK(comps[0].str() == "(0,4]");
    CHECK(comps[1].str() == "(6,8)");
    CHECK(comps[2].str() == "[9,14]");
    CHECK(comps[3].str() == "[17,21)");
    CHECK(comps[1].kind == CompKind::Open);
    CHECK(comps[2].kind == CompKind::Closed);
    CHECK(comps[0].half_open());

    auto whole = decompose_components(build_path(5), {});
    REQUIRE(whole.size() == 1);
    CHECK(whole[0].kind == CompKind::Closed);
    CHECK(whole[0].i == 0);
    CHECK(whole[0].j == 5);
}

TEST_CASE("boundary of T_x without its leaf level") {
    for (int k = 2; k <= 6; ++k) {
        PatternGraph t = subtree_at(tv(k, 0));
        std::vector<Edge> keep;
        for (const Edge& e : t.edges())
            if (tlevel(e.u) > 0) keep.push_back(e);
        PatternGraph f(Ambient::TInf, keep);
        CHECK(boundary_size(f) == (1 << (k - 1)) + 1);
        CHECK(max_complete_height(f) == 0);
    }
    // T_x^+ : complete height k, one boundary vertex at the top
    for (int k = 1; k <= 5; ++k) {
        PatternGraph tp = subtree_plus(tv(k, 1));
        CHECK(max_complete_height(tp) == k);
        CHECK(boundary_size(tp) == 1);
    }
}

TEST_CASE("tree-depth against plain recursion") {
    CHECK(tree_depth(PatternGraph(Ambient::PInf)) == 0);
    CHECK(tree_depth(build_path(1)) == 1);
    for (int k = 1; k <= 3; ++k) CHECK(tree_depth(build_complete_binary_tree(k)) == k);
    const int expected_paths[] = {1, 1, 2, 2, 2, 2, 3, 3};
    for (int k = 1; k <= 8; ++k) {
        SimpleGraph g = SimpleGraph::from_pattern(build_path(k));
        CHECK(edge_td(g) == expected_paths[k - 1]);
        CHECK(tree_depth(g) == expected_paths[k - 1]);
    }
    Rng rng(11);
    for (int it = 0; it < 200; ++it) {
        SimpleGraph g;
        g.n = 1 + static_cast<int>(rng.below(8));
        g.adj.assign(g.n, 0);
        for (int a = 0; a < g.n; ++a)
            for (int b = a + 1; b < g.n; ++b)
                if (rng.bernoulli(0.35)) g.add_edge(a, b);
        CHECK(tree_depth(g) == edge_td(g));
    }
}

TEST_CASE("subgraph enumeration") {
    PatternGraph t2 = build_complete_binary_tree(2);
    CHECK(for_each_subgraph(t2, kAny, [](const PatternGraph&) { return true; }) == 64);

    PatternGraph t3 = build_complete_binary_tree(3);
    std::uint64_t bad = 0;
    std::uint64_t n = for_each_subgraph(t3, kConnected | kUngrounded | kNonEmpty, [&](const PatternGraph& f) {
        for (Vertex v : f.vertices()) bad += tlevel(v) == 0;
        return true;
    });
    CHECK(n > 0);
    CHECK(bad == 0);

    // connected enumeration agrees with filtering all subsets
    std::uint64_t filtered = for_each_subgraph(t3, kConnected | kNonEmpty, [](const PatternGraph&) { return true; });
    std::uint64_t direct = 0;
    for_each_connected_subgraph(t3, [&](const PatternGraph& f) {
        direct += is_connected(f) && f.num_edges() > 0;
        return true;
    });
    CHECK(direct == filtered);
}

TEST_CASE("boundary is large for ungrounded graphs") {
    // 2·∂(F) >= |E(F)| + 3 when every component is ungrounded
    PatternGraph t3 = build_complete_binary_tree(3);
    std::uint64_t checked = 0;
    for_each_subgraph(t3, kNonEmpty, [&](const PatternGraph& f) {
        for (const PatternGraph& c : components(f))
            if (!is_ungrounded(c)) return true;
        ++checked;
        CHECK(2 * boundary_size(f) >= static_cast<int>(f.num_edges()) + 3);
        return true;
    });
    CHECK(checked > 0);
}
