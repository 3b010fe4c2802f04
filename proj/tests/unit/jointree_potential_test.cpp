#include <doctest.h>

#include <set>

#include "phikit/enumerate.hpp"
#include "phikit/jointree.hpp"
#include "phikit/potential.hpp"
#include "phikit/rng.hpp"

using namespace phikit;

namespace {

std::uint64_t double_factorial(int m) {
    std::uint64_t r = 1;
    for (int i = m; i > 1; i -= 2) r *= static_cast<std::uint64_t>(i);
    return r;
}

JoinTree atom(std::int64_t a, std::int64_t b) { return JoinTree::atom(Ambient::PInf, make_edge(Ambient::PInf, a, b)); }

// max over D ⪯ A of Δ(Gr D), straight from the node list
Rational max_sub_delta(const JoinTree& a, const ThresholdWeighting& th) {
    Rational best(0);  // ⟨⟩
    for (int v = 0; v < a.num_nodes(); ++v) best = std::max(best, delta(a.graph_at(v), th));
    return best;
}

}  // namespace

TEST_CASE("minimal join-tree counts") {
    for (int q = 1; q <= 6; ++q) {
        std::uint64_t unordered = q == 1 ? 1 : double_factorial(2 * q - 3);
        CHECK(count_minimal_jointrees(q) == unordered);
        CHECK(count_minimal_jointrees(q, true) == unordered << (q - 1));
        PatternGraph p = build_path(q);
        std::set<std::string> seen;
        std::uint64_t n = enumerate_minimal_jointrees(
            p,
            [&](const JoinTree& a) {
                CHECK(a.is_minimal());
                CHECK(a.graph() == p);
                seen.insert(a.sexp());
                return true;
            },
            true);
        CHECK(n == unordered << (q - 1));
        CHECK(seen.size() == n);
    }
    CHECK(count_minimal_jointrees(2, true) == 2);
    CHECK(enumerate_minimal_jointrees(build_complete_binary_tree(2), [](const JoinTree&) { return true; }) == 945);
}

TEST_CASE("s-expressions round-trip") {
    std::vector<JoinTree> trees = {canonical_rd(5), canonical_mo(4), canonical_fo(13), canonical_tk(3),
                                   JoinTree::join(atom(0, 1), JoinTree::bot(Ambient::PInf))};
    PatternGraph t2 = build_complete_binary_tree(2);
    for (std::uint64_t s = 0; s < 20; ++s) trees.push_back(random_jointree(t2, s));
    for (const JoinTree& a : trees) {
        JoinTree b = JoinTree::parse_sexp(a.sexp());
        CHECK(b == a);
        CHECK(b.sexp() == a.sexp());
    }
    CHECK_THROWS(JoinTree::parse_sexp("(join (atom 0 1)"));
    CHECK_THROWS(JoinTree::parse_sexp("(atom 0 2)"));
}

TEST_CASE("restricting a join-tree commutes with its graph") {
    // two 2-paths e,f and g,h; S holds the outer endpoint of h
    JoinTree a = JoinTree::join(JoinTree::join(atom(0, 1), atom(1, 2)), JoinTree::join(atom(4, 5), atom(5, 6)));
    JoinTree r = restrict_jointree(a, make_vertex_set({6}));
    CHECK(r.graph() == build_path_range(0, 2));
    CHECK(r.num_leaves() == a.num_leaves());

    PatternGraph t2 = build_complete_binary_tree(2);
    Rng rng(5);
    for (int it = 0; it < 200; ++it) {
        JoinTree b = random_jointree(sample_uniform_subgraph(t2, rng), rng());
        std::vector<Vertex> s;
        for (Vertex v : t2.vertices())
            if (rng.bernoulli(0.2)) s.push_back(v);
        VertexSet sv = make_vertex_set(s);
        JoinTree rb = restrict_jointree(b, sv);
        CHECK(rb.graph() == restrict_away(b.graph(), sv));
        CHECK(restrict_jointree(rb, sv) == rb);
    }
}

TEST_CASE("sub-join-trees") {
    for (const JoinTree& a : {canonical_rd(4), canonical_fo(8), canonical_tk(2)}) {
        CHECK(sub_join_trees(a).size() == static_cast<std::size_t>(a.num_nodes()) + 1);
        CHECK(sub_join_trees(a, true).size() == static_cast<std::size_t>(a.num_nodes()));
    }
}

TEST_CASE("canonical trees are connected interval trees") {
    for (int k = 1; k <= 64; ++k) {
        for (const JoinTree& a : {canonical_rd(k), canonical_fo(k)}) {
            CHECK(a.is_connected());
            CHECK(a.graph() == build_path(k));
        }
        if (k <= 10) CHECK(canonical_mo(k).is_connected());
    }
    for (int k = 1; k <= 4; ++k) CHECK(canonical_tk(k).graph() == build_complete_binary_tree(k));

    CHECK(fib(1) == 1);
    CHECK(fib(2) == 1);
    CHECK(fib(7) == 13);
    JoinTree fo = canonical_fo(13);
    const JTNode& root = fo.node(fo.root());
    CHECK(fo.interval_at(root.left) == std::pair<std::int64_t, std::int64_t>{0, 8});
    CHECK(fo.interval_at(root.right) == std::pair<std::int64_t, std::int64_t>{5, 13});
}

TEST_CASE("potential on small trees") {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    JoinTree p2 = JoinTree::join(atom(0, 1), atom(1, 2));
    CHECK(phi(p2, one).value == Rational(1));
    CHECK(phi_cond(canonical_rd(2), {}, one).value == Rational(1));

    for (Rational t : {Rational(0), Rational(1, 2), Rational(1), Rational(4, 3), Rational(2)}) {
        ThresholdWeighting th = ThresholdWeighting::constant(t);
        JoinTree e = atom(3, 4);
        CHECK(phi(e, th).value == Rational(2) - t);
        for (TreeMode m : {TreeMode::Exhaustive, TreeMode::Canonical, TreeMode::Sampled})
            CHECK(min_phi_over_jointrees(build_path_range(3, 4), th, m).value == Rational(2) - t);
        CHECK(kappa_fixed_theta(build_path(1), th).value == Rational(2) - t);
    }

    PotentialValue traced = phi(p2, one, true);
    CHECK_FALSE(traced.trace.empty());
    CHECK(traced.trace.front().value == Rational(1));
}

TEST_CASE("potential decomposition") {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    Decomposition d = phi_decompose(atom(0, 1), one);
    REQUIRE(d.terms.size() == 1);
    CHECK(d.terms[0].second == Rational(1));

    Decomposition p = phi_decompose(JoinTree::join(atom(0, 1), atom(1, 2)), one);
    CHECK(p.phi == Rational(1));
    CHECK(p.reconstructed == Rational(1));
    CHECK(p.max_vertex_mass <= Rational(1));

    for (const JoinTree& a : all_minimal_jointrees(build_path(4))) {
        Decomposition q = phi_decompose(a, one);
        CHECK(q.reconstructed == q.phi);
        CHECK(q.max_vertex_mass <= Rational(1));
    }
}

TEST_CASE("kappa against sub-join-tree maxima") {
    ThresholdWeighting th = ThresholdWeighting::constant(Rational(3, 2));
    Rational best(100);
    for (const JoinTree& a : all_minimal_jointrees(build_path(2), true)) best = std::min(best, max_sub_delta(a, th));
    CHECK(best == Rational(1, 2));
    CHECK(kappa_fixed_theta(build_path(2), th).value == best);

    ThresholdWeighting one = ThresholdWeighting::constant(1);
    for (int k = 1; k <= 4; ++k) {
        Rational b(100);
        for (const JoinTree& a : all_minimal_jointrees(build_path(k))) b = std::min(b, max_sub_delta(a, one));
        CHECK(kappa_fixed_theta(build_path(k), one).value == b);
    }
}

TEST_CASE("potential transfer between thresholds") {
    // θ = 1 + 1/k against θ* = 1 on P_k: total gap 1
    for (int k = 1; k <= 4; ++k) {
        ThresholdWeighting hi = ThresholdWeighting::constant(Rational(1) + Rational(1, k));
        ThresholdWeighting lo = ThresholdWeighting::constant(1);
        for (const JoinTree& a : all_minimal_jointrees(build_path(k)))
            CHECK(phi(a, hi).value >= phi(a, lo).value - Rational(1));
    }
}

TEST_CASE("removing S costs one per component it meets") {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    PatternGraph p5 = build_path(5);
    VertexSet vs = p5.vertices();
    std::uint64_t checked = 0;
    for (std::uint64_t em = 1; em < (1u << p5.num_edges()); ++em) {
        PatternGraph f = edge_subset(p5, em);
        if (f.num_edges() > 4) continue;
        std::vector<PatternGraph> comps = components(f);
        for (const JoinTree& a : all_minimal_jointrees(f)) {
            Rational full = phi(a, one).value;
            for (std::uint64_t sm = 0; sm < (1u << vs.size()); sm += 3) {
                VertexSet s;
                for (std::size_t b = 0; b < vs.size(); ++b)
                    if (sm >> b & 1) s.push_back(vs[b]);
                std::int64_t t = 0;
                for (const PatternGraph& c : comps) t += vs_intersects(c.vertices(), s);
                CHECK(full >= phi(restrict_jointree(a, s), one).value + Rational(t));
                ++checked;
            }
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("conditional potential of FO grows along Fibonacci sizes") {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    Rational prev(0);
    for (int k : {1, 2, 3, 5, 8}) {
        Rational v = phi_cond(canonical_fo(k), {}, one).value;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("child order does not change the potential") {
    PatternGraph t1 = build_complete_binary_tree(1);
    ThresholdWeighting tinf = ThresholdWeighting::tinf();
    MinPhiResult r = min_phi_over_jointrees(t1, tinf, TreeMode::Exhaustive);
    CHECK(r.trees == 1);
    for (const JoinTree& a : all_minimal_jointrees(t1, true)) CHECK(phi(a, tinf).value == r.value);
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    for (const JoinTree& a : all_minimal_jointrees(build_path(3), true)) {
        Rational v = phi(a, one).value;
        CHECK(v >= Rational(1));
        CHECK(v <= Rational(3));
    }
}
