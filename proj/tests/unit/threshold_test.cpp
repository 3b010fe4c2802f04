#include <doctest.h>

#include <functional>

#include "phikit/enumerate.hpp"
#include "phikit/graph.hpp"
#include "phikit/rng.hpp"
#include "phikit/threshold.hpp"

using namespace phikit;

namespace {

// does some assignment V(G) -> [n] hit a present pair on every edge?
bool brute_sub(const ColoredInstance& inst) {
    const VertexSet& vs = inst.pattern.vertices();
    std::vector<int> pos(vs.size(), 0);
    auto index = [&](Vertex v) { return std::lower_bound(vs.begin(), vs.end(), v) - vs.begin(); };
    std::function<bool(std::size_t)> rec = [&](std::size_t d) {
        if (d == vs.size()) {
            for (std::size_t e = 0; e < inst.pattern.edges().size(); ++e) {
                const Edge& ed = inst.pattern.edges()[e];
                std::pair<int, int> want{pos[index(ed.u)], pos[index(ed.v)]};
                if (std::find(inst.pairs[e].begin(), inst.pairs[e].end(), want) == inst.pairs[e].end()) return false;
            }
            return true;
        }
        for (int i = 0; i < inst.n; ++i) {
            pos[d] = i;
            if (rec(d + 1)) return true;
        }
        return false;
    };
    return rec(0);
}

Rational direct_delta(const PatternGraph& f, const ThresholdWeighting& th) {
    Rational s(static_cast<std::int64_t>(f.num_vertices()));
    for (const Edge& e : f.edges()) s -= th(e);
    return s;
}

}  // namespace

TEST_CASE("uniform walk on T_k") {
    for (int k = 2; k <= 4; ++k) {
        PatternGraph t = build_complete_binary_tree(k);
        ThresholdWeighting th = theta_from_markov(uniform_walk(t), t);
        for (const Edge& e : t.edges()) {
            if (tlevel(e.u) == 0)
                CHECK(th(e) == Rational(4, 3));
            else if (tlevel(e.v) == k)
                CHECK(th(e) == Rational(5, 6));
            else
                CHECK(th(e) == Rational(2, 3));
        }
        CHECK(delta(t, th) == 0);
        if (k <= 3) CHECK(validate_threshold(t, th).ok);
    }
}

TEST_CASE("uniform walk on P_k") {
    for (int k = 3; k <= 7; ++k) {
        PatternGraph p = build_path(k);
        ThresholdWeighting th = theta_from_markov(uniform_walk(p), p);
        // an outer edge gets M_{0,1} + M_{1,0} = 1 + 1/2, which is what makes Δ(P_k) = 0
        for (const Edge& e : p.edges()) {
            bool outer = e.u == 0 || e.v == k;
            CHECK(th(e) == (outer ? Rational(3, 2) : Rational(1)));
        }
        CHECK(delta(p, th) == 0);
    }
}

TEST_CASE("symmetric chain on one edge") {
    PatternGraph e = build_path(1);
    MarkovChain m;
    m.p[{0, 1}] = Rational(1);
    m.p[{1, 0}] = Rational(1);
    m.validate(e);
    ThresholdWeighting th = theta_from_markov(m, e);
    CHECK(th(e.edges()[0]) == Rational(2));
}

TEST_CASE("threshold validation") {
    for (int k = 1; k <= 6; ++k) {
        PatternGraph p = build_path(k);
        CHECK(validate_threshold(p, ThresholdWeighting::constant(Rational(1) + Rational(1, k))).ok);
    }
    ThresholdReport bad = validate_threshold(build_path(2), ThresholdWeighting::constant(2));
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.witness.has_value());
    CHECK(*bad.witness == build_path(2));
    CHECK(bad.witness_delta == Rational(-1));
}

TEST_CASE("delta is |V| minus total weight") {
    ThresholdWeighting tinf = ThresholdWeighting::tinf();
    for_each_subgraph(build_complete_binary_tree(3), kNonEmpty, [&](const PatternGraph& f) {
        CHECK(delta(f, tinf) == direct_delta(f, tinf));
        // 3·Δ_θ∞(F) >= ∂(F)
        CHECK(Rational(3) * delta(f, tinf) >= Rational(boundary_size(f)));
        CHECK(tinf_boundary_sum(f) == delta(f, tinf));
        return true;
    });
}

TEST_CASE("delta under constant one counts components") {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    for_each_subgraph(build_path(7), kAny, [&](const PatternGraph& f) {
        CHECK(delta(f, one) == Rational(static_cast<std::int64_t>(components(f).size())));
        return true;
    });
}

TEST_CASE("delta splits over unions of components") {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    PatternGraph p5 = build_path(5);
    VertexSet vs = p5.vertices();
    std::uint64_t checked = 0;
    for (std::uint64_t em = 1; em < (1u << p5.num_edges()); ++em) {
        PatternGraph f = edge_subset(p5, em);
        for (std::uint64_t sm = 0; sm < (1u << vs.size()); ++sm) {
            VertexSet s;
            for (std::size_t b = 0; b < vs.size(); ++b)
                if (sm >> b & 1) s.push_back(vs[b]);
            auto comps = decompose_components(f, s);
            for (std::uint64_t pick = 0; pick < (1u << comps.size()); ++pick) {
                VertexSet t;
                for (std::size_t c = 0; c < comps.size(); ++c)
                    if (pick >> c & 1) t = vs_union(t, comps[c].vertices());
                Rational lhs = delta_cond(f, s, one);
                Rational rhs = delta_cond(induced_on(f, vs_union(t, s)), s, one) + delta_cond(f, vs_union(s, t), one);
                CHECK(lhs == rhs);
                ++checked;
            }
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("boundary sum identity for Markov chains") {
    Rng rng(3);
    for (int k = 2; k <= 5; ++k) {
        PatternGraph p = build_path(k);
        // random chain with small integer weights on each row
        MarkovChain m;
        m.ambient = Ambient::PInf;
        for (Vertex v = 0; v <= k; ++v) {
            std::vector<Vertex> nb;
            if (v > 0) nb.push_back(v - 1);
            if (v < k) nb.push_back(v + 1);
            std::vector<std::int64_t> w;
            std::int64_t tot = 0;
            for (std::size_t i = 0; i < nb.size(); ++i) tot += w.emplace_back(1 + static_cast<std::int64_t>(rng.below(5)));
            for (std::size_t i = 0; i < nb.size(); ++i) m.p[{v, nb[i]}] = Rational(w[i], tot);
        }
        m.validate(p);
        ThresholdWeighting th = theta_from_markov(m, p);
        for_each_subgraph(p, kNonEmpty, [&](const PatternGraph& f) {
            CHECK(boundary_sum_delta(m, f) == delta(f, th));
            return true;
        });
    }
    PatternGraph t2 = build_complete_binary_tree(2);
    MarkovChain u = uniform_walk(t2);
    ThresholdWeighting th = theta_from_markov(u, t2);
    for_each_subgraph(t2, kNonEmpty, [&](const PatternGraph& f) {
        CHECK(boundary_sum_delta(u, f) == delta(f, th));
        return true;
    });
}

TEST_CASE("SUB on sampled instances") {
    PatternGraph g = build_path(1);
    ColoredInstance all = sample_instance(g, ThresholdWeighting::constant(0), 1, 5);
    CHECK(solve_sub(all));

    ColoredInstance none;
    none.n = 4;
    none.pattern = build_path(2);
    none.pairs.assign(2, {});
    CHECK_FALSE(solve_sub(none));

    PatternGraph p2 = build_path(2);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        ColoredInstance inst = sample_instance(p2, ThresholdWeighting::constant(Rational(3, 2)), 5, seed);
        CHECK(solve_sub(inst) == brute_sub(inst));
    }
    PatternGraph t1 = build_complete_binary_tree(1);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        ColoredInstance inst = sample_instance(t1, ThresholdWeighting::constant(Rational(4, 3)), 4, seed);
        CHECK(solve_sub(inst) == brute_sub(inst));
    }
}

TEST_CASE("sampled instances are reproducible") {
    PatternGraph p3 = build_path(3);
    ThresholdWeighting th = ThresholdWeighting::constant(Rational(4, 3));
    ColoredInstance a = sample_instance(p3, th, 16, 99), b = sample_instance(p3, th, 16, 99);
    CHECK(a.pairs == b.pairs);
}
