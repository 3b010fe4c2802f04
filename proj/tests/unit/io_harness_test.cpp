#include <doctest.h>

#include <filesystem>

#include "phikit/enumerate.hpp"
#include "phikit/harness.hpp"
#include "phikit/io.hpp"
#include "phikit/rng.hpp"

using namespace phikit;

TEST_CASE("graph and vertex-set round-trips") {
    for (const PatternGraph& g : {build_path(5), build_path_range(3, 7), build_complete_binary_tree(3), PatternGraph()}) {
        CHECK(graph_from_json(graph_to_json(g)) == g);
        CHECK(graph_from_json(json::parse(graph_to_json(g).dump())) == g);
    }
    CHECK(parse_graph_spec("T:2") == build_complete_binary_tree(2));
    CHECK(parse_graph_spec("P:4") == build_path(4));
    CHECK(parse_graph_spec("P:2-5") == build_path_range(2, 5));
    CHECK(parse_graph_spec(graph_to_json(build_path(3)).dump()) == build_path(3));
    CHECK_THROWS(parse_graph_spec("Q:3"));

    VertexSet s = make_vertex_set({0, 2, 5});
    CHECK(parse_vertex_set(Ambient::PInf, "0,2,5") == s);
    CHECK(vertex_set_from_json(Ambient::PInf, vertex_set_to_json(Ambient::PInf, s)) == s);
    VertexSet t = parse_vertex_set(Ambient::TInf, "0:0,2:1");
    CHECK(vertex_set_from_json(Ambient::TInf, vertex_set_to_json(Ambient::TInf, t)) == t);
}

TEST_CASE("threshold round-trips") {
    PatternGraph t2 = build_complete_binary_tree(2);
    for (const ThresholdWeighting& th :
         {ThresholdWeighting::constant(Rational(4, 3)), ThresholdWeighting::tinf(), theta_from_markov(uniform_walk(t2), t2)}) {
        ThresholdWeighting back = theta_from_json(json::parse(theta_to_json(th, Ambient::TInf).dump()));
        for (const Edge& e : t2.edges()) CHECK(back(e) == th(e));
    }
    PatternGraph p3 = build_path(3);
    ThresholdWeighting w = parse_theta_spec("walk", p3);
    CHECK(w(p3.edges()[0]) == Rational(3, 2));
    CHECK(parse_theta_spec("const:4/3", p3)(p3.edges()[1]) == Rational(4, 3));
    CHECK(parse_theta_spec("one", p3)(p3.edges()[1]) == Rational(1));
    CHECK(rational_from_json(rational_to_json(Rational(-7, 3))) == Rational(-7, 3));
}

TEST_CASE("relation and permutation round-trips") {
    Rng rng(8);
    for (int it = 0; it < 20; ++it) {
        Relation r(3, make_vertex_set({0, 1, 2}));
        for (std::uint64_t c = 0; c < r.universe(); ++c)
            if (rng.bernoulli(0.3)) r.insert(c);
        Relation b = relation_from_json(json::parse(relation_to_json(r).dump()));
        CHECK(b.vars() == r.vars());
        CHECK(b.n() == r.n());
        CHECK(b.codes() == r.codes());
    }
    PermSequence ps = PermSequence::random(9, 4, 2);
    PermSequence back = perms_from_json(perms_to_json(ps));
    CHECK(back.n == ps.n);
    CHECK(back.pi == ps.pi);
    CHECK_THROWS(perms_from_json(json::parse(R"({"n":3,"perms":[[0,0,1]]})")));
}

TEST_CASE("tree and profile specs") {
    CHECK(parse_tree_spec("fo:13", 0) == canonical_fo(13));
    CHECK(parse_tree_spec("fo", 13) == canonical_fo(13));
    CHECK(parse_tree_spec("rd:4", 0) == canonical_rd(4));
    CHECK(parse_tree_spec("tk:2", 0) == canonical_tk(2));
    JoinTree m = canonical_mo(5);
    CHECK(parse_tree_spec(m.sexp(), 0) == m);
    CHECK_THROWS(parse_tree_spec("fo", 0));
    CHECK_THROWS(parse_tree_spec("zz:3", 0));
    CHECK(parse_profile_spec("fib", 5) == fib_profile(5));
    CHECK(parse_profile_spec("1/2,0,1/2", 2) == Profile{Rational(1, 2), Rational(0), Rational(1, 2)});
}

TEST_CASE("tree-depth agrees with the naive recursion") {
    Rng rng(12);
    for (int it = 0; it < 40; ++it) {
        SimpleGraph g;
        g.n = 2 + static_cast<int>(rng.below(7));
        g.adj.assign(g.n, 0);
        for (int a = 0; a < g.n; ++a)
            for (int b = a + 1; b < g.n; ++b)
                if (rng.bernoulli(0.35)) g.add_edge(a, b);
        CHECK(tree_depth(g) == tree_depth_naive(g));
    }
    CHECK(tree_depth_naive(SimpleGraph::from_pattern(build_path(1))) == 1);
    CHECK(tree_depth_naive(SimpleGraph::from_pattern(build_complete_binary_tree(2))) == 2);
}

TEST_CASE("suites") {
    CHECK(suite_names().size() == 7);
    CHECK(suite_criteria("permprod_bench") == std::vector<int>{11});
    CHECK_THROWS_AS(suite_criteria("nope"), std::invalid_argument);

    SuiteConfig cfg;
    cfg.trials = 0;
    SuiteReport r = run_suite("permprod_bench", cfg);
    CHECK(r.pass);

    SuiteConfig d;
    d.trials = 50;
    d.seed = 5;
    std::string a = report_csv(run_suite("distribution_check", d));
    std::string b = report_csv(run_suite("distribution_check", d));
    CHECK(a == b);
    CHECK(report_json(run_suite("distribution_check", d))["suite"] == "distribution_check");
}

TEST_CASE("config files") {
    auto path = std::filesystem::temp_directory_path() / "phikit_cfg_test.json";
    write_file(path.string(), R"({"version":1,"seed":7,"jobs":1,"trials":12,"cap":5000})");
    SuiteConfig c = load_config(path.string());
    CHECK(c.seed == 7);
    CHECK(c.trials == 12);
    CHECK(c.cap == 5000);
    std::filesystem::remove(path);
}
