#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phikit/permprod.hpp"
#include "phikit/rng.hpp"

using namespace phikit;

namespace {

std::vector<int> fold_left(const PermSequence& ps) {
    std::vector<int> out(ps.n);
    for (int x = 0; x < ps.n; ++x) {
        int y = x;
        for (const auto& p : ps.pi) y = p[y];
        out[x] = y;
    }
    return out;
}

std::vector<int> true_path(const PermSequence& ps, int x0) {
    std::vector<int> p{x0};
    for (const auto& pi : ps.pi) p.push_back(pi[p.back()]);
    return p;
}

bool is_true_path(const PermSequence& ps, const std::vector<int>& x) {
    if (static_cast<int>(x.size()) != ps.k() + 1) return false;
    for (int h = 1; h <= ps.k(); ++h)
        if (ps.pi[h - 1][x[h - 1]] != x[h]) return false;
    return true;
}

bool in_rect(const std::vector<std::vector<int>>& sets, const std::vector<int>& x) {
    for (std::size_t h = 0; h < sets.size(); ++h)
        if (std::find(sets[h].begin(), sets[h].end(), x[h]) == sets[h].end()) return false;
    return true;
}

}  // namespace

TEST_CASE("composition") {
    PermSequence one = PermSequence::random(12, 1, 3);
    CHECK(compose_direct(one) == one.pi[0]);

    PermSequence inv;
    inv.n = 12;
    std::vector<int> back(12);
    for (int x = 0; x < 12; ++x) back[one.pi[0][x]] = x;
    inv.pi = {one.pi[0], back};
    std::vector<int> id(12);
    std::iota(id.begin(), id.end(), 0);
    CHECK(compose_direct(inv) == id);

    for (std::uint64_t s = 0; s < 20; ++s) {
        PermSequence ps = PermSequence::random(16, 5, s);
        ps.validate();
        CHECK(compose_direct(ps) == fold_left(ps));
    }
    PermSequence bad;
    bad.n = 3;
    bad.pi = {{0, 0, 1}};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("trivial rectangles") {
    PermSequence ps = PermSequence::random(8, 2, 1);
    PermProdSim sim(canonical_rd(2), rd_profile(2), ps);
    CHECK(sim.isolate({{0, 1, 2}, {}, {0, 1, 2, 3, 4, 5, 6, 7}}).kind == IsoKind::NotIsolated);

    PermSequence tiny = PermSequence::identity(1, 3);
    PermProdSim t(canonical_fo(3), fib_profile(3), tiny);
    IsolationOutcome o = t.isolate({{0}, {0}, {0}, {0}});
    CHECK(o.kind == IsoKind::Isolated);
    CHECK(o.path == std::vector<int>{0, 0, 0, 0});
    EnumResult e = t.enumerate_paths();
    CHECK(e.complete);
    CHECK(e.sound);

    // k = 1: the whole formula is one atom
    PermSequence one = PermSequence::random(8, 1, 4);
    PermProdSim a(canonical_rd(1), rd_profile(1), one);
    CHECK(a.isolate({{3}, {one.pi[0][3]}}).kind == IsoKind::Isolated);
    CHECK(a.isolate({{3, 4}, {one.pi[0][3], one.pi[0][4]}}).kind != IsoKind::Isolated);
    EnumResult ea = a.enumerate_paths();
    CHECK(ea.sound);
    CHECK(ea.complete);
}

TEST_CASE("two paths in a rectangle are never isolated") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        PermSequence ps = PermSequence::random(16, 3, s);
        int a = static_cast<int>(s % 16), b = static_cast<int>((s * 7 + 3) % 16);
        if (a == b) b = (b + 1) % 16;
        std::vector<int> pa = true_path(ps, a), pb = true_path(ps, b);
        std::vector<std::vector<int>> sets(4);
        for (int h = 0; h <= 3; ++h) sets[h] = {pa[h], pb[h]};
        SimParams p;
        p.seed = s;
        PermProdSim sim(canonical_fo(3), fib_profile(3), ps, p);
        IsolationOutcome o = sim.isolate(sets);
        CHECK(o.candidates == 2);
        CHECK(o.kind != IsoKind::Isolated);
    }
}

TEST_CASE("singleton rectangles on a true path are isolated") {
    PermSequence ps = PermSequence::random(64, 2, 77);
    int hits = 0;
    const int seeds = 1000;
    for (int s = 0; s < seeds; ++s) {
        std::vector<int> x = true_path(ps, s % 64);
        SimParams p;
        p.seed = static_cast<std::uint64_t>(s);
        PermProdSim sim(canonical_rd(2), rd_profile(2), ps, p);
        IsolationOutcome o = sim.isolate({{x[0]}, {x[1]}, {x[2]}});
        if (o.kind == IsoKind::Isolated) {
            ++hits;
            CHECK(o.path == x);
        }
    }
    CHECK(hits >= 990);
}

TEST_CASE("isolated tuples are true paths inside the rectangle") {
    Rng rng(41);
    int isolated = 0;
    for (int it = 0; it < 200; ++it) {
        PermSequence ps = PermSequence::random(16, 3, rng());
        std::vector<std::vector<int>> sets(4);
        for (auto& s : sets)
            for (int v = 0; v < 16; ++v)
                if (rng.bernoulli(0.3)) s.push_back(v);
        SimParams p;
        p.seed = rng();
        PermProdSim sim(canonical_fo(3), fib_profile(3), ps, p);
        IsolationOutcome o = sim.isolate(sets);
        if (o.kind != IsoKind::Isolated) continue;
        ++isolated;
        CHECK(is_true_path(ps, o.path));
        CHECK(in_rect(sets, o.path));
        CHECK(o.candidates == 1);
    }
    CHECK(isolated > 0);
}

TEST_CASE("enumeration is sound") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        PermSequence ps = PermSequence::random(16, 3, s);
        SimParams p;
        p.seed = s + 100;
        EnumResult e = PermProdSim(canonical_fo(3), fib_profile(3), ps, p).enumerate_paths();
        CHECK(e.sound);
        for (const auto& x : e.paths) CHECK(is_true_path(ps, x));
        CHECK(std::is_sorted(e.paths.begin(), e.paths.end()));
    }
}

TEST_CASE("formula size bound shape") {
    for (int n = 2; n <= 100; ++n) {
        SymbolicSize z = symbolic_size(canonical_rd(1), rd_profile(1), n);
        CHECK(z.outputs == 2 * static_cast<int>(std::ceil(std::log2(n + 1))) + 1);
    }
    for (int k = 1; k <= 13; ++k) {
        SymbolicSize z = symbolic_size(canonical_fo(k), fib_profile(k), 1024);
        CHECK(z.depth <= 6 * k + 4);
    }
}

TEST_CASE("completeness does not drop as c grows") {
    const int trials = 40;
    std::vector<double> rate;
    for (double c : {1.5, 2.0, 3.0}) {
        int ok = 0;
        for (int t = 0; t < trials; ++t) {
            PermSequence ps = PermSequence::random(16, 2, 500 + t);
            SimParams p;
            p.c = c;
            p.seed = 900 + t;
            ok += PermProdSim(canonical_rd(2), rd_profile(2), ps, p).enumerate_paths().complete;
        }
        rate.push_back(static_cast<double>(ok) / trials);
    }
    for (std::size_t i = 1; i < rate.size(); ++i) {
        // overlapping normal intervals count as non-decreasing
        double se = std::sqrt((rate[i] * (1 - rate[i]) + rate[i - 1] * (1 - rate[i - 1])) / trials);
        CHECK(rate[i] + 2 * se + 1e-12 >= rate[i - 1]);
    }
}
