#include <doctest.h>

#include <algorithm>

#include "phikit/jointree.hpp"
#include "phikit/pathset.hpp"
#include "phikit/rng.hpp"

using namespace phikit;

namespace {

JoinTree atom(std::int64_t a, std::int64_t b) { return JoinTree::atom(Ambient::PInf, make_edge(Ambient::PInf, a, b)); }

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// n = 2 relations as bitmasks over codes Σ x_i 2^i (i = position in vars)
struct Micro {
    ThresholdWeighting th = ThresholdWeighting::constant(1);

    // every restriction to T ⊇ ∅ has count <= 2^{|V \ T| - Δ(F|T)}, with Δ integral here
    bool pathset(std::uint64_t mask, const VertexSet& vars, const PatternGraph& f) const {
        int d = static_cast<int>(vars.size());
        for (std::uint64_t tm = 0; tm < (1u << d); ++tm) {
            VertexSet t;
            for (int i = 0; i < d; ++i)
                if (tm >> i & 1) t.push_back(vars[i]);
            Rational dl = delta_cond(f, t, th);
            REQUIRE(dl.is_integer());
            for (std::uint64_t z = 0; z < (1u << d); ++z) {
                if (z & ~tm) continue;
                std::int64_t cnt = 0;
                for (std::uint64_t c = 0; c < (1u << d); ++c)
                    if ((mask >> c & 1) && (c & tm) == z) ++cnt;
                int free = d - static_cast<int>(t.size());
                if (dl.num() > free ? cnt > 0 : cnt > ipow(2, free - static_cast<int>(dl.num()))) return false;
            }
        }
        return true;
    }

    // minimum weighted cover of `target` by pathsets (weights per mask)
    static std::int64_t cover(std::uint64_t target, const std::vector<std::int64_t>& weight, int universe) {
        std::vector<std::int64_t> best(std::size_t{1} << universe, 1 << 28);
        best[0] = 0;
        for (std::uint64_t m = 1; m < best.size(); ++m)
            for (std::uint64_t p = 1; p < weight.size(); ++p)
                if ((p & m) && weight[p] < (1 << 28)) best[m] = std::min(best[m], weight[p] + best[m & ~p]);
        return best[target];
    }
};

// χ_A(𝒜) for every 𝒜 ⊆ [2]^{V(A)} by the definition: cover by pathsets 𝒜_i, each paid for by
// the cheapest pathset pair (ℬ, 𝒞) with 𝒜_i ⊆ ℬ ⋈ 𝒞
std::vector<std::int64_t> chi_by_definition(const JoinTree& a) {
    Micro m;
    const JTNode& root = a.node(a.root());
    PatternGraph g = a.graph(), gl = a.graph_at(root.left), gr = a.graph_at(root.right);
    VertexSet v = g.vertices(), vl = gl.vertices(), vr = gr.vertices();
    int d = static_cast<int>(v.size());
    auto pos = [&](const VertexSet& s, Vertex x) { return std::lower_bound(s.begin(), s.end(), x) - s.begin(); };

    auto atomic_chi = [&](const PatternGraph& f, const VertexSet& vars) {
        int u = 1 << vars.size();
        std::vector<std::int64_t> w(std::size_t{1} << u, 1 << 28);
        for (std::uint64_t p = 1; p < w.size(); ++p)
            if (m.pathset(p, vars, f)) w[p] = 1;
        std::vector<std::int64_t> out(w.size());
        for (std::uint64_t t = 0; t < w.size(); ++t) out[t] = Micro::cover(t, w, u);
        return out;
    };
    std::vector<std::int64_t> cl = atomic_chi(gl, vl), cr = atomic_chi(gr, vr);

    int u = 1 << d;
    std::vector<std::int64_t> w(std::size_t{1} << u, 1 << 28);
    for (std::uint64_t bm = 0; bm < cl.size(); ++bm) {
        if (!m.pathset(bm, vl, gl)) continue;
        for (std::uint64_t cm = 0; cm < cr.size(); ++cm) {
            if (!m.pathset(cm, vr, gr)) continue;
            std::uint64_t joined = 0;
            for (int c = 0; c < u; ++c) {
                std::uint64_t bc = 0, cc = 0;
                for (std::size_t i = 0; i < vl.size(); ++i) bc |= std::uint64_t((c >> pos(v, vl[i])) & 1) << i;
                for (std::size_t i = 0; i < vr.size(); ++i) cc |= std::uint64_t((c >> pos(v, vr[i])) & 1) << i;
                if ((bm >> bc & 1) && (cm >> cc & 1)) joined |= std::uint64_t{1} << c;
            }
            std::int64_t cost = std::max(cl[bm], cr[cm]);
            // every pathset inside the join can be paid for by this pair
            for (std::uint64_t p = joined;; p = (p - 1) & joined) {
                if (p && cost < w[p] && m.pathset(p, v, g)) w[p] = cost;
                if (!p) break;
            }
        }
    }
    std::vector<std::int64_t> out(w.size());
    for (std::uint64_t t = 0; t < w.size(); ++t) out[t] = Micro::cover(t, w, u);
    return out;
}

}  // namespace

TEST_CASE("χ over P_2 at n = 2 matches the definition") {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    for (const JoinTree& a : {JoinTree::join(atom(0, 1), atom(1, 2)), JoinTree::join(atom(1, 2), atom(0, 1))}) {
        std::vector<std::int64_t> want = chi_by_definition(a);
        PathsetOracle o(a, one, 2);
        VertexSet v = a.graph().vertices();
        for (std::uint64_t mask = 0; mask < 256; ++mask) {
            Relation r = Relation::from_mask(2, v, mask);
            CHECK(o.chi({}, r) == want[mask]);
        }
        CHECK(want[0] == 0);
        CHECK(o.chi({}, Relation::full(2, v)) == want[255]);
    }
}

TEST_CASE("atomic χ") {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    JoinTree e = atom(0, 1);
    PathsetOracle o(e, one, 3);
    VertexSet v = e.graph().vertices();
    CHECK(o.chi({}, Relation(3, v)) == 0);
    Relation single(3, v);
    single.insert({2, 1});
    CHECK(o.chi({}, single) == 1);
    // the full 3x3 relation needs three pathsets of density 1/3
    CHECK(o.chi({}, Relation::full(3, v)) == 3);
}

TEST_CASE("pathset membership") {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    PatternGraph p1 = build_path(1);
    Relation r(2, p1.vertices());
    CHECK(is_pathset(r, p1, {}, one));
    r.insert({1, 1});
    CHECK(is_pathset(r, p1, {}, one));
    r.insert({0, 0});
    CHECK(is_pathset(r, p1, {}, one));
    r.insert({0, 1});
    CHECK_FALSE(is_pathset(r, p1, {}, one));

    // singletons are pathsets for every S
    PatternGraph p2 = build_path(2);
    for (std::uint64_t sm = 0; sm < 8; ++sm) {
        VertexSet s;
        for (int b = 0; b < 3; ++b)
            if (sm >> b & 1) s.push_back(b);
        VertexSet rest;
        for (Vertex x : p2.vertices())
            if (!vs_contains(s, x)) rest.push_back(x);
        Relation one_tuple(3, rest);
        if (!rest.empty()) one_tuple.insert(std::vector<int>(rest.size(), 2));
        CHECK(is_pathset(one_tuple, p2, s, one));
    }
}

TEST_CASE("relation algebra") {
    VertexSet a = {0, 1}, b = {1, 2}, ab = {0, 1, 2};
    CHECK(join(Relation::full(3, a), Relation::full(3, b)) == Relation::full(3, ab));
    Rng rng(23);
    for (int it = 0; it < 100; ++it) {
        Relation r(3, ab);
        for (std::uint64_t c = 0; c < r.universe(); ++c)
            if (rng.bernoulli(0.3)) r.insert(c);
        CHECK(project(r, ab) == r);
        // μ(𝒜) <= μ(proj_U 𝒜) · max_z μ(ρ_z 𝒜)
        for (const VertexSet& u : {VertexSet{0}, VertexSet{0, 1}, VertexSet{1}}) {
            Rational best(0);
            std::uint64_t zs = 1;
            for (std::size_t i = 0; i < u.size(); ++i) zs *= 3;
            for (std::uint64_t zc = 0; zc < zs; ++zc) {
                std::vector<int> z;
                for (std::uint64_t q = zc, i = 0; i < u.size(); ++i, q /= 3) z.push_back(static_cast<int>(q % 3));
                best = std::max(best, restrict_rel(r, u, z).density());
            }
            CHECK(r.density() <= project(r, u).density() * best);
        }
    }
}

TEST_CASE("pathsets are closed under restriction") {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    PatternGraph p2 = build_path(2);
    VertexSet v = p2.vertices();
    Rng rng(29);
    int tested = 0;
    for (int it = 0; it < 400; ++it) {
        Relation r(3, v);
        for (std::uint64_t c = 0; c < r.universe(); ++c)
            if (rng.bernoulli(0.15)) r.insert(c);
        if (!is_pathset(r, p2, {}, one)) continue;
        ++tested;
        for (const VertexSet& t : {VertexSet{0}, VertexSet{1}, VertexSet{0, 2}})
            for (int z0 = 0; z0 < 3; ++z0) {
                std::vector<int> z(t.size(), z0);
                CHECK(is_pathset(restrict_rel(r, t, z), p2, t, one));
            }
    }
    CHECK(tested > 20);
}

TEST_CASE("certificates witness the value") {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    JoinTree a = JoinTree::join(atom(0, 1), atom(1, 2));
    PathsetOracle o(a, one, 2);
    VertexSet v = a.graph().vertices();
    const JTNode& root = a.node(a.root());
    for (std::uint64_t mask : {0x00ull, 0x81ull, 0xffull, 0x3cull}) {
        Relation r = Relation::from_mask(2, v, mask);
        PathsetCertificate c = o.certificate(a.root(), {}, r);
        CHECK(c.value == o.chi({}, r));
        Relation covered(2, v);
        std::int64_t total = 0;
        for (const PathsetTriple& t : c.family) {
            CHECK(o.pathset(a.root(), {}, t.a));
            CHECK(o.pathset(root.left, {}, t.b));
            CHECK(o.pathset(root.right, {}, t.c));
            CHECK(t.a.subset_of(join(t.b, t.c)));
            covered = rel_union(covered, t.a);
            total += t.cost;
        }
        CHECK(r.subset_of(covered));
        CHECK(total == c.value);
    }
}

TEST_CASE("rectangle pathsets") {
    Profile half = {Rational(1, 2), Rational(1, 2)};
    Relation r = rectangle_pathset(half, {{0, 3}, {1, 2}}, 4);
    CHECK(r.density() == Rational(1, 4));
    CHECK(is_pathset(r, build_path(1), {}, ThresholdWeighting::constant(1)));

    Relation s = rectangle_pathset({Rational(1), Rational(1), Rational(1)}, {{2}, {0}, {1}}, 5);
    CHECK(s.size() == 1);
    CHECK(is_pathset(s, build_path(2), {}, ThresholdWeighting::constant(1)));

    CHECK_THROWS(rectangle_pathset({Rational(0), Rational(0)}, {{0, 1, 2, 3}, {0, 1, 2, 3}}, 4));
    CHECK_THROWS(rectangle_pathset(half, {{0, 1, 2}, {0}}, 4));
}

TEST_CASE("χ density bound") {
    CHECK(chi_density_bound(4, 3, 2, Rational(1), 1));
    CHECK_FALSE(chi_density_bound(5, 3, 2, Rational(1), 1));
    CHECK(chi_density_bound(8, 3, 2, Rational(1), 2));
    CHECK(chi_density_bound(3, 2, 4, Rational(1, 2), 1));   // 3 <= 4^{3/2}
    CHECK_FALSE(chi_density_bound(9, 2, 4, Rational(1, 2), 1));
}
