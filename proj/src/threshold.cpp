#include "phikit/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "phikit/rng.hpp"

namespace phikit {

ThresholdWeighting ThresholdWeighting::constant(Rational c) {
    if (c < Rational(0) || c > Rational(2)) throw std::invalid_argument("threshold value outside [0,2]");
    ThresholdWeighting t;
    t.kind_ = Kind::Constant;
    t.c_ = c;
    return t;
}

ThresholdWeighting ThresholdWeighting::tinf() {
    ThresholdWeighting t;
    t.kind_ = Kind::TInf;
    return t;
}

ThresholdWeighting ThresholdWeighting::explicit_map(std::map<Edge, Rational> values) {
    for (auto& [e, v] : values)
        if (v < Rational(0) || v > Rational(2)) throw std::invalid_argument("threshold value outside [0,2]");
    ThresholdWeighting t;
    t.kind_ = Kind::Explicit;
    t.map_ = std::move(values);
    return t;
}

bool ThresholdWeighting::defined(const Edge& e) const {
    if (kind_ == Kind::Explicit) return map_.count(e) > 0;
    return true;
}

Rational ThresholdWeighting::operator()(const Edge& e) const {
    switch (kind_) {
        case Kind::Constant:
            return c_;
        case Kind::TInf:
            return tlevel(e.u) == 0 ? Rational(4, 3) : Rational(2, 3);
        case Kind::Explicit: {
            auto it = map_.find(e);
            if (it == map_.end()) throw std::out_of_range("edge outside the threshold weighting's domain");
            return it->second;
        }
    }
    return c_;
}

std::string ThresholdWeighting::describe() const {
    switch (kind_) {
        case Kind::Constant:
            return "const:" + c_.str();
        case Kind::TInf:
            return "tinf";
        case Kind::Explicit:
            return "explicit(" + std::to_string(map_.size()) + " edges)";
    }
    return "?";
}

Rational delta(const PatternGraph& f, const ThresholdWeighting& th) {
    Rational s(static_cast<std::int64_t>(f.num_vertices()));
    for (auto& e : f.edges()) s -= th(e);
    return s;
}

Rational delta_cond(const PatternGraph& f, const VertexSet& s, const ThresholdWeighting& th) {
    return delta(restrict_away(f, s), th);
}

Rational tinf_boundary_sum(const PatternGraph& f) {
    if (f.ambient() != Ambient::TInf) throw std::invalid_argument("tinf_boundary_sum needs a T_inf graph");
    std::map<Vertex, int> deg;
    for (auto v : f.vertices()) deg[v] = 0;
    for (auto& e : f.edges()) {
        ++deg[e.u];
        ++deg[e.v];
    }
    Rational s(0);
    for (auto& [v, d] : deg) {
        int full = tlevel(v) == 0 ? 1 : 3;
        s += Rational(full - d, full);
    }
    return s;
}

Rational MarkovChain::at(Vertex v, Vertex w) const {
    auto it = p.find({v, w});
    return it == p.end() ? Rational(0) : it->second;
}

void MarkovChain::validate(const PatternGraph& g) const {
    std::map<Vertex, Rational> rows;
    for (auto& [vw, x] : p) {
        if (x < Rational(0)) throw std::invalid_argument("negative transition probability");
        if (x.is_zero()) continue;
        if (!g.has_edge(make_edge(g.ambient(), vw.first, vw.second)))
            throw std::invalid_argument("transition " + vertex_str(g.ambient(), vw.first) + "->" +
                                        vertex_str(g.ambient(), vw.second) + " is not an edge");
        rows[vw.first] += x;
    }
    for (auto v : g.vertices()) {
        auto it = rows.find(v);
        if (it == rows.end() || it->second != Rational(1))
            throw std::invalid_argument("row of " + vertex_str(g.ambient(), v) + " does not sum to 1");
    }
}

MarkovChain uniform_walk(const PatternGraph& g) {
    MarkovChain m;
    m.ambient = g.ambient();
    std::map<Vertex, int> deg;
    for (auto& e : g.edges()) {
        ++deg[e.u];
        ++deg[e.v];
    }
    for (auto& e : g.edges()) {
        m.p[{e.u, e.v}] = Rational(1, deg[e.u]);
        m.p[{e.v, e.u}] = Rational(1, deg[e.v]);
    }
    return m;
}

ThresholdWeighting theta_from_markov(const MarkovChain& m, const PatternGraph& g) {
    m.validate(g);
    std::map<Edge, Rational> th;
    for (auto& e : g.edges()) th[e] = m.at(e.u, e.v) + m.at(e.v, e.u);
    return ThresholdWeighting::explicit_map(std::move(th));
}

Rational boundary_sum_delta(const MarkovChain& m, const PatternGraph& f) {
    Rational s(0);
    for (auto& [vw, x] : m.p) {
        if (!f.has_vertex(vw.first)) continue;
        if (f.has_edge(make_edge(f.ambient(), vw.first, vw.second))) continue;
        s += x;
    }
    return s;
}

ThresholdReport validate_threshold(const PatternGraph& g, const ThresholdWeighting& th) {
    std::size_t m = g.num_edges();
    if (m > 24) throw std::length_error("validate_threshold is exhaustive and needs |E| <= 24");
    if (g.num_vertices() > 64) throw std::length_error("validate_threshold supports at most 64 vertices");
    // common denominator so each subgraph costs a few integer ops
    std::int64_t l = 1;
    for (auto& e : g.edges()) l = std::lcm(l, th(e).den());
    std::vector<std::int64_t> w(m);
    std::vector<std::uint64_t> ends(m);
    const auto& vs = g.vertices();
    auto idx = [&](Vertex v) { return std::lower_bound(vs.begin(), vs.end(), v) - vs.begin(); };
    for (std::size_t i = 0; i < m; ++i) {
        Rational t = th(g.edges()[i]);
        w[i] = t.num() * (l / t.den());
        ends[i] = (std::uint64_t{1} << idx(g.edges()[i].u)) | (std::uint64_t{1} << idx(g.edges()[i].v));
    }
    ThresholdReport rep;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
        std::uint64_t vm = 0;
        std::int64_t s = 0;
        for (std::uint64_t r = mask; r; r &= r - 1) {
            int i = __builtin_ctzll(r);
            vm |= ends[i];
            s += w[i];
        }
        ++rep.checked;
        std::int64_t d = static_cast<std::int64_t>(__builtin_popcountll(vm)) * l - s;
        if (d < 0) {
            rep.ok = false;
            rep.witness = edge_subset(g, mask);
            rep.witness_delta = Rational(d, l);
            rep.reason = "negative deficiency";
            return rep;
        }
    }
    rep.total_delta = delta(g, th);
    if (!rep.total_delta.is_zero()) {
        rep.ok = false;
        rep.witness = g;
        rep.witness_delta = rep.total_delta;
        rep.reason = "deficiency of the whole graph is not zero";
    }
    return rep;
}

ColoredInstance sample_instance(const PatternGraph& g, const ThresholdWeighting& th, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    ColoredInstance inst;
    inst.n = n;
    inst.pattern = g;
    inst.seed = seed;
    inst.pairs.resize(g.num_edges());
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        double p = std::pow(static_cast<double>(n), -th(g.edges()[e]).to_double());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::uint64_t h = hash_seq(seed, {e, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
                if (to_unit(h) < p) inst.pairs[e].push_back({i, j});
            }
    }
    return inst;
}

bool solve_sub(const ColoredInstance& inst) {
    const PatternGraph& g = inst.pattern;
    const int n = inst.n;
    const auto& vs = g.vertices();
    const int nv = static_cast<int>(vs.size());
    if (static_cast<long>(nv) * n > 10000) throw std::length_error("solve_sub instance too large");
    if (g.num_edges() == 0) return n > 0 || nv == 0;
    auto idx = [&](Vertex v) { return static_cast<int>(std::lower_bound(vs.begin(), vs.end(), v) - vs.begin()); };

    struct Arc {
        int other;
        int edge;
        bool forward;  // this vertex is the edge's u side
    };
    std::vector<std::vector<Arc>> arcs(nv);
    std::vector<std::unordered_set<std::uint64_t>> present(g.num_edges());
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        int a = idx(g.edges()[e].u), b = idx(g.edges()[e].v);
        arcs[a].push_back({b, static_cast<int>(e), true});
        arcs[b].push_back({a, static_cast<int>(e), false});
        for (auto [i, j] : inst.pairs[e]) present[e].insert(static_cast<std::uint64_t>(i) * n + j);
    }

    // greedy min-degree elimination; assign in reverse elimination order
    std::vector<int> order;
    {
        std::vector<std::uint64_t> adj(nv, 0);
        for (int v = 0; v < nv; ++v)
            for (auto& a : arcs[v]) adj[v] |= std::uint64_t{1} << a.other;
        std::vector<bool> gone(nv, false);
        for (int step = 0; step < nv; ++step) {
            int best = -1, bd = 1 << 30;
            for (int v = 0; v < nv; ++v)
                if (!gone[v] && __builtin_popcountll(adj[v]) < bd) {
                    bd = __builtin_popcountll(adj[v]);
                    best = v;
                }
            gone[best] = true;
            order.push_back(best);
            std::uint64_t nb = adj[best];
            for (int u = 0; u < nv; ++u)
                if (nb >> u & 1) adj[u] = (adj[u] | nb) & ~(std::uint64_t{1} << u) & ~(std::uint64_t{1} << best);
        }
        std::reverse(order.begin(), order.end());
    }

    std::vector<int> val(nv, -1);
    auto ok = [&](int v, int x) {
        for (auto& a : arcs[v]) {
            int y = val[a.other];
            if (y < 0) continue;
            std::uint64_t key = a.forward ? static_cast<std::uint64_t>(x) * n + y : static_cast<std::uint64_t>(y) * n + x;
            if (!present[a.edge].count(key)) return false;
        }
        return true;
    };
    std::function<bool(int)> go = [&](int pos) {
        if (pos == nv) return true;
        int v = order[pos];
        for (int x = 0; x < n; ++x) {
            if (!ok(v, x)) continue;
            val[v] = x;
            if (go(pos + 1)) return true;
            val[v] = -1;
        }
        return false;
    };
    return go(0);
}

}  // namespace phikit
