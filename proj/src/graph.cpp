#include "phikit/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace phikit {

const char* ambient_name(Ambient a) { return a == Ambient::PInf ? "Pinf" : "Tinf"; }

std::string vertex_str(Ambient a, Vertex v) {
    if (a == Ambient::PInf) return std::to_string(v);
    return "(" + std::to_string(tlevel(v)) + "," + std::to_string(tindex(v)) + ")";
}

bool is_ambient_edge(Ambient a, Vertex x, Vertex y) {
    if (a == Ambient::PInf) return x - y == 1 || y - x == 1;
    if (x < 0 || y < 0) return false;
    return tparent(x) == y || tparent(y) == x;
}

Edge make_edge(Ambient a, Vertex x, Vertex y) {
    if (!is_ambient_edge(a, x, y))
        throw std::invalid_argument("not an edge of " + std::string(ambient_name(a)) + ": " + vertex_str(a, x) + "-" +
                                    vertex_str(a, y));
    return x < y ? Edge{x, y} : Edge{y, x};
}

std::string edge_str(Ambient a, const Edge& e) { return vertex_str(a, e.u) + "-" + vertex_str(a, e.v); }

VertexSet make_vertex_set(std::vector<Vertex> vs) {
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

bool vs_contains(const VertexSet& s, Vertex v) { return std::binary_search(s.begin(), s.end(), v); }

VertexSet vs_union(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool vs_intersects(const VertexSet& a, const VertexSet& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return true;
        if (*i < *j) ++i; else ++j;
    }
    return false;
}

bool vs_subset(const VertexSet& a, const VertexSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

PatternGraph::PatternGraph(Ambient a, std::vector<Edge> edges) : amb_(a), edges_(std::move(edges)) { finish({}); }

PatternGraph::PatternGraph(Ambient a, std::vector<Edge> edges, VertexSet extra)
    : amb_(a), edges_(std::move(edges)), isolated_(true) {
    finish(std::move(extra));
}

void PatternGraph::finish(VertexSet extra) {
    for (auto& e : edges_) e = make_edge(amb_, e.u, e.v);
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    std::vector<Vertex> vs = std::move(extra);
    vs.reserve(vs.size() + 2 * edges_.size());
    for (auto& e : edges_) {
        vs.push_back(e.u);
        vs.push_back(e.v);
    }
    verts_ = make_vertex_set(std::move(vs));
}

bool PatternGraph::has_edge(const Edge& e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }

PatternGraph graph_union(const PatternGraph& a, const PatternGraph& b) {
    std::vector<Edge> es = a.edges();
    es.insert(es.end(), b.edges().begin(), b.edges().end());
    return PatternGraph(a.ambient(), std::move(es));
}

PatternGraph graph_intersection(const PatternGraph& a, const PatternGraph& b) {
    std::vector<Edge> es;
    std::set_intersection(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end(), std::back_inserter(es));
    return PatternGraph(a.ambient(), std::move(es));
}

PatternGraph edge_subset(const PatternGraph& g, std::uint64_t mask) {
    std::vector<Edge> es;
    for (std::size_t i = 0; i < g.num_edges(); ++i)
        if (mask >> i & 1) es.push_back(g.edges()[i]);
    return PatternGraph(g.ambient(), std::move(es));
}

bool is_subgraph(const PatternGraph& a, const PatternGraph& b) {
    return std::includes(b.edges().begin(), b.edges().end(), a.edges().begin(), a.edges().end()) &&
           vs_subset(a.vertices(), b.vertices());
}

PatternGraph build_path_range(std::int64_t i, std::int64_t j) {
    if (j <= i) throw std::invalid_argument("path needs i < j");
    std::vector<Edge> es;
    for (std::int64_t x = i; x < j; ++x) es.push_back({x, x + 1});
    return PatternGraph(Ambient::PInf, std::move(es));
}

PatternGraph build_path(int k) {
    if (k < 1) throw std::invalid_argument("P_k needs k >= 1");
    return build_path_range(0, k);
}

PatternGraph subtree_at(Vertex x) {
    std::vector<Edge> es;
    int k = tlevel(x);
    std::int64_t base = tindex(x);
    for (int j = 0; j < k; ++j) {
        std::int64_t width = std::int64_t{1} << (k - j);
        for (std::int64_t i = base * width; i < (base + 1) * width; ++i) es.push_back({tv(j, i), tv(j + 1, i >> 1)});
    }
    if (k == 0) return PatternGraph(Ambient::TInf, {}, {x});
    return PatternGraph(Ambient::TInf, std::move(es));
}

PatternGraph subtree_plus(Vertex x) {
    PatternGraph t = subtree_at(x);
    std::vector<Edge> es = t.edges();
    es.push_back({x, tparent(x)});
    return PatternGraph(Ambient::TInf, std::move(es));
}

PatternGraph build_complete_binary_tree(int k) {
    if (k < 1) throw std::invalid_argument("T_k needs k >= 1");
    return subtree_at(tv(k, 0));
}

namespace {

struct Dsu {
    std::vector<int> p;
    explicit Dsu(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

int index_of(const VertexSet& vs, Vertex v) {
    return static_cast<int>(std::lower_bound(vs.begin(), vs.end(), v) - vs.begin());
}

}  // namespace

std::vector<PatternGraph> components(const PatternGraph& f) {
    const auto& vs = f.vertices();
    Dsu d(vs.size());
    for (auto& e : f.edges()) d.unite(index_of(vs, e.u), index_of(vs, e.v));
    std::map<int, std::pair<std::vector<Edge>, VertexSet>> groups;
    for (auto& e : f.edges()) groups[d.find(index_of(vs, e.u))].first.push_back(e);
    for (std::size_t i = 0; i < vs.size(); ++i) groups[d.find(static_cast<int>(i))].second.push_back(vs[i]);
    std::vector<PatternGraph> out;
    for (auto& [root, g] : groups) {
        if (g.first.empty())
            out.emplace_back(f.ambient(), std::vector<Edge>{}, g.second);
        else
            out.emplace_back(f.ambient(), std::move(g.first));
    }
    std::sort(out.begin(), out.end(),
              [](const PatternGraph& a, const PatternGraph& b) { return a.vertices().front() < b.vertices().front(); });
    return out;
}

bool is_connected(const PatternGraph& f) { return components(f).size() <= 1; }

PatternGraph restrict_away(const PatternGraph& f, const VertexSet& s) {
    if (s.empty()) return f;
    std::vector<Edge> es;
    VertexSet iso;
    for (auto& c : components(f)) {
        if (vs_intersects(c.vertices(), s)) continue;
        es.insert(es.end(), c.edges().begin(), c.edges().end());
        if (c.num_edges() == 0) iso.insert(iso.end(), c.vertices().begin(), c.vertices().end());
    }
    if (f.allows_isolated()) return PatternGraph(f.ambient(), std::move(es), make_vertex_set(iso));
    return PatternGraph(f.ambient(), std::move(es));
}

PatternGraph induced_on(const PatternGraph& f, const VertexSet& t) {
    std::vector<Edge> es;
    for (auto& e : f.edges())
        if (vs_contains(t, e.u) && vs_contains(t, e.v)) es.push_back(e);
    return PatternGraph(f.ambient(), std::move(es));
}

int boundary_size(const PatternGraph& f) {
    int count = 0;
    for (Vertex v : f.vertices()) {
        bool outside = false;
        if (f.ambient() == Ambient::PInf) {
            outside = !f.has_edge({v - 1, v}) || !f.has_edge({v, v + 1});
        } else {
            outside = !f.has_edge({v, tparent(v)});
            if (!outside && tlevel(v) > 0)
                outside = !f.has_edge({tchild(v, 0), v}) || !f.has_edge({tchild(v, 1), v});
        }
        if (outside) ++count;
    }
    return count;
}

int max_complete_height(const PatternGraph& f) {
    if (f.ambient() != Ambient::TInf) throw std::invalid_argument("max_complete_height is defined on T_inf");
    // full[v] <=> T_v ⊆ F; vertices visited level by level from the bottom
    std::unordered_map<Vertex, bool> full;
    VertexSet vs = f.vertices();
    std::sort(vs.begin(), vs.end());  // level is the high part of the key, so this is bottom-up
    int best = 0;
    for (Vertex v : vs) {
        bool ok;
        if (tlevel(v) == 0) {
            ok = true;
        } else {
            ok = true;
            for (int s = 0; s < 2 && ok; ++s) {
                Vertex c = tchild(v, s);
                auto it = full.find(c);
                ok = f.has_edge({c, v}) && it != full.end() && it->second;
            }
        }
        full[v] = ok;
        if (ok) best = std::max(best, tlevel(v));
    }
    return best;
}

int longest_component_length(const PatternGraph& f) {
    int best = 0;
    for (auto& c : components(f)) best = std::max(best, static_cast<int>(c.num_edges()));
    return best;
}

bool is_grounded(const PatternGraph& f) {
    if (f.ambient() != Ambient::TInf || f.empty() || !is_connected(f)) return false;
    for (Vertex v : f.vertices())
        if (tlevel(v) == 0) return true;
    return false;
}

bool is_ungrounded(const PatternGraph& f) {
    if (f.ambient() != Ambient::TInf || f.empty() || !is_connected(f)) return false;
    for (Vertex v : f.vertices())
        if (tlevel(v) == 0) return false;
    return true;
}

VertexSet PComponent::vertices() const {
    VertexSet out;
    std::int64_t lo = (kind == CompKind::Open || kind == CompKind::LeftInS) ? i + 1 : i;
    std::int64_t hi = (kind == CompKind::Open || kind == CompKind::RightInS) ? j - 1 : j;
    for (std::int64_t x = lo; x <= hi; ++x) out.push_back(x);
    return out;
}

std::string PComponent::str() const {
    bool l = kind == CompKind::Open || kind == CompKind::LeftInS;
    bool r = kind == CompKind::Open || kind == CompKind::RightInS;
    return std::string(l ? "(" : "[") + std::to_string(i) + "," + std::to_string(j) + (r ? ")" : "]");
}

std::vector<PComponent> decompose_components(const PatternGraph& f, const VertexSet& s) {
    if (f.ambient() != Ambient::PInf) throw std::invalid_argument("component decomposition is defined on P_inf");
    std::vector<PComponent> out;
    for (auto& c : components(f)) {
        if (c.num_edges() == 0) continue;
        std::int64_t l = c.vertices().front(), r = c.vertices().back();
        std::vector<std::int64_t> cuts{l};
        for (auto it = std::upper_bound(s.begin(), s.end(), l); it != s.end() && *it < r; ++it) cuts.push_back(*it);
        cuts.push_back(r);
        for (std::size_t t = 0; t + 1 < cuts.size(); ++t) {
            std::int64_t a = cuts[t], b = cuts[t + 1];
            bool ina = vs_contains(s, a), inb = vs_contains(s, b);
            CompKind k = ina && inb ? CompKind::Open : ina ? CompKind::LeftInS : inb ? CompKind::RightInS : CompKind::Closed;
            out.push_back({k, a, b});
        }
    }
    return out;
}

SimpleGraph SimpleGraph::from_pattern(const PatternGraph& g) {
    SimpleGraph s;
    s.n = static_cast<int>(g.num_vertices());
    if (s.n > 64) throw std::length_error("graph too large for SimpleGraph (max 64 vertices)");
    s.adj.assign(s.n, 0);
    for (auto& e : g.edges()) s.add_edge(index_of(g.vertices(), e.u), index_of(g.vertices(), e.v));
    return s;
}

void SimpleGraph::add_edge(int a, int b) {
    adj[a] |= std::uint64_t{1} << b;
    adj[b] |= std::uint64_t{1} << a;
}

namespace {

struct TdSolver {
    const SimpleGraph& g;
    std::unordered_map<std::uint64_t, int> memo;

    std::uint64_t component_of(std::uint64_t set, int start) const {
        std::uint64_t comp = std::uint64_t{1} << start, frontier = comp;
        while (frontier) {
            int v = __builtin_ctzll(frontier);
            frontier &= frontier - 1;
            std::uint64_t nb = g.adj[v] & set & ~comp;
            comp |= nb;
            frontier |= nb;
        }
        return comp;
    }

    // vertex-count tree-depth of the subgraph induced on `set`
    int solve(std::uint64_t set) {
        if (set == 0) return 0;
        if ((set & (set - 1)) == 0) return 1;
        auto it = memo.find(set);
        if (it != memo.end()) return it->second;
        std::uint64_t comp = component_of(set, __builtin_ctzll(set));
        int res;
        if (comp != set) {
            res = 0;
            std::uint64_t rest = set;
            while (rest) {
                std::uint64_t c = component_of(rest, __builtin_ctzll(rest));
                res = std::max(res, solve(c));
                rest &= ~c;
            }
        } else {
            res = 64;
            for (std::uint64_t r = set; r; r &= r - 1) {
                int v = __builtin_ctzll(r);
                res = std::min(res, 1 + solve(set & ~(std::uint64_t{1} << v)));
            }
        }
        memo.emplace(set, res);
        return res;
    }
};

}  // namespace

int tree_depth(const SimpleGraph& g, int cap) {
    if (g.n > cap) throw std::length_error("tree_depth: " + std::to_string(g.n) + " vertices exceeds cap " + std::to_string(cap));
    if (g.n == 0) return 0;
    TdSolver s{g, {}};
    std::uint64_t all = g.n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << g.n) - 1;
    return std::max(0, s.solve(all) - 1);
}

int tree_depth(const PatternGraph& g, int cap) {
    if (static_cast<int>(g.num_vertices()) > cap)
        throw std::length_error("tree_depth: " + std::to_string(g.num_vertices()) + " vertices exceeds cap " + std::to_string(cap));
    return tree_depth(SimpleGraph::from_pattern(g), cap);
}

}  // namespace phikit
