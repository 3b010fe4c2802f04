#include "phikit/potential.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace phikit {

const char* rule_name(Rule r) {
    switch (r) {
        case Rule::Atomic:
            return "atomic";
        case Rule::Dagger:
            return "dagger";
        case Rule::InvDagger:
            return "inv-dagger";
        case Rule::DDagger:
            return "ddagger";
    }
    return "?";
}

PhiEvaluator::PhiEvaluator(const JoinTree& a, const ThresholdWeighting& th, std::uint64_t state_cap)
    : a_(a), th_(th), cap_(state_cap) {
    PatternGraph g = a.graph();
    edges_ = g.edges();
    verts_ = g.vertices();
    if (edges_.size() > 64 || verts_.size() > 64)
        throw std::length_error("Φ evaluator supports at most 64 edges and 64 vertices");
    auto vidx = [&](Vertex v) { return std::lower_bound(verts_.begin(), verts_.end(), v) - verts_.begin(); };
    std::size_t m = edges_.size();
    ends_.resize(m);
    adj_.assign(m, 0);
    w_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        ends_[i] = (std::uint64_t{1} << vidx(edges_[i].u)) | (std::uint64_t{1} << vidx(edges_[i].v));
        lcd_ = std::lcm(lcd_, th(edges_[i]).den());
    }
    for (std::size_t i = 0; i < m; ++i) {
        Rational t = th(edges_[i]);
        w_[i] = t.num() * (lcd_ / t.den());
        for (std::size_t j = 0; j < m; ++j)
            if (i != j && (ends_[i] & ends_[j])) adj_[i] |= std::uint64_t{1} << j;
    }
    int n = a.num_nodes();
    emask_.assign(n, 0);
    vfull_.assign(n, 0);
    for (int v = 0; v < n; ++v) {
        const JTNode& x = a.node(v);
        if (x.leaf()) {
            if (x.label) {
                auto it = std::lower_bound(edges_.begin(), edges_.end(), *x.label);
                emask_[v] = std::uint64_t{1} << (it - edges_.begin());
            }
        } else {
            emask_[v] = emask_[x.left] | emask_[x.right];
        }
        vfull_[v] = vertex_mask(emask_[v]);
    }
    memo_.resize(n);
    memo_cond_.resize(n);
}

std::uint64_t PhiEvaluator::vertex_mask(std::uint64_t emask) const {
    std::uint64_t v = 0;
    for (; emask; emask &= emask - 1) v |= ends_[__builtin_ctzll(emask)];
    return v;
}

std::uint64_t PhiEvaluator::vertex_mask_of(const VertexSet& s) const {
    std::uint64_t m = 0;
    for (auto x : s) {
        auto it = std::lower_bound(verts_.begin(), verts_.end(), x);
        if (it != verts_.end() && *it == x) m |= std::uint64_t{1} << (it - verts_.begin());
    }
    return m;
}

const std::vector<std::pair<std::uint64_t, std::uint64_t>>& PhiEvaluator::comps(std::uint64_t emask) {
    auto it = comp_cache_.find(emask);
    if (it != comp_cache_.end()) return it->second;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    std::uint64_t rest = emask;
    while (rest) {
        std::uint64_t comp = rest & (~rest + 1), frontier = comp;
        while (frontier) {
            std::uint64_t nb = 0;
            for (std::uint64_t f = frontier; f; f &= f - 1) nb |= adj_[__builtin_ctzll(f)];
            nb &= emask & ~comp;
            comp |= nb;
            frontier = nb;
        }
        rest &= ~comp;
        out.push_back({comp, vertex_mask(comp)});
    }
    return comp_cache_.emplace(emask, std::move(out)).first->second;
}

std::uint64_t PhiEvaluator::restrict_mask(std::uint64_t emask, std::uint64_t vmask) {
    if (!emask || !vmask) return emask;
    std::uint64_t out = 0;
    for (auto& [e, v] : comps(emask))
        if (!(v & vmask)) out |= e;
    return out;
}

Rational PhiEvaluator::delta_mask(std::uint64_t emask) const {
    if (!emask) return Rational(0);
    std::int64_t s = 0;
    std::uint64_t vm = 0;
    for (; emask; emask &= emask - 1) {
        int i = __builtin_ctzll(emask);
        s += w_[i];
        vm |= ends_[i];
    }
    return Rational(static_cast<std::int64_t>(__builtin_popcountll(vm)) * lcd_ - s, lcd_);
}

PatternGraph PhiEvaluator::graph_of(std::uint64_t emask) const {
    std::vector<Edge> es;
    for (; emask; emask &= emask - 1) es.push_back(edges_[__builtin_ctzll(emask)]);
    return PatternGraph(a_.ambient(), std::move(es));
}

void PhiEvaluator::bump() {
    if (++states_ > cap_) throw std::length_error("Φ memo exceeds the state cap");
}

const PhiEvaluator::Entry& PhiEvaluator::eval(int node, std::uint64_t r) {
    r &= emask_[node];
    auto& memo = memo_[node];
    if (auto it = memo.find(r); it != memo.end()) return it->second;
    Entry best;
    const JTNode& x = a_.node(node);
    if (x.leaf() || !r) {
        best.v = x.leaf() ? delta_mask(r) : Rational(0);
        best.c.rule = Rule::Atomic;
    } else {
        const Rational half(1, 2);
        bool first = true;
        auto offer = [&](const Rational& v, Choice c) {
            if (first || best.v < v) {
                best.v = v;
                best.c = c;
                first = false;
            }
        };
        for (int side = 0; side < 2; ++side) {
            int b = side ? x.right : x.left;
            int c = side ? x.left : x.right;
            std::uint64_t rc = r & emask_[c];
            std::uint64_t vc = vertex_mask(rc);
            int lo = b - a_.node(b).size + 1;
            for (int d = lo - 1; d <= b; ++d) {
                int dn = d < lo ? -1 : d;
                std::uint64_t rd = dn < 0 ? 0 : r & emask_[dn];
                std::uint64_t vd = vertex_mask(rd);
                Rational v = (dn < 0 ? Rational(0) : eval(dn, rd).v) + delta_mask(restrict_mask(rc, vd)) +
                             delta_mask(restrict_mask(r, vc | vd));
                offer(v, Choice{Rule::Dagger, side == 1, dn, -1});
            }
        }
        const Rational dr = delta_mask(r);
        int lo = node - x.size + 1;
        for (int d = lo - 1; d < node; ++d) {
            int dn = d < lo ? -1 : d;
            std::uint64_t rd = dn < 0 ? 0 : r & emask_[dn];
            std::uint64_t vd = vertex_mask(rd);
            Rational pd = dn < 0 ? Rational(0) : eval(dn, rd).v;
            for (int e = lo - 1; e < node; ++e) {
                int en = e < lo ? -1 : e;
                std::uint64_t re = en < 0 ? 0 : r & emask_[en];
                std::uint64_t ve = vertex_mask(re);
                Rational pe = en < 0 ? Rational(0) : eval(en, restrict_mask(re, vd)).v;
                Rational v = half * (pd + pe + dr + delta_mask(restrict_mask(r, vd | ve)));
                offer(v, Choice{Rule::DDagger, false, dn, en});
            }
        }
    }
    bump();
    return memo.emplace(r, best).first->second;
}

const PhiEvaluator::Entry& PhiEvaluator::eval_cond(int node, std::uint64_t s) {
    s &= vfull_[node];
    auto& memo = memo_cond_[node];
    if (auto it = memo.find(s); it != memo.end()) return it->second;
    Entry best;
    const JTNode& x = a_.node(node);
    const std::uint64_t ea = emask_[node];
    if (x.leaf()) {
        best.v = delta_mask(restrict_mask(ea, s));
        best.c.rule = Rule::Atomic;
    } else {
        bool first = true;
        auto offer = [&](const Rational& v, Choice c) {
            if (first || best.v < v) {
                best.v = v;
                best.c = c;
                first = false;
            }
        };
        for (int side = 0; side < 2; ++side) {
            int b = side ? x.right : x.left;
            int c = side ? x.left : x.right;
            // (†): Φ(B|S) + Δ(C|S ∪ B)
            offer(eval_cond(b, s).v + delta_mask(restrict_mask(emask_[c], s | vfull_[b])),
                  Choice{Rule::Dagger, side == 1, b, -1});
            // (inverted †): Δ(B|S) + Φ(C|S ∪ B)
            offer(delta_mask(restrict_mask(emask_[b], s)) + eval_cond(c, s | vfull_[b]).v,
                  Choice{Rule::InvDagger, side == 1, c, -1});
        }
        const Rational das = delta_mask(restrict_mask(ea, s));
        const Rational half(1, 2);
        for (int d = node - x.size + 1; d < node; ++d) {
            if ((vfull_[d] & ~s) == 0) continue;
            Rational v = half * (eval_cond(d, s).v + eval_cond(node, s | vfull_[d]).v + das);
            offer(v, Choice{Rule::DDagger, false, d, -1});
        }
    }
    bump();
    return memo.emplace(s, best).first->second;
}

Rational PhiEvaluator::phi() { return a_.empty() ? Rational(0) : eval(a_.root(), emask_[a_.root()]).v; }

Rational PhiEvaluator::phi_restricted(const VertexSet& s) {
    if (a_.empty()) return Rational(0);
    int r = a_.root();
    return eval(r, restrict_mask(emask_[r], vertex_mask_of(s))).v;
}

Rational PhiEvaluator::phi_at(int node, std::uint64_t retained) {
    if (node < 0) return Rational(0);
    return eval(node, retained).v;
}

Rational PhiEvaluator::phi_cond(const VertexSet& s) {
    return a_.empty() ? Rational(0) : eval_cond(a_.root(), vertex_mask_of(s)).v;
}

Rational PhiEvaluator::phi_cond_at(int node, std::uint64_t s) {
    if (node < 0) return Rational(0);
    return eval_cond(node, s).v;
}

std::string PhiEvaluator::mask_str_e(std::uint64_t m) const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (; m; m &= m - 1) {
        if (!first) os << ',';
        first = false;
        os << edge_str(a_.ambient(), edges_[__builtin_ctzll(m)]);
    }
    os << '}';
    return os.str();
}

std::string PhiEvaluator::mask_str_v(std::uint64_t m) const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (; m; m &= m - 1) {
        if (!first) os << ',';
        first = false;
        os << vertex_str(a_.ambient(), verts_[__builtin_ctzll(m)]);
    }
    os << '}';
    return os.str();
}

namespace {
constexpr std::size_t kTraceLimit = 200000;
}

void PhiEvaluator::trace_rec(int node, std::uint64_t r, std::vector<TraceStep>& out) {
    if (node < 0 || out.size() >= kTraceLimit) return;
    r &= emask_[node];
    const Entry& en = eval(node, r);
    TraceStep st{en.c.rule, node, "", en.c.d, en.c.e, mask_str_e(r), en.v};
    if (en.c.rule == Rule::Dagger) st.side = en.c.side_c ? "C" : "B";
    out.push_back(st);
    if (en.c.rule == Rule::Dagger) {
        if (en.c.d >= 0) trace_rec(en.c.d, r & emask_[en.c.d], out);
    } else if (en.c.rule == Rule::DDagger) {
        std::uint64_t rd = en.c.d < 0 ? 0 : r & emask_[en.c.d];
        if (en.c.d >= 0) trace_rec(en.c.d, rd, out);
        if (en.c.e >= 0) trace_rec(en.c.e, restrict_mask(r & emask_[en.c.e], vertex_mask(rd)), out);
    }
}

std::vector<TraceStep> PhiEvaluator::trace_phi() {
    std::vector<TraceStep> out;
    if (!a_.empty()) trace_rec(a_.root(), emask_[a_.root()], out);
    return out;
}

void PhiEvaluator::trace_cond_rec(int node, std::uint64_t s, std::vector<TraceStep>& out, int budget) {
    if (node < 0 || out.size() >= kTraceLimit || budget <= 0) return;
    s &= vfull_[node];
    const Entry& en = eval_cond(node, s);
    TraceStep st{en.c.rule, node, "", en.c.d, en.c.e, mask_str_v(s), en.v};
    if (en.c.rule == Rule::Dagger || en.c.rule == Rule::InvDagger) st.side = en.c.side_c ? "C" : "B";
    out.push_back(st);
    const JTNode& x = a_.node(node);
    if (en.c.rule == Rule::Dagger) {
        trace_cond_rec(en.c.d, s, out, budget - 1);
    } else if (en.c.rule == Rule::InvDagger) {
        int b = en.c.side_c ? x.right : x.left;
        trace_cond_rec(en.c.d, s | vfull_[b], out, budget - 1);
    } else if (en.c.rule == Rule::DDagger) {
        trace_cond_rec(en.c.d, s, out, budget - 1);
        trace_cond_rec(node, s | vfull_[en.c.d], out, budget - 1);
    }
}

std::vector<TraceStep> PhiEvaluator::trace_phi_cond(const VertexSet& s) {
    std::vector<TraceStep> out;
    if (!a_.empty()) trace_cond_rec(a_.root(), vertex_mask_of(s), out, 4 * a_.num_nodes() + 64);
    return out;
}

void PhiEvaluator::expand(int node, std::uint64_t r, const Rational& w, std::map<std::uint64_t, Rational>& out) {
    if (node < 0) return;
    r &= emask_[node];
    if (!r) return;
    const Entry& en = eval(node, r);
    auto add = [&](std::uint64_t f, const Rational& c) {
        if (f) out[f] += c;
    };
    const JTNode& x = a_.node(node);
    switch (en.c.rule) {
        case Rule::Atomic:
            add(r, w);
            break;
        case Rule::Dagger: {
            int c = en.c.side_c ? x.left : x.right;
            std::uint64_t rd = en.c.d < 0 ? 0 : r & emask_[en.c.d];
            std::uint64_t rc = r & emask_[c];
            std::uint64_t vd = vertex_mask(rd);
            expand(en.c.d, rd, w, out);
            add(restrict_mask(rc, vd), w);
            add(restrict_mask(r, vertex_mask(rc) | vd), w);
            break;
        }
        case Rule::DDagger: {
            Rational h = w * Rational(1, 2);
            std::uint64_t rd = en.c.d < 0 ? 0 : r & emask_[en.c.d];
            std::uint64_t re = en.c.e < 0 ? 0 : r & emask_[en.c.e];
            std::uint64_t vd = vertex_mask(rd);
            expand(en.c.d, rd, h, out);
            expand(en.c.e, restrict_mask(re, vd), h, out);
            add(r, h);
            add(restrict_mask(r, vd | vertex_mask(re)), h);
            break;
        }
        case Rule::InvDagger:
            throw std::logic_error("inverted dagger does not occur in Φ(A)");
    }
}

std::map<std::uint64_t, Rational> PhiEvaluator::decompose() {
    std::map<std::uint64_t, Rational> out;
    if (!a_.empty()) expand(a_.root(), emask_[a_.root()], Rational(1), out);
    return out;
}

PotentialValue phi(const JoinTree& a, const ThresholdWeighting& th, bool trace) {
    PhiEvaluator ev(a, th);
    PotentialValue pv{ev.phi(), {}};
    if (trace) pv.trace = ev.trace_phi();
    return pv;
}

PotentialValue phi_cond(const JoinTree& a, const VertexSet& s, const ThresholdWeighting& th, bool trace) {
    PhiEvaluator ev(a, th);
    PotentialValue pv{ev.phi_cond(s), {}};
    if (trace) pv.trace = ev.trace_phi_cond(s);
    return pv;
}

Decomposition phi_decompose(const JoinTree& a, const ThresholdWeighting& th) {
    PhiEvaluator ev(a, th);
    Decomposition d;
    d.phi = ev.phi();
    auto coeffs = ev.decompose();
    std::vector<Rational> mass(ev.num_vertices(), Rational(0));
    for (auto& [f, c] : coeffs) {
        if (c.is_zero()) continue;
        d.terms.push_back({ev.graph_of(f), c});
        d.reconstructed += c * ev.delta_mask(f);
        for (std::uint64_t vm = ev.vertex_mask(f); vm; vm &= vm - 1) mass[__builtin_ctzll(vm)] += c;
    }
    for (auto& m : mass) d.max_vertex_mass = rmax(d.max_vertex_mass, m);
    if (d.reconstructed != d.phi)
        throw std::logic_error("decomposition does not reconstruct Φ: " + d.reconstructed.str() + " vs " + d.phi.str());
    if (d.max_vertex_mass > Rational(1))
        throw std::logic_error("decomposition vertex mass exceeds 1: " + d.max_vertex_mass.str());
    return d;
}

namespace {

std::vector<JoinTree> canonical_family(const PatternGraph& f) {
    std::vector<JoinTree> out;
    if (f.ambient() == Ambient::PInf) {
        auto es = f.edges();
        if (!es.empty() && is_connected(f)) {
            std::int64_t lo = es.front().u, hi = es.back().v;
            out.push_back(jointree_rd(lo, hi));
            out.push_back(jointree_fo(lo, hi));
            if (hi - lo <= 16) out.push_back(jointree_mo(lo, hi));
        }
    } else {
        for (int k = 1; k <= 10; ++k)
            if (f == build_complete_binary_tree(k)) out.push_back(canonical_tk(k));
    }
    if (out.empty()) throw std::invalid_argument("no canonical join-tree for this graph");
    return out;
}

}  // namespace

MinPhiResult min_phi_over_jointrees(const PatternGraph& f, const ThresholdWeighting& th, TreeMode mode, bool cond,
                                    std::uint64_t seed, int samples) {
    MinPhiResult res;
    bool have = false;
    auto consider = [&](const JoinTree& t) {
        PhiEvaluator ev(t, th);
        Rational v = cond ? ev.phi_cond({}) : ev.phi();
        ++res.trees;
        if (!have || v < res.value) {
            res.value = v;
            res.argmin = t;
            have = true;
        }
        return true;
    };
    if (f.num_edges() == 0) {
        res.argmin = JoinTree(f.ambient());
        return res;
    }
    switch (mode) {
        case TreeMode::Exhaustive:
            if (f.num_edges() > 7) throw std::length_error("exhaustive join-tree search needs |E| <= 7");
            enumerate_minimal_jointrees(f, consider);
            break;
        case TreeMode::Canonical:
            for (auto& t : canonical_family(f)) consider(t);
            break;
        case TreeMode::Sampled:
            for (int i = 0; i < samples; ++i) consider(random_jointree(f, split_seed(seed, i)));
            break;
    }
    return res;
}

MinPhiResult kappa_fixed_theta(const PatternGraph& g, const ThresholdWeighting& th) {
    if (g.num_edges() > 7) throw std::length_error("κ search needs |E| <= 7");
    MinPhiResult res;
    bool have = false;
    if (g.num_edges() == 0) {
        res.argmin = JoinTree(g.ambient());
        return res;
    }
    enumerate_minimal_jointrees(g, [&](const JoinTree& t) {
        Rational worst(0);
        for (int v = 0; v < t.num_nodes(); ++v) worst = rmax(worst, delta(t.graph_at(v), th));
        ++res.trees;
        if (!have || worst < res.value) {
            res.value = worst;
            res.argmin = t;
            have = true;
        }
        return true;
    });
    return res;
}

}  // namespace phikit
