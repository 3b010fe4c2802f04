#include "phikit/permprod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "phikit/rng.hpp"

namespace phikit {

namespace {

constexpr std::uint64_t kAlways = std::numeric_limits<std::uint64_t>::max();

std::uint64_t threshold(double p) {
    if (p >= 1.0) return kAlways;
    if (p <= 0.0) return 0;
    return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

int bit_width(int n) {
    int b = 1;
    while ((1LL << b) < static_cast<long long>(n) + 1) ++b;
    return b;  // ⌈log2(n+1)⌉, at least 1
}

struct NodePlan {
    std::vector<std::vector<double>> prob;  // per internal node, per coordinate of its interval
    std::vector<std::uint64_t> m;
    std::vector<double> log2_m;  // before clamping
};

// Sampling plan from the LP node profiles: T_{ℓ,h} keeps each element with
// probability n^{a_h - b_h}, or 1/2 when b_h = a_h.
NodePlan make_plan(const IntervalTree& it, const LpSolution& sol, int n, const SimParams& p) {
    if (sol.nodes.size() != it.nodes.size()) throw std::logic_error("LP node count mismatch");
    NodePlan plan;
    double logn = n > 1 ? std::log2(static_cast<double>(n)) : 0.0;
    double poly = n > 1 ? p.c * std::log2(logn) : 0.0;  // log2 of (log2 n)^c
    for (std::size_t t = 0; t < it.nodes.size(); ++t) {
        const NodeProfile& np = sol.nodes[t];
        std::vector<double> pr;
        double lg = 0;  // log2 of 1/Π p_h
        for (std::size_t i = 0; i < np.b.size(); ++i) {
            bool tie;
            double gap;
            if (!np.b_exact.empty()) {
                tie = np.b_exact[i] == np.a_exact[i];
                gap = (np.b_exact[i] - np.a_exact[i]).to_double();
            } else {
                gap = np.b[i] - np.a[i];
                tie = std::fabs(gap) < 1e-12;
            }
            double q;
            if (n == 1) {
                q = 1.0;  // [1] has a single element; nothing to thin out
            } else if (tie) {
                q = 0.5;
            } else {
                q = std::exp2(-gap * logn);
            }
            pr.push_back(q);
            lg -= std::log2(q);
        }
        double l2 = poly + lg;
        plan.log2_m.push_back(l2);
        double m = n > 1 ? std::ceil(std::exp2(l2) - 1e-9) : 1.0;
        if (!(m >= 1)) m = 1;
        if (m > static_cast<double>(p.max_samples)) m = static_cast<double>(p.max_samples);
        plan.m.push_back(static_cast<std::uint64_t>(m));
        plan.prob.push_back(std::move(pr));
    }
    return plan;
}

IntervalTree checked_tree(const JoinTree& tree, int k) {
    IntervalTree it = interval_tree(tree);
    if (it.lo != 0 || it.hi != k) throw std::invalid_argument("join-tree must cover P_{0,k}");
    return it;
}

}  // namespace

PermSequence PermSequence::random(int n, int k, std::uint64_t seed) {
    if (n < 1 || k < 1) throw std::invalid_argument("need n >= 1 and k >= 1");
    PermSequence ps;
    ps.n = n;
    for (int h = 0; h < k; ++h) {
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 0);
        Rng rng(split_seed(seed, h));
        for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng.below(i + 1)]);
        ps.pi.push_back(std::move(p));
    }
    return ps;
}

PermSequence PermSequence::identity(int n, int k) {
    PermSequence ps;
    ps.n = n;
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    ps.pi.assign(k, p);
    return ps;
}

void PermSequence::validate() const {
    if (n < 1) throw std::invalid_argument("n must be positive");
    for (const auto& p : pi) {
        if (static_cast<int>(p.size()) != n) throw std::invalid_argument("permutation has the wrong length");
        std::vector<char> seen(n, 0);
        for (int v : p) {
            if (v < 0 || v >= n || seen[v]) throw std::invalid_argument("not a permutation");
            seen[v] = 1;
        }
    }
}

std::vector<int> compose_direct(const PermSequence& ps) {
    std::vector<int> out(ps.n);
    std::iota(out.begin(), out.end(), 0);
    for (const auto& p : ps.pi)
        for (int& v : out) v = p[v];
    return out;
}

const char* iso_name(IsoKind k) {
    switch (k) {
        case IsoKind::NotIsolated: return "not-isolated";
        case IsoKind::Isolated: return "isolated";
        case IsoKind::Inconsistent: return "inconsistent";
    }
    return "?";
}

// A rectangle over [lo, hi]. The root is either explicit or hash-sampled;
// deeper ones are hash-thinned copies of their parent.
struct PermProdSim::Rect {
    const Rect* parent = nullptr;
    std::uint64_t seed = 0;
    std::int64_t lo = 0, hi = 0;
    const std::uint64_t* thr = nullptr;
    std::vector<std::vector<std::uint8_t>> member;  // explicit root only
    mutable std::map<std::pair<std::int64_t, std::int64_t>, std::vector<int>> memo;

    bool own(std::int64_t h, int v) const {
        if (!member.empty()) return member[h][v];
        std::uint64_t th = thr[h - lo];
        return th == kAlways || hash_seq(seed, {static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(v)}) < th;
    }

    // ids of the paths whose coordinates in [u, v] all lie in this rectangle
    const std::vector<int>& paths(const std::vector<std::vector<int>>& path, std::int64_t u, std::int64_t v) const {
        auto key = std::make_pair(u, v);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        std::vector<int> out;
        auto keep = [&](int g) {
            for (std::int64_t h = u; h <= v; ++h)
                if (!own(h, path[g][h])) return false;
            return true;
        };
        if (parent) {
            for (int g : parent->paths(path, u, v))
                if (keep(g)) out.push_back(g);
        } else {
            for (int g = 0; g < static_cast<int>(path.size()); ++g)
                if (keep(g)) out.push_back(g);
        }
        return memo.emplace(key, std::move(out)).first->second;
    }
};

struct PermProdSim::Eval {
    std::uint64_t samples = 0, evaluations = 0;
    std::vector<std::uint64_t> level;
};

PermProdSim::PermProdSim(const JoinTree& tree, const Profile& a, const PermSequence& ps, const SimParams& p)
    : tree_(tree), a_(a), ps_(ps), p_(p) {
    ps_.validate();
    it_ = checked_tree(tree_, ps_.k());
    if (static_cast<int>(a_.size()) != ps_.k() + 1) throw std::invalid_argument("profile length must be k+1");
    if (!in_profile_space(a_)) throw std::invalid_argument("profile is not in 𝒫(k)");
    bits_ = bit_width(ps_.n);

    int n = ps_.n, k = ps_.k();
    path_.assign(n, std::vector<int>(k + 1));
    at_.assign(k + 1, std::vector<int>(n));
    for (int g = 0; g < n; ++g) {
        int v = g;
        for (int h = 0; h <= k; ++h) {
            path_[g][h] = v;
            at_[h][v] = g;
            if (h < k) v = ps_.pi[h][v];
        }
    }

    if (it_.nodes.empty()) return;  // k = 1: the root is a single atom, nothing is sampled
    LpSolution sol = chi_lp(tree_, a_);
    if (sol.status != "optimal") throw std::runtime_error("χ LP did not solve: " + sol.status);
    NodePlan plan = make_plan(it_, sol, n, p_);
    prob_ = plan.prob;
    m_ = plan.m;
    for (const auto& pr : prob_) {
        std::vector<std::uint64_t> th;
        for (double q : pr) th.push_back(threshold(q));
        thr_.push_back(std::move(th));
    }
}

// atom {h-1, h}: one gate per pair (x, π_h(x)) in T_{h-1} × T_h, bits OR-ed
bool PermProdSim::atom_gate(const std::vector<int>& xs, std::int64_t lo, std::int64_t hi,
                            std::vector<std::uint32_t>& g) const {
    const std::uint32_t full = static_cast<std::uint32_t>((1ULL << bits_) - 1);
    std::uint32_t x1 = 0, x0 = 0, y1 = 0, y0 = 0;
    for (int gid : xs) {
        std::uint32_t x = path_[gid][lo], y = path_[gid][hi];
        x1 |= x;
        x0 |= ~x & full;
        y1 |= y;
        y0 |= ~y & full;
    }
    g = {x1, y1};
    return !xs.empty() && !(x1 & x0) && !(y1 & y0);
}

void PermProdSim::eval(int t, const Rect& r, const std::vector<int>& xs, Eval& ev, int depth,
                       std::vector<std::uint32_t>& g, bool& f, bool& conflict) const {
    const IntervalNode& nd = it_.nodes[t];
    const std::int64_t lo = nd.lo, hi = nd.hi;
    const std::uint32_t full = static_cast<std::uint32_t>((1ULL << bits_) - 1);
    ++ev.evaluations;
    if (static_cast<int>(ev.level.size()) <= depth) ev.level.resize(depth + 1, 0);
    ev.level[depth] += xs.size();

    g.assign(hi - lo + 1, 0);
    f = false;
    conflict = false;
    if (xs.empty()) return;  // f = 1 forces a path inside the rectangle, so nothing can fire

    std::vector<std::uint32_t> or1(hi - lo + 1, 0), or0(hi - lo + 1, 0);
    const std::vector<std::uint64_t>& th = thr_[t];
    bool any = false;

    // child outputs over [clo, chi] on rectangle T
    auto child_out = [&](int c, const Rect& tr, std::vector<std::uint32_t>& cg) {
        std::int64_t clo = nd.child_lo[c], chi = nd.child_hi[c];
        const std::vector<int>& cx = tr.paths(path_, clo, chi);
        if (nd.child[c] >= 0) {
            bool cf, cc;
            eval(nd.child[c], tr, cx, ev, depth + 1, cg, cf, cc);
            return cf;
        }
        if (static_cast<int>(ev.level.size()) <= depth + 1) ev.level.resize(depth + 2, 0);
        ev.level[depth + 1] += cx.size();
        return atom_gate(cx, clo, chi, cg);
    };

    std::vector<std::uint32_t> gl, gr;
    for (std::uint64_t l = 0; l < m_[t]; ++l) {
        ++ev.samples;
        std::uint64_t sd = hash_seq(r.seed ^ 0x7e57ULL, {static_cast<std::uint64_t>(t), l});
        // join_ℓ = 1 needs some path of the rectangle inside T_ℓ
        bool hit = false;
        for (int x : xs) {
            bool in = true;
            for (std::int64_t h = lo; h <= hi && in; ++h) {
                std::uint64_t q = th[h - lo];
                in = q == kAlways ||
                     hash_seq(sd, {static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(path_[x][h])}) < q;
            }
            if (in) {
                hit = true;
                break;
            }
        }
        if (!hit) continue;

        Rect tr;
        tr.parent = &r;
        tr.seed = sd;
        tr.lo = lo;
        tr.hi = hi;
        tr.thr = th.data();
        if (!child_out(0, tr, gl)) continue;
        if (!child_out(1, tr, gr)) continue;
        std::int64_t j = nd.child_hi[0], i = nd.child_lo[1];
        bool agree = true;
        for (std::int64_t h = i; h <= j && agree; ++h) agree = gl[h - lo] == gr[h - i];
        if (!agree) continue;

        any = true;
        for (std::int64_t h = lo; h <= hi; ++h) {
            std::uint32_t v = h <= j ? gl[h - lo] : gr[h - i];
            or1[h - lo] |= v;
            or0[h - lo] |= ~v & full;
            if (or1[h - lo] & or0[h - lo]) conflict = true;
        }
        // with one candidate every firing join reports it; a conflict is final
        if (xs.size() == 1 || conflict) break;
    }
    f = any && !conflict;
    g = or1;
}

IsolationOutcome PermProdSim::run(const Rect& root) const {
    IsolationOutcome out;
    const std::vector<int>& xs = root.paths(path_, 0, k());
    out.candidates = static_cast<int>(xs.size());
    Eval ev;
    std::vector<std::uint32_t> g;
    bool f, conflict;
    if (it_.nodes.empty()) {
        ev.evaluations = 1;
        ev.level = {xs.size()};
        f = atom_gate(xs, 0, 1, g);
        conflict = !xs.empty() && !f;
    } else {
        eval(0, root, xs, ev, 0, g, f, conflict);
    }
    out.samples = ev.samples;
    out.evaluations = ev.evaluations;
    out.level_candidates = ev.level;
    if (f) {
        out.kind = IsoKind::Isolated;
        out.path.assign(g.begin(), g.end());
    } else if (conflict) {
        out.kind = IsoKind::Inconsistent;
    }
    return out;
}

IsolationOutcome PermProdSim::isolate(const std::vector<std::vector<int>>& sets) const {
    if (static_cast<int>(sets.size()) != k() + 1) throw std::invalid_argument("need k+1 sets");
    Rect root;
    root.seed = hash_seq(p_.seed, {0x150ULL});
    root.lo = 0;
    root.hi = k();
    root.member.assign(k() + 1, std::vector<std::uint8_t>(n(), 0));
    for (int h = 0; h <= k(); ++h)
        for (int v : sets[h]) {
            if (v < 0 || v >= n()) throw std::invalid_argument("set element out of range");
            root.member[h][v] = 1;
        }
    return run(root);
}

EnumResult PermProdSim::enumerate_paths() const {
    EnumResult res;
    const int n = this->n(), k = this->k();
    double logn = n > 1 ? std::log2(static_cast<double>(n)) : 0.0;
    double l2 = profile_norm(a_).to_double() * logn + (n > 1 ? p_.c * std::log2(logn) : 0.0);
    double mo = n > 1 ? std::ceil(p_.outer_mult * std::exp2(l2) - 1e-9) : 1.0;
    if (mo < 1) mo = 1;
    res.rectangles = static_cast<std::uint64_t>(mo);

    std::vector<std::uint64_t> th(k + 1);
    std::vector<int> sampled;  // coordinates that are actually thinned
    for (int h = 0; h <= k; ++h) {
        th[h] = threshold(n == 1 ? 1.0 : std::exp2(-a_[h].to_double() * logn));
        if (th[h] != kAlways) sampled.push_back(h);
    }
    std::vector<char> found(n, 0);
    int nfound = 0;
    std::vector<int> xs;
    for (std::uint64_t l = 0; l < res.rectangles && nfound < n; ++l) {
        std::uint64_t sd = hash_seq(p_.seed, {0x0e7ULL, l});
        // paths inside S_ℓ; the root output can only be one of them
        xs.clear();
        bool fresh = false;
        for (int gid = 0; gid < n; ++gid) {
            bool in = true;
            for (int h : sampled) {
                if (hash_seq(sd, {static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(path_[gid][h])}) >= th[h]) {
                    in = false;
                    break;
                }
            }
            if (in) {
                xs.push_back(gid);
                fresh |= !found[gid];
            }
        }
        if (!fresh) continue;  // cannot add a new path to the union
        ++res.evaluated;
        Rect root;
        root.seed = sd;
        root.lo = 0;
        root.hi = k;
        root.thr = th.data();
        root.memo.emplace(std::make_pair<std::int64_t, std::int64_t>(0, k), xs);
        IsolationOutcome o = run(root);
        res.samples += o.samples;
        if (o.kind == IsoKind::Inconsistent) ++res.inconsistent;
        if (o.kind != IsoKind::Isolated) continue;
        // soundness: the reported tuple must be a π̄-path
        const std::vector<int>& x = o.path;
        bool ok = static_cast<int>(x.size()) == k + 1 && x[0] < n;
        for (int h = 0; ok && h < k; ++h) ok = x[h + 1] < n && ps_.pi[h][x[h]] == x[h + 1];
        if (!ok) {
            res.sound = false;
            continue;
        }
        if (!found[x[0]]) {
            found[x[0]] = 1;
            ++nfound;
        }
    }
    for (int gid = 0; gid < n; ++gid)
        if (found[gid]) res.paths.push_back(path_[gid]);
    res.complete = nfound == n;
    return res;
}

SymbolicSize symbolic_size(const JoinTree& tree, const Profile& a, int n, const SimParams& p) {
    if (n < 2) throw std::invalid_argument("symbolic size needs n >= 2");
    int k = static_cast<int>(a.size()) - 1;
    IntervalTree it = checked_tree(tree, k);
    const int b = bit_width(n);
    const double leaf = std::log2(3.0 * b + 1);
    SymbolicSize out;
    out.outputs = 1 + (k + 1) * b;
    if (it.nodes.empty()) {
        out.log2_size = leaf;
        out.log_n_size = leaf / std::log2(static_cast<double>(n));
        out.depth = 4;
        return out;
    }
    LpSolution sol = chi_lp(tree, a);
    if (sol.status != "optimal") throw std::runtime_error("χ LP did not solve: " + sol.status);
    NodePlan plan = make_plan(it, sol, n, p);
    const double kb2 = 2 * std::log2(static_cast<double>(k) * b);
    out.samples_per_node = plan.m;
    // children appear after their parent in the root-first order
    std::vector<double> z(it.nodes.size());
    std::vector<int> d(it.nodes.size());
    for (int t = static_cast<int>(it.nodes.size()) - 1; t >= 0; --t) {
        double parts[2];
        int dd = 0;
        for (int c = 0; c < 2; ++c) {
            int ch = it.nodes[t].child[c];
            parts[c] = ch >= 0 ? z[ch] : leaf;
            dd = std::max(dd, ch >= 0 ? d[ch] : 4);
        }
        double hi = std::max(parts[0], parts[1]), lo = std::min(parts[0], parts[1]);
        double sum = hi + std::log2(1 + std::exp2(lo - hi));
        z[t] = plan.log2_m[t] + kb2 + sum;
        d[t] = dd + 6;
    }
    out.log2_size = z[0];
    out.log_n_size = z[0] / std::log2(static_cast<double>(n));
    out.depth = d[0];
    return out;
}

}  // namespace phikit
