#include "phikit/pathset.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <gmpxx.h>

namespace phikit {

namespace {

std::uint64_t ipow(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    while (e-- > 0) {
        if (r > (std::uint64_t{1} << 40) / std::max<std::uint64_t>(b, 1)) throw std::length_error("relation universe too large");
        r *= b;
    }
    return r;
}

int index_of(const VertexSet& vs, Vertex v) {
    auto it = std::lower_bound(vs.begin(), vs.end(), v);
    if (it == vs.end() || *it != v) return -1;
    return static_cast<int>(it - vs.begin());
}

VertexSet vs_minus(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    for (Vertex v : a)
        if (!vs_contains(b, v)) out.push_back(v);
    return out;
}

}  // namespace

Relation::Relation(int n, VertexSet vars) : n_(n), vars_(make_vertex_set(std::move(vars))) {
    if (n < 1) throw std::invalid_argument("relation needs n >= 1");
    universe_ = ipow(n, arity());
    if (universe_ > (std::uint64_t{1} << 24)) throw std::length_error("relation universe too large");
    bits_.assign((universe_ + 63) / 64, 0);
}

Relation Relation::full(int n, VertexSet vars) {
    Relation r(n, std::move(vars));
    for (std::uint64_t c = 0; c < r.universe_; ++c) r.insert(c);
    return r;
}

Relation Relation::from_mask(int n, VertexSet vars, std::uint64_t mask) {
    Relation r(n, std::move(vars));
    if (r.universe_ > 64) throw std::length_error("mask form needs a universe of at most 64 tuples");
    if (r.universe_ < 64) mask &= (std::uint64_t{1} << r.universe_) - 1;
    r.bits_[0] = mask;
    return r;
}

void Relation::insert(std::uint64_t code) {
    if (code >= universe_) throw std::out_of_range("tuple code outside the universe");
    bits_[code >> 6] |= std::uint64_t{1} << (code & 63);
}

std::uint64_t Relation::size() const {
    std::uint64_t s = 0;
    for (auto w : bits_) s += static_cast<std::uint64_t>(__builtin_popcountll(w));
    return s;
}

std::vector<std::uint64_t> Relation::codes() const {
    std::vector<std::uint64_t> out;
    for (std::size_t w = 0; w < bits_.size(); ++w)
        for (std::uint64_t b = bits_[w]; b; b &= b - 1) out.push_back(w * 64 + static_cast<std::uint64_t>(__builtin_ctzll(b)));
    return out;
}

std::uint64_t Relation::mask() const {
    if (universe_ > 64) throw std::length_error("mask form needs a universe of at most 64 tuples");
    return bits_[0];
}

std::uint64_t Relation::encode(const std::vector<int>& t) const {
    if (static_cast<int>(t.size()) != arity()) throw std::invalid_argument("tuple arity mismatch");
    std::uint64_t c = 0;
    for (int i = arity() - 1; i >= 0; --i) {
        if (t[i] < 0 || t[i] >= n_) throw std::out_of_range("tuple entry outside [n]");
        c = c * n_ + t[i];
    }
    return c;
}

std::vector<int> Relation::decode(std::uint64_t code) const {
    std::vector<int> t(arity());
    for (int i = 0; i < arity(); ++i) {
        t[i] = static_cast<int>(code % n_);
        code /= n_;
    }
    return t;
}

int Relation::coord(std::uint64_t code, int i) const {
    for (int j = 0; j < i; ++j) code /= n_;
    return static_cast<int>(code % n_);
}

Rational Relation::density() const { return Rational(static_cast<std::int64_t>(size()), static_cast<std::int64_t>(universe_)); }

bool Relation::subset_of(const Relation& o) const {
    if (n_ != o.n_ || vars_ != o.vars_) throw std::invalid_argument("subset test on different index sets");
    for (std::size_t w = 0; w < bits_.size(); ++w)
        if (bits_[w] & ~o.bits_[w]) return false;
    return true;
}

std::string Relation::str() const {
    std::ostringstream os;
    os << "n=" << n_ << " V={";
    for (std::size_t i = 0; i < vars_.size(); ++i) os << (i ? "," : "") << vars_[i];
    os << "} {";
    bool first = true;
    for (auto c : codes()) {
        os << (first ? "" : ",") << '(';
        auto t = decode(c);
        for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
        os << ')';
        first = false;
    }
    os << '}';
    return os.str();
}

Relation rel_union(const Relation& a, const Relation& b) {
    if (a.n() != b.n() || a.vars() != b.vars()) throw std::invalid_argument("union of relations on different index sets");
    Relation r = a;
    for (auto c : b.codes()) r.insert(c);
    return r;
}

Relation join(const Relation& a, const Relation& b) {
    if (a.n() != b.n()) throw std::invalid_argument("join of relations with different n");
    VertexSet w = vs_union(a.vars(), b.vars());
    Relation r(a.n(), w);
    std::vector<int> ia, ib;  // position in w of each variable
    for (Vertex v : a.vars()) ia.push_back(index_of(w, v));
    for (Vertex v : b.vars()) ib.push_back(index_of(w, v));
    auto bc = b.codes();
    std::vector<int> t(w.size());
    for (auto ca : a.codes()) {
        auto xa = a.decode(ca);
        for (auto cb : bc) {
            auto xb = b.decode(cb);
            std::fill(t.begin(), t.end(), -1);
            for (std::size_t i = 0; i < ia.size(); ++i) t[ia[i]] = xa[i];
            bool ok = true;
            for (std::size_t i = 0; i < ib.size() && ok; ++i) {
                if (t[ib[i]] >= 0 && t[ib[i]] != xb[i]) ok = false;
                t[ib[i]] = xb[i];
            }
            if (ok) r.insert(t);
        }
    }
    return r;
}

Relation project(const Relation& a, const VertexSet& u0) {
    VertexSet u = make_vertex_set(u0);
    std::vector<int> pos;
    for (Vertex v : u) {
        int p = index_of(a.vars(), v);
        if (p < 0) throw std::invalid_argument("projection onto a vertex outside the relation");
        pos.push_back(p);
    }
    Relation r(a.n(), u);
    std::vector<int> t(u.size());
    for (auto c : a.codes()) {
        auto x = a.decode(c);
        for (std::size_t i = 0; i < pos.size(); ++i) t[i] = x[pos[i]];
        r.insert(t);
    }
    return r;
}

Relation restrict_rel(const Relation& a, const VertexSet& t, const std::vector<int>& z) {
    if (t.size() != z.size()) throw std::invalid_argument("restriction needs one value per vertex of T");
    std::vector<std::pair<int, int>> fixed;  // (position in V, value)
    for (std::size_t i = 0; i < t.size(); ++i) {
        int p = index_of(a.vars(), t[i]);
        if (p >= 0) fixed.push_back({p, z[i]});
    }
    VertexSet rest = vs_minus(a.vars(), make_vertex_set(t));
    std::vector<int> pos;
    for (Vertex v : rest) pos.push_back(index_of(a.vars(), v));
    Relation r(a.n(), rest);
    std::vector<int> out(rest.size());
    for (auto c : a.codes()) {
        auto x = a.decode(c);
        bool ok = true;
        for (auto [p, val] : fixed)
            if (x[p] != val) ok = false;
        if (!ok) continue;
        for (std::size_t i = 0; i < pos.size(); ++i) out[i] = x[pos[i]];
        r.insert(out);
    }
    return r;
}

bool density_at_most(std::uint64_t count, int dim, int n, const Rational& delta) {
    // count / n^dim <= n^{-p/q}  <=>  count^q n^p <= n^{dim q}
    const long p = delta.num(), q = delta.den();
    mpz_class lhs, rhs, nn = n, cc = static_cast<unsigned long>(count);
    mpz_pow_ui(lhs.get_mpz_t(), cc.get_mpz_t(), static_cast<unsigned long>(q));
    mpz_class t;
    mpz_pow_ui(t.get_mpz_t(), nn.get_mpz_t(), static_cast<unsigned long>(std::max(p, 0L)));
    lhs *= t;
    mpz_pow_ui(rhs.get_mpz_t(), nn.get_mpz_t(), static_cast<unsigned long>(dim * q + std::max(-p, 0L)));
    return lhs <= rhs;
}

bool chi_density_bound(std::uint64_t size, int dim, int n, const Rational& phi, std::int64_t chi) {
    // size <= chi * n^{dim - phi}  <=>  size^q n^p <= chi^q n^{dim q}
    const long p = phi.num(), q = phi.den();
    mpz_class lhs, rhs, t, nn = n;
    mpz_ui_pow_ui(lhs.get_mpz_t(), size, static_cast<unsigned long>(q));
    mpz_pow_ui(t.get_mpz_t(), nn.get_mpz_t(), static_cast<unsigned long>(std::max(p, 0L)));
    lhs *= t;
    mpz_ui_pow_ui(rhs.get_mpz_t(), static_cast<unsigned long>(std::max<std::int64_t>(chi, 0)), static_cast<unsigned long>(q));
    mpz_pow_ui(t.get_mpz_t(), nn.get_mpz_t(), static_cast<unsigned long>(dim * q + std::max(-p, 0L)));
    rhs *= t;
    return lhs <= rhs;
}

bool is_pathset(const Relation& a, const PatternGraph& f, const VertexSet& s0, const ThresholdWeighting& th) {
    VertexSet s = make_vertex_set(s0);
    VertexSet u = vs_minus(f.vertices(), s);
    if (a.vars() != u) throw std::invalid_argument("relation is not indexed by V(F) \\ S");
    if (a.empty()) return true;
    const int d = a.arity();
    if (d > 20) throw std::length_error("pathset test limited to 20 free vertices");
    auto codes = a.codes();
    std::vector<std::vector<int>> tup;
    for (auto c : codes) tup.push_back(a.decode(c));
    for (std::uint32_t tm = 0; tm < (1u << d); ++tm) {
        VertexSet t = s;
        int tsize = 0;
        for (int i = 0; i < d; ++i)
            if (tm >> i & 1) {
                t.push_back(u[i]);
                ++tsize;
            }
        Rational dl = delta_cond(f, make_vertex_set(t), th);
        // tuples of 𝒜 sharing z on T' map to distinct points of the restriction
        std::unordered_map<std::uint64_t, std::uint64_t> cnt;
        std::uint64_t worst = 0;
        for (auto& x : tup) {
            std::uint64_t key = 0;
            for (int i = d - 1; i >= 0; --i)
                if (tm >> i & 1) key = key * a.n() + x[i];
            worst = std::max(worst, ++cnt[key]);
        }
        if (!density_at_most(worst, d - tsize, a.n(), dl)) return false;
    }
    return true;
}

// ---------------------------------------------------------------- pathset complexity

namespace {
constexpr std::int64_t kInfCost = std::numeric_limits<std::int64_t>::max() / 4;
}

PathsetOracle::PathsetOracle(const JoinTree& a, const ThresholdWeighting& th, int n, int universe_cap)
    : a_(a), th_(th), n_(n), cap_(universe_cap) {
    if (a.empty()) throw std::invalid_argument("pathset complexity of the empty join-tree");
    if (universe_cap > 16) throw std::invalid_argument("universe cap above 16 is not supported");
}

VertexSet PathsetOracle::free_vars(int node, const VertexSet& s) const {
    return vs_minus(a_.graph_at(node).vertices(), make_vertex_set(s));
}

std::uint64_t PathsetOracle::mask_in(const Table& t, const Relation& r) const {
    if (r.vars() != t.vars || r.n() != n_) throw std::invalid_argument("relation does not match V(A) \\ S");
    return r.mask();
}

const PathsetOracle::Table& PathsetOracle::table(int node, const VertexSet& s0) {
    PatternGraph f = a_.graph_at(node);
    VertexSet s;
    for (Vertex v : make_vertex_set(s0))
        if (f.has_vertex(v)) s.push_back(v);
    auto key = std::make_pair(node, s);
    auto it = tables_.find(key);
    if (it != tables_.end()) return it->second;

    Table t;
    t.vars = vs_minus(f.vertices(), s);
    std::uint64_t universe = ipow(n_, static_cast<int>(t.vars.size()));
    if (universe > static_cast<std::uint64_t>(cap_))
        throw std::length_error("pathset complexity refused: universe " + std::to_string(universe) + " exceeds cap");
    const int N = static_cast<int>(universe);
    const std::uint32_t M = 1u << N;
    t.is_pathset.assign(M, 0);
    t.cost.assign(M, kInfCost);
    for (std::uint32_t m = 0; m < M; ++m)
        t.is_pathset[m] = is_pathset(Relation::from_mask(n_, t.vars, m), f, s, th_) ? 1 : 0;

    const JTNode& nd = a_.node(node);
    if (nd.leaf()) {
        for (std::uint32_t m = 0; m < M; ++m)
            if (t.is_pathset[m]) t.cost[m] = 1;
    } else {
        const Table& tb = table(nd.left, s);
        const Table& tc = table(nd.right, s);
        for (std::uint32_t m = 0; m < M; ++m) {
            if (!t.is_pathset[m]) continue;
            Relation r = Relation::from_mask(n_, t.vars, m);
            std::uint64_t mb = project(r, tb.vars).mask(), mc = project(r, tc.vars).mask();
            if (!tb.is_pathset[mb] || !tc.is_pathset[mc]) continue;
            t.cost[m] = std::max(tb.g[mb], tc.g[mc]);
        }
    }
    // optimal partition into family members
    t.g.assign(M, kInfCost);
    t.pick.assign(M, 0);
    t.g[0] = 0;
    for (std::uint32_t m = 1; m < M; ++m) {
        std::uint32_t low = m & (~m + 1);
        std::uint32_t rest = m ^ low;
        for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
            std::uint32_t piece = sub | low;
            if (t.cost[piece] < kInfCost && t.g[m ^ piece] < kInfCost) {
                std::int64_t v = t.cost[piece] + t.g[m ^ piece];
                if (v < t.g[m]) {
                    t.g[m] = v;
                    t.pick[m] = piece;
                }
            }
            if (sub == 0) break;
        }
    }
    return tables_.emplace(key, std::move(t)).first->second;
}

std::int64_t PathsetOracle::chi(int node, const VertexSet& s, const Relation& r) {
    const Table& t = table(node, s);
    return t.g[mask_in(t, r)];
}

bool PathsetOracle::pathset(int node, const VertexSet& s, const Relation& r) {
    const Table& t = table(node, s);
    return t.is_pathset[mask_in(t, r)] != 0;
}

PathsetCertificate PathsetOracle::certificate(int node, const VertexSet& s, const Relation& r) {
    const Table& t = table(node, s);
    std::uint64_t m = mask_in(t, r);
    PathsetCertificate cert;
    cert.value = t.g[m];
    const JTNode& nd = a_.node(node);
    cert.atomic = nd.leaf();
    const Table* tb = cert.atomic ? nullptr : &table(nd.left, s);
    const Table* tc = cert.atomic ? nullptr : &table(nd.right, s);
    while (m) {
        std::uint32_t piece = t.pick[m];
        PathsetTriple tr;
        tr.a = Relation::from_mask(n_, t.vars, piece);
        tr.cost = t.cost[piece];
        if (!cert.atomic) {
            tr.b = project(tr.a, tb->vars);
            tr.c = project(tr.a, tc->vars);
        }
        cert.family.push_back(std::move(tr));
        m ^= piece;
    }
    return cert;
}

Relation rectangle_pathset(const Profile& a, const std::vector<std::vector<int>>& sets, int n) {
    if (!in_profile_space(a)) throw std::invalid_argument("rectangle profile is not in 𝒫(k)");
    if (sets.size() != a.size()) throw std::invalid_argument("one set per path vertex is required");
    VertexSet vars;
    for (std::size_t h = 0; h < sets.size(); ++h) {
        vars.push_back(static_cast<Vertex>(h));
        // |S_h| <= n^{1 - a_h}  <=>  |S_h|^q <= n^{q - p}
        const long p = a[h].num(), q = a[h].den();
        mpz_class lhs, rhs, nn = n, sz = static_cast<unsigned long>(sets[h].size());
        mpz_pow_ui(lhs.get_mpz_t(), sz.get_mpz_t(), static_cast<unsigned long>(q));
        mpz_pow_ui(rhs.get_mpz_t(), nn.get_mpz_t(), static_cast<unsigned long>(q - p));
        if (lhs > rhs) throw std::invalid_argument("set S_" + std::to_string(h) + " is larger than n^{1-a_h}");
        for (int x : sets[h])
            if (x < 0 || x >= n) throw std::out_of_range("set element outside [n]");
    }
    Relation r(n, vars);
    std::vector<int> t(sets.size());
    std::function<void(std::size_t)> rec = [&](std::size_t h) {
        if (h == sets.size()) {
            r.insert(t);
            return;
        }
        for (int x : sets[h]) {
            t[h] = x;
            rec(h + 1);
        }
    };
    rec(0);
    return r;
}

}  // namespace phikit
