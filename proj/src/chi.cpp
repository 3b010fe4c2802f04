#include "phikit/chi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace phikit {

const char* lp_status_name(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration-limit";
    }
    return "?";
}

// ---------------------------------------------------------------- profiles

bool in_profile_space(const Profile& a) {
    if (a.size() < 2) return false;
    Rational s = 0;
    for (auto& x : a) {
        if (x < Rational(0) || Rational(1) < x) return false;
        s += x;
    }
    return !(s < Rational(1));
}

Rational profile_norm(const Profile& a) {
    Rational s = 0;
    for (auto& x : a) s += x;
    return s;
}

std::string profile_str(const Profile& a) {
    std::ostringstream os;
    for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i].str();
    return os.str();
}

Profile parse_profile(const std::string& s) {
    Profile out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
        if (tok.empty()) continue;
        out.push_back(Rational::parse(tok));
    }
    return out;
}

Profile rd_profile(int k) {
    if (k < 1) throw std::invalid_argument("rd_profile: k >= 1");
    Profile a(k + 1, Rational(0));
    a[0] = a[(k + 1) / 2] = a[k] = Rational(1, 2);
    return a;
}

Profile mo_profile(int k) {
    if (k < 1) throw std::invalid_argument("mo_profile: k >= 1");
    int l = 0;
    while ((2 << l) <= k) ++l;
    int t = k - (1 << l);
    Profile a;
    for (int i = 0; i < t; ++i) a.push_back(Rational(1, std::int64_t{2} << l));
    for (int i = 0; i < (1 << l) - t + 1; ++i) a.push_back(Rational(1, std::int64_t{1} << l));
    for (int i = 0; i < t; ++i) a.push_back(Rational(1, std::int64_t{2} << l));
    return a;
}

Profile fib_profile(int k) {
    if (k < 1) throw std::invalid_argument("fib_profile: k >= 1");
    if (k == 1) return {Rational(1, 2), Rational(1, 2)};
    if (k == 2) return {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
    int l = 4;
    while (fib(l) < k) ++l;
    // zero runs between the four thirds, shortened until they fit in k
    std::int64_t run[3] = {fib(l - 2) - 1, fib(l - 3) - 1, fib(l - 2) - 1};
    std::int64_t deficit = fib(l) - k;
    const int order[3] = {2, 0, 1};
    while (deficit > 0) {
        int best = -1;
        for (int o : order)
            if (run[o] > 0 && (best < 0 || run[o] > run[best])) best = o;
        --run[best];
        --deficit;
    }
    Profile a(k + 1, Rational(0));
    std::int64_t pos = 0;
    a[0] = Rational(1, 3);
    for (int r = 0; r < 3; ++r) {
        pos += run[r] + 1;
        a[pos] = Rational(1, 3);
    }
    return a;
}

// ---------------------------------------------------------------- interval trees

namespace {

int interval_rec(const JoinTree& a, int v, IntervalTree& out) {
    const JTNode& n = a.node(v);
    if (n.leaf()) return -1;
    auto [lo, hi] = a.interval_at(v);
    int idx = static_cast<int>(out.nodes.size());
    out.nodes.push_back({});
    IntervalNode in;
    in.node = v;
    in.lo = lo;
    in.hi = hi;
    int ch[2] = {n.left, n.right};
    auto iv0 = a.interval_at(ch[0]);
    auto iv1 = a.interval_at(ch[1]);
    if (iv0.first != lo) {
        std::swap(ch[0], ch[1]);
        std::swap(iv0, iv1);
    }
    // left = [p, j], right = [i, q] with p < i <= j < q
    bool ok = iv0.first == lo && iv1.second == hi && iv0.second < hi && iv1.first > lo && iv1.first <= iv0.second;
    if (!ok) throw std::invalid_argument("join-tree node is not an interval split");
    in.child_lo[0] = iv0.first;
    in.child_hi[0] = iv0.second;
    in.child_lo[1] = iv1.first;
    in.child_hi[1] = iv1.second;
    out.nodes[idx] = in;
    int c0 = interval_rec(a, ch[0], out);
    int c1 = interval_rec(a, ch[1], out);
    out.nodes[idx].child[0] = c0;
    out.nodes[idx].child[1] = c1;
    return idx;
}

}  // namespace

IntervalTree interval_tree(const JoinTree& a) {
    if (a.empty() || a.ambient() != Ambient::PInf) throw std::invalid_argument("χ needs a non-empty join-tree over P_inf");
    if (!a.is_connected()) throw std::invalid_argument("χ needs a connected join-tree");
    IntervalTree t;
    auto [lo, hi] = a.interval_at(a.root());
    t.lo = lo;
    t.hi = hi;
    interval_rec(a, a.root(), t);
    return t;
}

// ---------------------------------------------------------------- LP

mpq_class rationalize(double x, long maxden) {
    if (!std::isfinite(x)) throw std::invalid_argument("rationalize: not finite");
    bool neg = x < 0;
    double v = std::fabs(x);
    // convergents h/k of the continued fraction
    long double h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    long double r = v;
    for (int it = 0; it < 64; ++it) {
        long double a = std::floor(r);
        long double h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > maxden) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        long double frac = r - a;
        if (frac < 1e-15L || std::fabs(static_cast<long double>(v) - h1 / k1) < 1e-15L) break;
        r = 1 / frac;
    }
    if (k1 == 0) return 0;
    mpq_class q(static_cast<long>(h1), static_cast<long>(k1));
    q.canonicalize();
    return neg ? mpq_class(-q) : q;
}

namespace {

mpq_class to_mpq(const Rational& r) {
    mpq_class q(mpz_class(std::to_string(r.num())), mpz_class(std::to_string(r.den())));
    q.canonicalize();
    return q;
}

std::optional<Rational> to_rational(const mpq_class& q) {
    if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p()) return std::nullopt;
    return Rational(q.get_num().get_si(), q.get_den().get_si());
}

struct LpRow {
    std::vector<std::pair<int, mpq_class>> c;
    mpq_class rhs;
};

struct ChiModel {
    IntervalTree it;
    bool free = false;
    Profile a;                       // fixed profile
    int n = 0;                       // variables
    std::vector<int> parent;         // per internal node
    std::vector<int> doff, cidx;     // d-variable offset and cost variable per node
    std::vector<LpRow> rows;
    std::vector<mpq_class> obj;

    int K() const { return static_cast<int>(it.hi - it.lo); }
    int xvar(std::int64_t h) const { return static_cast<int>(h - it.lo); }
    int dvar(int t, std::int64_t h) const { return doff[t] + static_cast<int>(h - it.nodes[t].lo); }

    // b^{(t)}_h = (x_h or a_h) + Σ_{μ ∈ anc(t) ∪ {t}} d^{(μ)}_h ; `self` off gives the incoming a^{(t)}_h
    void bterm(int t, std::int64_t h, bool self, std::vector<int>& vars, mpq_class& cst) const {
        vars.clear();
        cst = free ? mpq_class(0) : to_mpq(a[h - it.lo]);
        if (free) vars.push_back(xvar(h));
        for (int u = self ? t : parent[t]; u >= 0; u = parent[u]) vars.push_back(dvar(u, h));
    }

    void build() {
        const int m = static_cast<int>(it.nodes.size());
        parent.assign(m, -1);
        for (int t = 0; t < m; ++t)
            for (int s = 0; s < 2; ++s)
                if (it.nodes[t].child[s] >= 0) parent[it.nodes[t].child[s]] = t;
        n = free ? K() + 1 : 0;
        doff.assign(m, 0);
        cidx.assign(m, 0);
        for (int t = 0; t < m; ++t) {
            doff[t] = n;
            n += static_cast<int>(it.nodes[t].hi - it.nodes[t].lo + 1);
            cidx[t] = n++;
        }
        if (free) {
            LpRow sum;
            for (int h = 0; h <= K(); ++h) {
                rows.push_back({{{h, mpq_class(-1)}}, mpq_class(-1)});
                sum.c.push_back({h, mpq_class(1)});
            }
            sum.rhs = 1;
            rows.push_back(sum);
        }
        std::vector<int> vars;
        mpq_class cst;
        for (int t = 0; t < m; ++t) {
            const IntervalNode& nd = it.nodes[t];
            for (std::int64_t h = nd.lo; h <= nd.hi; ++h) {  // b <= 1
                bterm(t, h, true, vars, cst);
                LpRow r;
                for (int v : vars) r.c.push_back({v, mpq_class(-1)});
                r.rhs = cst - 1;
                rows.push_back(std::move(r));
            }
            for (int s = 0; s < 2; ++s) {  // child input in 𝒫
                LpRow r;
                mpq_class tot = 0;
                for (std::int64_t h = nd.child_lo[s]; h <= nd.child_hi[s]; ++h) {
                    bterm(t, h, true, vars, cst);
                    for (int v : vars) r.c.push_back({v, mpq_class(1)});
                    tot += cst;
                }
                r.rhs = 1 - tot;
                rows.push_back(std::move(r));
            }
            for (int s = 0; s < 2; ++s) {  // c^{(t)} >= ‖d^{(t)}‖ + c^{(child)}
                LpRow r;
                r.c.push_back({cidx[t], mpq_class(1)});
                for (std::int64_t h = nd.lo; h <= nd.hi; ++h) r.c.push_back({dvar(t, h), mpq_class(-1)});
                if (nd.child[s] >= 0) r.c.push_back({cidx[nd.child[s]], mpq_class(-1)});
                r.rhs = 0;
                rows.push_back(std::move(r));
            }
        }
        obj.assign(n, mpq_class(0));
        if (m > 0) obj[cidx[0]] = 1;
        if (free)
            for (int h = 0; h <= K(); ++h) obj[h] = 1;
    }

    bool primal_ok(const std::vector<mpq_class>& x) const {
        for (auto& v : x)
            if (sgn(v) < 0) return false;
        for (auto& r : rows) {
            mpq_class s = 0;
            for (auto& [j, c] : r.c) s += c * x[j];
            if (s < r.rhs) return false;
        }
        return true;
    }

    // A^T y <= c with y >= 0; returns b·y
    std::optional<mpq_class> dual_bound(const std::vector<mpq_class>& y) const {
        std::vector<mpq_class> col(n, mpq_class(0));
        mpq_class by = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (sgn(y[i]) < 0) return std::nullopt;
            if (sgn(y[i]) == 0) continue;
            for (auto& [j, c] : rows[i].c) col[j] += c * y[i];
            by += rows[i].rhs * y[i];
        }
        for (int j = 0; j < n; ++j)
            if (col[j] > obj[j]) return std::nullopt;
        return by;
    }

    mpq_class objective(const std::vector<mpq_class>& x) const {
        mpq_class s = 0;
        for (int j = 0; j < n; ++j) s += obj[j] * x[j];
        return s;
    }
};

template <class T>
DenseSimplex<T> make_simplex(const ChiModel& md) {
    DenseSimplex<T> sx(md.n);
    for (auto& r : md.rows) {
        std::vector<std::pair<int, T>> c;
        c.reserve(r.c.size());
        for (auto& [j, v] : r.c) c.push_back({j, T(v)});
        sx.add_row(c, T(r.rhs));
    }
    std::vector<T> obj;
    for (auto& v : md.obj) obj.push_back(T(v));
    sx.set_objective(obj);
    return sx;
}

template <>
DenseSimplex<double> make_simplex<double>(const ChiModel& md) {
    DenseSimplex<double> sx(md.n);
    for (auto& r : md.rows) {
        std::vector<std::pair<int, double>> c;
        c.reserve(r.c.size());
        for (auto& [j, v] : r.c) c.push_back({j, v.get_d()});
        sx.add_row(c, r.rhs.get_d());
    }
    std::vector<double> obj;
    for (auto& v : md.obj) obj.push_back(v.get_d());
    sx.set_objective(obj);
    return sx;
}

void fill_nodes(const ChiModel& md, const std::vector<double>& x, LpSolution& sol) {
    std::vector<int> vars;
    mpq_class cst;
    for (int t = 0; t < static_cast<int>(md.it.nodes.size()); ++t) {
        const IntervalNode& nd = md.it.nodes[t];
        NodeProfile np;
        np.node = nd.node;
        np.lo = nd.lo;
        np.hi = nd.hi;
        for (std::int64_t h = nd.lo; h <= nd.hi; ++h) {
            md.bterm(t, h, false, vars, cst);
            double av = cst.get_d();
            for (int v : vars) av += x[v];
            np.a.push_back(av);
            np.b.push_back(av + x[md.dvar(t, h)]);
        }
        np.cost = x[md.cidx[t]];
        sol.nodes.push_back(std::move(np));
    }
}

}  // namespace

LpSolution chi_lp(const JoinTree& a, const std::optional<Profile>& prof, const ChiOptions& opt) {
    ChiModel md;
    md.it = interval_tree(a);
    md.free = !prof.has_value();
    if (!md.free) {
        md.a = *prof;
        if (static_cast<std::int64_t>(md.a.size()) != md.K() + 1)
            throw std::invalid_argument("profile length does not match the tree's path");
        if (!in_profile_space(md.a)) throw std::invalid_argument("profile is not in 𝒫(k)");
    }
    md.build();

    LpSolution sol;
    sol.rows = static_cast<int>(md.rows.size());
    sol.cols = md.n;
    std::vector<mpq_class> xq;    // exact-feasible primal, when one was found
    std::vector<double> xd;       // primal as solved
    const std::uint64_t tableau = static_cast<std::uint64_t>(md.rows.size() + 1) * (md.n + 2 * md.rows.size() + 1);

    auto finish_exact = [&](const std::vector<mpq_class>& x, const mpq_class& val) {
        sol.certified = true;
        sol.lower = sol.upper = val;
        sol.exact = to_rational(val);
        sol.value = val.get_d();
        sol.node_sums_ok = md.primal_ok(x);
        xq = x;
    };

    bool done = false;  // certified
    if (!opt.exact) {
        auto sx = make_simplex<double>(md);
        auto r = sx.solve();
        sol.status = lp_status_name(r.status);
        sol.pivots = r.pivots;
        if (r.status != LpStatus::Optimal) return sol;
        sol.value = r.objective;
        xd = r.x;
        fill_nodes(md, r.x, sol);
        // certify: exact primal feasibility gives an upper bound, dual feasibility a lower one
        for (long maxden : {1000000L, 1000000000L}) {
            std::vector<mpq_class> x(md.n), y(md.rows.size());
            for (int j = 0; j < md.n; ++j) x[j] = std::fabs(r.x[j]) < 1e-11 ? mpq_class(0) : rationalize(r.x[j], maxden);
            for (std::size_t i = 0; i < y.size(); ++i) {
                double v = r.y[i];
                y[i] = v < 1e-11 ? mpq_class(0) : rationalize(v, maxden);
            }
            bool pok = md.primal_ok(x);
            auto lb = md.dual_bound(y);
            if (pok) {
                sol.upper = md.objective(x);
                sol.node_sums_ok = true;
                xq = x;
            }
            if (lb) sol.lower = *lb;
            if (pok && lb && sol.lower == sol.upper) {
                finish_exact(x, sol.upper);
                done = true;
                break;
            }
        }
        if (!done && tableau <= opt.exact_cap) {
            auto ex = make_simplex<mpq_class>(md).solve();
            if (ex.status == LpStatus::Optimal) {
                sol.nodes.clear();
                xd.clear();
                for (auto& v : ex.x) xd.push_back(v.get_d());
                fill_nodes(md, xd, sol);
                finish_exact(ex.x, ex.objective);
                done = true;
            }
        }
    } else {
        if (tableau > opt.exact_cap) throw std::length_error("LP too large for the exact simplex");
        auto r = make_simplex<mpq_class>(md).solve();
        sol.status = lp_status_name(r.status);
        sol.pivots = r.pivots;
        if (r.status != LpStatus::Optimal) return sol;
        for (auto& v : r.x) xd.push_back(v.get_d());
        fill_nodes(md, xd, sol);
        finish_exact(r.x, r.objective);
        done = true;
    }

    if (!xq.empty()) {
        std::vector<int> vars;
        mpq_class cst;
        for (int t = 0; t < static_cast<int>(sol.nodes.size()); ++t) {
            NodeProfile& np = sol.nodes[t];
            np.a_exact.clear();
            np.b_exact.clear();
            for (std::int64_t h = np.lo; h <= np.hi; ++h) {
                md.bterm(t, h, false, vars, cst);
                mpq_class av = cst;
                for (int v : vars) av += xq[v];
                mpq_class bv = av + xq[md.dvar(t, h)];
                auto ar = to_rational(av), br = to_rational(bv);
                if (!ar || !br) throw std::overflow_error("node profile does not fit in 64-bit rationals");
                np.a_exact.push_back(*ar);
                np.b_exact.push_back(*br);
            }
        }
    }
    sol.chi = sol.nodes.empty() ? 0.0 : (xq.empty() ? sol.nodes[0].cost : xq[md.cidx[0]].get_d());
    if (md.free) {
        for (int h = 0; h <= md.K(); ++h) {
            mpq_class v = xq.empty() ? rationalize(xd[h]) : xq[h];
            auto rv = to_rational(v);
            sol.root_profile.push_back(rv ? *rv : Rational(0));
        }
    } else {
        sol.root_profile = md.a;
    }
    return sol;
}

// ---------------------------------------------------------------- all interval trees

std::uint64_t count_interval_trees(int k) {
    std::vector<std::uint64_t> t(k + 1, 0);
    if (k >= 1) t[1] = 1;
    for (int l = 2; l <= k; ++l) {
        unsigned __int128 s = 0;
        for (int i = 1; i < l; ++i)
            for (int j = i; j < l; ++j) s += static_cast<unsigned __int128>(t[j]) * t[l - i];
        t[l] = s > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                             : static_cast<std::uint64_t>(s);
    }
    return k >= 1 ? t[k] : 0;
}

namespace {

bool gen_interval(std::int64_t p, std::int64_t q, const std::function<bool(const JoinTree&)>& fn) {
    if (q - p == 1) return fn(JoinTree::atom(Ambient::PInf, Edge{p, q}));
    for (std::int64_t i = p + 1; i < q; ++i)
        for (std::int64_t j = i; j < q; ++j) {
            bool go = gen_interval(p, j, [&](const JoinTree& l) {
                return gen_interval(i, q, [&](const JoinTree& r) { return fn(JoinTree::join(l, r)); });
            });
            if (!go) return false;
        }
    return true;
}

}  // namespace

std::uint64_t for_each_interval_tree(int k, const std::function<bool(const JoinTree&)>& fn, std::uint64_t cap) {
    if (k < 1) throw std::invalid_argument("interval trees need k >= 1");
    if (count_interval_trees(k) > cap) throw std::length_error("interval tree count exceeds cap");
    std::uint64_t n = 0;
    gen_interval(0, k, [&](const JoinTree& t) {
        ++n;
        return fn(t);
    });
    return n;
}

ChiGlobal chi_global(int k, const std::optional<Profile>& prof, std::uint64_t cap) {
    ChiGlobal g;
    bool first = true;
    g.trees = for_each_interval_tree(
        k,
        [&](const JoinTree& t) {
            LpSolution s = chi_lp(t, prof);
            if (s.status != "optimal") throw std::runtime_error("χ LP failed: " + s.status);
            if (first || s.value < g.value - 1e-12) {
                g.value = s.value;
                g.exact = s.exact;
                g.argmin = t;
                first = false;
            }
            return true;
        },
        cap);
    return g;
}

// ---------------------------------------------------------------- grid oracle

namespace {
constexpr std::int32_t kInf = std::numeric_limits<std::int32_t>::max() / 4;
}

GridChi::GridChi(const JoinTree& a, int res) : it_(interval_tree(a)), res_(res), lo_(it_.lo), hi_(it_.hi) {
    if (res < 1) throw std::invalid_argument("grid resolution must be positive");
    double cells = std::pow(res + 1.0, static_cast<double>(hi_ - lo_ + 1));
    if (cells > 5e7) throw std::length_error("grid too large");
    h_.resize(it_.nodes.size());
    for (int t = static_cast<int>(it_.nodes.size()) - 1; t >= 0; --t) build(t);
}

std::int32_t GridChi::lookup(int t, const int* coords) const {
    const IntervalNode& nd = it_.nodes[t];
    int dim = static_cast<int>(nd.hi - nd.lo + 1);
    std::size_t idx = 0;
    for (int i = 0; i < dim; ++i) idx = idx * (res_ + 1) + coords[i];
    return h_[t][idx];
}

void GridChi::build(int t) {
    const IntervalNode& nd = it_.nodes[t];
    const int dim = static_cast<int>(nd.hi - nd.lo + 1);
    const int base = res_ + 1;
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= base;
    std::vector<std::int32_t> h(total, kInf);
    std::vector<int> b(dim, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t r = idx;
        int sum = 0;
        for (int i = dim - 1; i >= 0; --i) {
            b[i] = static_cast<int>(r % base);
            r /= base;
            sum += b[i];
        }
        std::int32_t worst = 0;
        bool ok = true;
        for (int s = 0; s < 2 && ok; ++s) {
            int off = static_cast<int>(nd.child_lo[s] - nd.lo);
            int cd = static_cast<int>(nd.child_hi[s] - nd.child_lo[s] + 1);
            int csum = 0;
            for (int i = 0; i < cd; ++i) csum += b[off + i];
            if (csum < res_) {
                ok = false;
                break;
            }
            if (nd.child[s] >= 0) {
                std::int32_t hc = lookup(nd.child[s], b.data() + off);
                if (hc >= kInf) {
                    ok = false;
                    break;
                }
                worst = std::max(worst, hc - csum);  // χ of the child at input b|child
            }
        }
        if (ok) h[idx] = sum + worst;
    }
    // H(a) = min over b >= a, processed from the top corner down
    std::vector<std::size_t> stride(dim);
    std::size_t st = 1;
    for (int i = dim - 1; i >= 0; --i) {
        stride[i] = st;
        st *= base;
    }
    for (std::size_t idx = total; idx-- > 0;) {
        std::size_t r = idx;
        for (int i = dim - 1; i >= 0; --i) {
            int c = static_cast<int>(r % base);
            r /= base;
            if (c < res_) h[idx] = std::min(h[idx], h[idx + stride[i]]);
        }
    }
    h_[t] = std::move(h);
}

std::int64_t GridChi::at(const std::vector<int>& a) const {
    if (static_cast<std::int64_t>(a.size()) != hi_ - lo_ + 1) throw std::invalid_argument("grid profile has the wrong length");
    int sum = 0;
    for (int x : a) {
        if (x < 0 || x > res_) throw std::invalid_argument("grid profile entry out of range");
        sum += x;
    }
    if (sum < res_) return -1;
    if (it_.nodes.empty()) return 0;
    std::int32_t v = lookup(0, a.data());
    return v >= kInf ? -1 : v - sum;
}

std::int64_t GridChi::free_min() const {
    if (it_.nodes.empty()) return res_;
    const int dim = static_cast<int>(hi_ - lo_ + 1);
    const int base = res_ + 1;
    std::int64_t best = kInf;
    const auto& h = h_[0];
    for (std::size_t idx = 0; idx < h.size(); ++idx) {
        std::size_t r = idx;
        int sum = 0;
        for (int i = 0; i < dim; ++i) {
            sum += static_cast<int>(r % base);
            r /= base;
        }
        if (sum >= res_) best = std::min<std::int64_t>(best, h[idx]);
    }
    return best;
}

}  // namespace phikit
