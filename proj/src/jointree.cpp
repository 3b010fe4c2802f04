#include "phikit/jointree.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace phikit {

JoinTree JoinTree::atom(Ambient a, const Edge& e) {
    JoinTree t(a);
    t.nodes_.push_back(JTNode{-1, -1, e, 1});
    return t;
}

JoinTree JoinTree::bot(Ambient a) {
    JoinTree t(a);
    t.nodes_.push_back(JTNode{});
    return t;
}

JoinTree JoinTree::join(const JoinTree& b, const JoinTree& c) {
    if (b.empty() || c.empty()) throw std::invalid_argument("cannot join with the empty join-tree");
    if (b.amb_ != c.amb_) throw std::invalid_argument("join-trees over different ambients");
    JoinTree t(b.amb_);
    t.nodes_ = b.nodes_;
    int off = b.num_nodes();
    for (auto n : c.nodes_) {
        if (!n.leaf()) {
            n.left += off;
            n.right += off;
        }
        t.nodes_.push_back(n);
    }
    t.nodes_.push_back(JTNode{b.root(), off + c.root(), std::nullopt, b.num_nodes() + c.num_nodes() + 1});
    return t;
}

int JoinTree::num_leaves() const {
    int c = 0;
    for (auto& n : nodes_) c += n.leaf();
    return c;
}

std::vector<Edge> JoinTree::labels_at(int v) const {
    std::vector<Edge> out;
    for (int i = v - nodes_[v].size + 1; i <= v; ++i)
        if (nodes_[i].leaf() && nodes_[i].label) out.push_back(*nodes_[i].label);
    return out;
}

PatternGraph JoinTree::graph_at(int v) const { return PatternGraph(amb_, labels_at(v)); }

JoinTree JoinTree::subtree(int v) const {
    JoinTree t(amb_);
    if (v < 0) return t;
    int lo = v - nodes_[v].size + 1;
    for (int i = lo; i <= v; ++i) {
        JTNode n = nodes_[i];
        if (!n.leaf()) {
            n.left -= lo;
            n.right -= lo;
        }
        t.nodes_.push_back(n);
    }
    return t;
}

std::pair<std::int64_t, std::int64_t> JoinTree::interval_at(int v) const {
    if (amb_ != Ambient::PInf) throw std::logic_error("intervals are defined for P_inf join-trees only");
    auto es = labels_at(v);
    if (es.empty()) throw std::logic_error("interval of a join-tree with empty graph");
    std::int64_t lo = es[0].u, hi = es[0].v;
    for (auto& e : es) {
        lo = std::min(lo, e.u);
        hi = std::max(hi, e.v);
    }
    return {lo, hi};
}

bool JoinTree::is_minimal() const {
    std::set<Edge> seen;
    for (auto& n : nodes_)
        if (n.leaf()) {
            if (!n.label || !seen.insert(*n.label).second) return false;
        }
    return true;
}

bool JoinTree::is_connected() const {
    for (int v = 0; v < num_nodes(); ++v) {
        PatternGraph g = graph_at(v);
        if (g.num_edges() == 0 || !phikit::is_connected(g)) return false;
    }
    return true;
}

namespace {

void vertex_sexp(std::ostream& os, Ambient a, Vertex v) {
    if (a == Ambient::PInf)
        os << v;
    else
        os << '(' << tlevel(v) << ' ' << tindex(v) << ')';
}

void write_sexp(std::ostream& os, const JoinTree& t, int v) {
    const JTNode& n = t.node(v);
    if (n.leaf()) {
        if (!n.label) {
            os << "(bot)";
            return;
        }
        os << "(atom ";
        vertex_sexp(os, t.ambient(), n.label->u);
        os << ' ';
        vertex_sexp(os, t.ambient(), n.label->v);
        os << ')';
        return;
    }
    os << "(join ";
    write_sexp(os, t, n.left);
    os << ' ';
    write_sexp(os, t, n.right);
    os << ')';
}

struct SexpParser {
    std::string s;
    std::size_t pos = 0;
    std::optional<Ambient> amb;

    void ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("join-tree parse error at offset " + std::to_string(pos) + ": " + what);
    }
    void expect(char c) {
        ws();
        if (pos >= s.size() || s[pos] != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }
    bool peek(char c) {
        ws();
        return pos < s.size() && s[pos] == c;
    }
    std::string word() {
        ws();
        std::size_t b = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '-' || s[pos] == '_'))
            ++pos;
        if (b == pos) fail("expected a token");
        return s.substr(b, pos - b);
    }
    std::int64_t integer() {
        std::string w = word();
        try {
            std::size_t used = 0;
            std::int64_t x = std::stoll(w, &used);
            if (used != w.size()) fail("bad integer '" + w + "'");
            return x;
        } catch (const std::logic_error&) {
            fail("bad integer '" + w + "'");
        }
    }
    Vertex vertex() {
        if (peek('(')) {
            if (amb && *amb != Ambient::TInf) fail("mixed vertex formats");
            amb = Ambient::TInf;
            expect('(');
            std::int64_t j = integer(), i = integer();
            expect(')');
            if (j < 0 || i < 0 || i >= (std::int64_t{1} << kIndexBits)) fail("vertex out of range");
            return tv(static_cast<int>(j), i);
        }
        if (amb && *amb != Ambient::PInf) fail("mixed vertex formats");
        amb = Ambient::PInf;
        return integer();
    }

    // builds into a flat postorder list; ambient is fixed up afterwards
    struct Raw {
        int kind;  // 0 atom, 1 bot, 2 join
        Vertex a = 0, b = 0;
        int l = -1, r = -1;
    };
    std::vector<Raw> raw;

    int tree() {
        expect('(');
        std::string head = word();
        int id;
        if (head == "atom") {
            Vertex a = vertex(), b = vertex();
            raw.push_back({0, a, b});
            id = static_cast<int>(raw.size()) - 1;
        } else if (head == "bot") {
            raw.push_back({1});
            id = static_cast<int>(raw.size()) - 1;
        } else if (head == "join") {
            int l = tree();
            int r = tree();
            raw.push_back({2, 0, 0, l, r});
            id = static_cast<int>(raw.size()) - 1;
        } else {
            fail("unknown head '" + head + "'");
        }
        expect(')');
        return id;
    }
};

}  // namespace

std::string JoinTree::sexp() const {
    if (empty()) return "(empty)";
    std::ostringstream os;
    write_sexp(os, *this, root());
    return os.str();
}

JoinTree JoinTree::parse_sexp(const std::string& s) {
    SexpParser p;
    p.s = s;
    p.ws();
    {
        std::size_t save = p.pos;
        if (p.peek('(')) {
            ++p.pos;
            p.ws();
            if (s.compare(p.pos, 5, "empty") == 0) {
                p.pos += 5;
                p.expect(')');
                p.ws();
                if (p.pos != s.size()) p.fail("trailing input");
                return JoinTree(Ambient::PInf);
            }
        }
        p.pos = save;
    }
    p.tree();
    p.ws();
    if (p.pos != s.size()) p.fail("trailing input");
    Ambient a = p.amb.value_or(Ambient::PInf);
    // raw is already in postorder
    JoinTree t(a);
    for (auto& r : p.raw) {
        JTNode n;
        if (r.kind == 0) {
            n.label = make_edge(a, r.a, r.b);
        } else if (r.kind == 2) {
            n.left = r.l;
            n.right = r.r;
            n.size = 1 + t.nodes_[r.l].size + t.nodes_[r.r].size;
        }
        t.nodes_.push_back(n);
    }
    return t;
}

bool JoinTree::operator==(const JoinTree& o) const {
    if (amb_ != o.amb_ || nodes_.size() != o.nodes_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto &x = nodes_[i], &y = o.nodes_[i];
        if (x.left != y.left || x.right != y.right || x.label != y.label) return false;
    }
    return true;
}

JoinTree restrict_jointree(const JoinTree& a, const VertexSet& s) {
    JoinTree t = a;
    if (a.empty()) return t;
    PatternGraph kept = restrict_away(a.graph(), s);
    std::vector<JTNode> nodes = a.nodes();
    for (auto& n : nodes)
        if (n.leaf() && n.label && !kept.has_edge(*n.label)) n.label.reset();
    // rebuild through the public constructors to keep the invariants in one place
    std::vector<JoinTree> built(nodes.size(), JoinTree(a.ambient()));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.leaf())
            built[i] = n.label ? JoinTree::atom(a.ambient(), *n.label) : JoinTree::bot(a.ambient());
        else
            built[i] = JoinTree::join(built[n.left], built[n.right]);
    }
    return built.back();
}

std::vector<int> sub_join_trees(const JoinTree& a, bool proper_only) {
    std::vector<int> out{-1};
    for (int v = 0; v < a.num_nodes(); ++v)
        if (!proper_only || v != a.root()) out.push_back(v);
    return out;
}

std::int64_t fib(int l) {
    if (l < 1) throw std::invalid_argument("Fib index must be >= 1");
    std::int64_t x = 1, y = 1;
    for (int i = 2; i < l; ++i) {
        std::int64_t z = x + y;
        x = y;
        y = z;
    }
    return y;
}

JoinTree jointree_rd(std::int64_t p, std::int64_t q) {
    if (q <= p) throw std::invalid_argument("empty interval");
    if (q - p == 1) return JoinTree::atom(Ambient::PInf, Edge{p, q});
    std::int64_t m = p + (q - p + 1) / 2;
    return JoinTree::join(jointree_rd(p, m), jointree_rd(m, q));
}

JoinTree jointree_mo(std::int64_t p, std::int64_t q) {
    if (q <= p) throw std::invalid_argument("empty interval");
    if (q - p > 20) throw std::length_error("MO join-tree has 2^k - 1 nodes; refusing k > 20");
    if (q - p == 1) return JoinTree::atom(Ambient::PInf, Edge{p, q});
    return JoinTree::join(jointree_mo(p, q - 1), jointree_mo(p + 1, q));
}

JoinTree jointree_fo(std::int64_t p, std::int64_t q) {
    if (q <= p) throw std::invalid_argument("empty interval");
    std::int64_t len = q - p;
    if (len == 1) return JoinTree::atom(Ambient::PInf, Edge{p, q});
    int l = 3;
    while (fib(l) < len) ++l;
    std::int64_t s = std::min(fib(l - 1), len - 1);
    return JoinTree::join(jointree_fo(p, p + s), jointree_fo(q - s, q));
}

JoinTree canonical_rd(int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    return jointree_rd(0, k);
}
JoinTree canonical_mo(int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    return jointree_mo(0, k);
}
JoinTree canonical_fo(int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    return jointree_fo(0, k);
}

namespace {

JoinTree tk_at(Vertex x) {
    Vertex l = tchild(x, 0), r = tchild(x, 1);
    JoinTree el = JoinTree::atom(Ambient::TInf, Edge{l, x});
    JoinTree er = JoinTree::atom(Ambient::TInf, Edge{r, x});
    if (tlevel(x) == 1) return JoinTree::join(el, er);
    return JoinTree::join(JoinTree::join(el, tk_at(l)), JoinTree::join(er, tk_at(r)));
}

}  // namespace

JoinTree canonical_tk(int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    return tk_at(tv(k, 0));
}

namespace {

struct Shape {
    struct N {
        int l = -1, r = -1, leaf = -1, parent = -1;
    };
    std::vector<N> n;
    int root = 0;
};

JoinTree realize(const Shape& s, const std::vector<Edge>& es, Ambient a, std::uint64_t orient, int& bit, int v) {
    const auto& x = s.n[v];
    if (x.leaf >= 0) return JoinTree::atom(a, es[x.leaf]);
    bool flip = orient >> (bit++ & 63) & 1;
    JoinTree l = realize(s, es, a, orient, bit, x.l);
    JoinTree r = realize(s, es, a, orient, bit, x.r);
    return flip ? JoinTree::join(r, l) : JoinTree::join(l, r);
}

}  // namespace

std::uint64_t count_minimal_jointrees(int q, bool ordered) {
    if (q <= 0) return 0;
    std::uint64_t c = 1;
    for (int i = 2; i <= q; ++i) c *= static_cast<std::uint64_t>(2 * i - 3);
    if (ordered) c <<= (q - 1);
    return c;
}

std::uint64_t enumerate_minimal_jointrees(const PatternGraph& f, const std::function<bool(const JoinTree&)>& fn,
                                          bool ordered, std::uint64_t cap) {
    const auto& es = f.edges();
    int q = static_cast<int>(es.size());
    if (q == 0) return 0;
    if (count_minimal_jointrees(q, ordered) > cap)
        throw std::length_error("join-tree enumeration over " + std::to_string(q) + " edges exceeds cap");
    Shape s;
    s.n.push_back({-1, -1, 0, -1});
    s.root = 0;
    std::uint64_t count = 0;
    bool stop = false;
    std::function<void(int)> insert = [&](int i) {
        if (stop) return;
        if (i == q) {
            std::uint64_t combos = ordered ? std::uint64_t{1} << (q - 1) : 1;
            for (std::uint64_t o = 0; o < combos && !stop; ++o) {
                int bit = 0;
                ++count;
                if (!fn(realize(s, es, f.ambient(), o, bit, s.root))) stop = true;
            }
            return;
        }
        int existing = static_cast<int>(s.n.size());
        for (int x = 0; x < existing && !stop; ++x) {
            int leaf = static_cast<int>(s.n.size());
            s.n.push_back({-1, -1, i, -1});
            int y = static_cast<int>(s.n.size());
            int par = s.n[x].parent;
            s.n.push_back({x, leaf, -1, par});
            s.n[leaf].parent = y;
            s.n[x].parent = y;
            int old_root = s.root;
            if (par < 0)
                s.root = y;
            else if (s.n[par].l == x)
                s.n[par].l = y;
            else
                s.n[par].r = y;
            insert(i + 1);
            // undo
            if (par < 0)
                s.root = old_root;
            else if (s.n[par].l == y)
                s.n[par].l = x;
            else
                s.n[par].r = x;
            s.n[x].parent = par;
            s.n.pop_back();
            s.n.pop_back();
        }
    };
    insert(1);
    return count;
}

std::vector<JoinTree> all_minimal_jointrees(const PatternGraph& f, bool ordered) {
    std::vector<JoinTree> out;
    enumerate_minimal_jointrees(
        f,
        [&](const JoinTree& t) {
            out.push_back(t);
            return true;
        },
        ordered);
    return out;
}

JoinTree random_jointree(const PatternGraph& f, std::uint64_t seed) {
    const auto& es = f.edges();
    int q = static_cast<int>(es.size());
    if (q == 0) return JoinTree(f.ambient());
    Rng rng(seed);
    std::vector<int> perm(q);
    for (int i = 0; i < q; ++i) perm[i] = i;
    for (int i = q - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    std::vector<Edge> shuffled(q);
    for (int i = 0; i < q; ++i) shuffled[i] = es[perm[i]];
    Shape s;
    s.n.push_back({-1, -1, 0, -1});
    for (int i = 1; i < q; ++i) {
        int x = static_cast<int>(rng.below(s.n.size()));
        int leaf = static_cast<int>(s.n.size());
        s.n.push_back({-1, -1, i, -1});
        int y = static_cast<int>(s.n.size());
        int par = s.n[x].parent;
        s.n.push_back({x, leaf, -1, par});
        s.n[leaf].parent = y;
        s.n[x].parent = y;
        if (par < 0)
            s.root = y;
        else if (s.n[par].l == x)
            s.n[par].l = y;
        else
            s.n[par].r = y;
    }
    int bit = 0;
    return realize(s, shuffled, f.ambient(), rng(), bit, s.root);
}

}  // namespace phikit
