#include "phikit/enumerate.hpp"

#include <algorithm>
#include <stdexcept>

namespace phikit {

bool passes_filter(const PatternGraph& g, unsigned filter) {
    if ((filter & kNonEmpty) && g.num_edges() == 0) return false;
    if ((filter & kConnected) && (g.num_edges() == 0 || !is_connected(g))) return false;
    if ((filter & kGrounded) && !is_grounded(g)) return false;
    if ((filter & kUngrounded) && !is_ungrounded(g)) return false;
    return true;
}

std::uint64_t for_each_subgraph(const PatternGraph& window, unsigned filter,
                                const std::function<bool(const PatternGraph&)>& fn, std::uint64_t cap) {
    std::size_t m = window.num_edges();
    if (m > 24 || (std::uint64_t{1} << m) > cap)
        throw std::length_error("exhaustive enumeration over " + std::to_string(m) + " edges exceeds cap");
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        PatternGraph g = edge_subset(window, mask);
        if (!passes_filter(g, filter)) continue;
        ++count;
        if (!fn(g)) break;
    }
    return count;
}

namespace {

struct ConnectedEnum {
    const PatternGraph& w;
    std::vector<std::uint64_t> nb;  // line-graph adjacency
    const std::function<bool(const PatternGraph&)>& fn;
    std::uint64_t cap;
    std::uint64_t count = 0;
    bool stop = false;

    void grow(std::uint64_t s, std::uint64_t x, std::uint64_t banned) {
        if (stop) return;
        if (++count > cap) throw std::length_error("connected subgraph enumeration exceeds cap");
        if (!fn(edge_subset(w, s))) {
            stop = true;
            return;
        }
        std::uint64_t done = 0;
        while (x && !stop) {
            std::uint64_t v = x & (~x + 1);
            x &= ~v;
            int vi = __builtin_ctzll(v);
            std::uint64_t b2 = banned | done;
            std::uint64_t nx = (x | nb[vi]) & ~s & ~v & ~b2;
            grow(s | v, nx, b2);
            done |= v;
        }
    }
};

}  // namespace

std::uint64_t for_each_connected_subgraph(const PatternGraph& window,
                                          const std::function<bool(const PatternGraph&)>& fn, std::uint64_t cap) {
    std::size_t m = window.num_edges();
    if (m > 64) throw std::length_error("connected enumeration supports at most 64 edges");
    ConnectedEnum ce{window, std::vector<std::uint64_t>(m, 0), fn, cap};
    const auto& es = window.edges();
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            if (a != b && (es[a].u == es[b].u || es[a].u == es[b].v || es[a].v == es[b].u || es[a].v == es[b].v))
                ce.nb[a] |= std::uint64_t{1} << b;
    for (std::size_t s = 0; s < m && !ce.stop; ++s) {
        std::uint64_t below = (std::uint64_t{1} << s) - 1;
        std::uint64_t sv = std::uint64_t{1} << s;
        ce.grow(sv, ce.nb[s] & ~below, below);
    }
    return ce.count;
}

PatternGraph sample_uniform_subgraph(const PatternGraph& window, Rng& rng) {
    std::vector<Edge> es;
    for (auto& e : window.edges())
        if (rng() & 1) es.push_back(e);
    return PatternGraph(window.ambient(), std::move(es));
}

// ---------------------------------------------------------------------------

TreeBitset::TreeBitset(int k) : k_(k), bits_(k) {
    if (k < 1 || k > 30) throw std::invalid_argument("TreeBitset height must be in [1,30]");
    for (int j = 0; j < k; ++j) {
        std::int64_t width = std::int64_t{1} << (k - j);
        bits_[j].assign(static_cast<std::size_t>((width + 63) / 64), 0);
    }
}

bool TreeBitset::has(int level, std::int64_t index) const {
    if (level < 0 || level >= k_ || index < 0 || index >= (std::int64_t{1} << (k_ - level))) return false;
    return bits_[level][index >> 6] >> (index & 63) & 1;
}

void TreeBitset::set(int level, std::int64_t index) {
    if (level < 0 || level >= k_ || index < 0 || index >= (std::int64_t{1} << (k_ - level)))
        throw std::out_of_range("edge outside the tree window");
    bits_[level][index >> 6] |= std::uint64_t{1} << (index & 63);
}

void TreeBitset::add_subtree(Vertex z) {
    int l = tlevel(z);
    std::int64_t i = tindex(z);
    for (int j = 0; j < l; ++j) {
        std::int64_t w = std::int64_t{1} << (l - j);
        std::int64_t lo = i * w, hi = lo + w;
        for (std::int64_t x = lo; x < hi;) {
            if ((x & 63) == 0 && hi - x >= 64) {
                bits_[j][x >> 6] = ~std::uint64_t{0};
                x += 64;
            } else {
                set(j, x);
                ++x;
            }
        }
    }
}

void TreeBitset::add_subtree_plus(Vertex z) {
    add_subtree(z);
    set(tlevel(z), tindex(z));
}

void TreeBitset::add_path_down(Vertex z, int len, Rng& rng) {
    Vertex v = z;
    for (int s = 0; s < len && tlevel(v) > 0; ++s) {
        Vertex c = tchild(v, static_cast<int>(rng() & 1));
        set(tlevel(c), tindex(c));
        v = c;
    }
}

std::uint64_t TreeBitset::num_edges() const {
    std::uint64_t n = 0;
    for (auto& lvl : bits_)
        for (auto w : lvl) n += __builtin_popcountll(w);
    return n;
}

namespace {

// keep bits 0,2,4,... of x and pack them into the low 32 bits
std::uint64_t compress_even(std::uint64_t x) {
    x &= 0x5555555555555555ULL;
    x = (x | (x >> 1)) & 0x3333333333333333ULL;
    x = (x | (x >> 2)) & 0x0F0F0F0F0F0F0F0FULL;
    x = (x | (x >> 4)) & 0x00FF00FF00FF00FFULL;
    x = (x | (x >> 8)) & 0x0000FFFF0000FFFFULL;
    x = (x | (x >> 16)) & 0x00000000FFFFFFFFULL;
    return x;
}

}  // namespace

int TreeBitset::boundary() const {
    long count = 0;
    for (int j = 0; j <= k_; ++j) {
        std::int64_t width = std::int64_t{1} << (k_ - j);
        std::size_t words = static_cast<std::size_t>((width + 63) / 64);
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t valid = width - static_cast<std::int64_t>(w * 64) >= 64
                                      ? ~std::uint64_t{0}
                                      : (std::uint64_t{1} << (width - w * 64)) - 1;
            std::uint64_t up = j < k_ ? bits_[j][w] : 0;
            std::uint64_t in, full;
            if (j == 0) {
                in = up;
                full = up;
            } else {
                // children of vertices 64w..64w+63 are edges 128w..128w+127 at level j-1
                const auto& lo = bits_[j - 1];
                std::uint64_t a = 2 * w < lo.size() ? lo[2 * w] : 0;
                std::uint64_t b = 2 * w + 1 < lo.size() ? lo[2 * w + 1] : 0;
                std::uint64_t left = compress_even(a) | (compress_even(b) << 32);
                std::uint64_t right = compress_even(a >> 1) | (compress_even(b >> 1) << 32);
                in = up | left | right;
                full = up & left & right;
            }
            count += __builtin_popcountll(in & ~full & valid);
        }
    }
    return static_cast<int>(count);
}

int TreeBitset::max_complete_height() const {
    // full marks vertices v at the current level with T_v inside the graph;
    // leaves are trivially complete, masking with the parent edge happens below
    std::vector<std::uint64_t> full(bits_[0].size(), ~std::uint64_t{0});
    int best = 0;
    for (int j = 1; j <= k_; ++j) {
        std::int64_t width = std::int64_t{1} << (k_ - j);
        std::vector<std::uint64_t> next(static_cast<std::size_t>((width + 63) / 64), 0);
        const auto& lo = bits_[j - 1];
        bool any = false;
        for (std::size_t w = 0; w < next.size(); ++w) {
            std::uint64_t a = 2 * w < lo.size() ? lo[2 * w] & full[2 * w] : 0;
            std::uint64_t b = 2 * w + 1 < lo.size() ? lo[2 * w + 1] & full[2 * w + 1] : 0;
            std::uint64_t left = compress_even(a) | (compress_even(b) << 32);
            std::uint64_t right = compress_even(a >> 1) | (compress_even(b >> 1) << 32);
            next[w] = left & right;
            if (width < 64) next[w] &= (std::uint64_t{1} << width) - 1;
            any |= next[w] != 0;
        }
        if (!any) break;
        best = j;
        full.swap(next);
    }
    return best;
}

bool TreeBitset::any_in_range(int level, std::int64_t lo, std::int64_t hi) const {
    const auto& b = bits_[level];
    for (std::int64_t x = lo; x < hi;) {
        if ((x & 63) == 0 && hi - x >= 64) {
            if (b[x >> 6]) return true;
            x += 64;
        } else {
            if (b[x >> 6] >> (x & 63) & 1) return true;
            ++x;
        }
    }
    return false;
}

bool TreeBitset::meets_subtree_plus(Vertex z) const {
    int l = tlevel(z);
    std::int64_t i = tindex(z);
    if (has(l, i)) return true;
    for (int j = 0; j < l; ++j) {
        std::int64_t w = std::int64_t{1} << (l - j);
        if (any_in_range(j, i * w, (i + 1) * w)) return true;
    }
    return false;
}

PatternGraph TreeBitset::to_graph() const {
    std::vector<Edge> es;
    for (int j = 0; j < k_; ++j) {
        std::int64_t width = std::int64_t{1} << (k_ - j);
        for (std::int64_t i = 0; i < width; ++i)
            if (has(j, i)) es.push_back({tv(j, i), tv(j + 1, i >> 1)});
    }
    return PatternGraph(Ambient::TInf, std::move(es));
}

TreeBitset TreeBitset::from_graph(int k, const PatternGraph& g) {
    TreeBitset t(k);
    for (auto& e : g.edges()) t.set(tlevel(e.u), tindex(e.u));
    return t;
}

TreeBitset sample_structured_subgraph(int k, Rng& rng, int max_pieces) {
    TreeBitset t(k);
    int pieces = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_pieces)));
    for (int p = 0; p < pieces; ++p) {
        int kind = static_cast<int>(rng.below(10));
        if (kind < 4) {
            int l = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
            Vertex z = tv(l, static_cast<std::int64_t>(rng.below(std::uint64_t{1} << (k - l))));
            t.add_subtree(z);
        } else if (kind < 8) {
            int l = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
            Vertex z = tv(l, static_cast<std::int64_t>(rng.below(std::uint64_t{1} << (k - l))));
            t.add_subtree_plus(z);
        } else {
            int l = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
            Vertex z = tv(l, static_cast<std::int64_t>(rng.below(std::uint64_t{1} << (k - l))));
            t.add_path_down(z, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(l))), rng);
        }
    }
    return t;
}

}  // namespace phikit
