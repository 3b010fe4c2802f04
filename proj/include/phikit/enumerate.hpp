#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "phikit/graph.hpp"
#include "phikit/rng.hpp"

namespace phikit {

enum SubgraphFilter : unsigned {
    kAny = 0,
    kConnected = 1,
    kGrounded = 2,
    kUngrounded = 4,
    kNonEmpty = 8,
};

bool passes_filter(const PatternGraph& g, unsigned filter);

constexpr std::uint64_t kExhaustiveCap = std::uint64_t{1} << 24;

// All 2^|E| edge subsets of the window (|E| <= 24), in mask order. Returns the
// number of graphs handed to the callback. The callback may return false to stop.
std::uint64_t for_each_subgraph(const PatternGraph& window, unsigned filter,
                                const std::function<bool(const PatternGraph&)>& fn,
                                std::uint64_t cap = kExhaustiveCap);

// All non-empty connected edge subsets of the window, without visiting the
// disconnected ones. Works on windows with up to 64 edges.
std::uint64_t for_each_connected_subgraph(const PatternGraph& window,
                                          const std::function<bool(const PatternGraph&)>& fn,
                                          std::uint64_t cap = std::uint64_t{1} << 26);

PatternGraph sample_uniform_subgraph(const PatternGraph& window, Rng& rng);

// Dense subgraph of the window T_k (root (k,0)), one bit per edge grouped by
// the level of the lower endpoint. Edges outside the window cannot be stored.
class TreeBitset {
public:
    explicit TreeBitset(int k);

    int height() const { return k_; }
    bool has(int level, std::int64_t index) const;  // edge (level,index)-(level+1,index/2)
    void set(int level, std::int64_t index);

    void add_subtree(Vertex z);        // T_z
    void add_subtree_plus(Vertex z);   // T_z^+, z must lie strictly below the window root
    void add_path_down(Vertex z, int len, Rng& rng);  // random downward path of up to len edges

    std::uint64_t num_edges() const;
    int boundary() const;        // relative to T_inf; the window root's parent edge is never present
    int max_complete_height() const;
    bool meets_subtree_plus(Vertex z) const;  // E(G) ∩ E(T_z^+) ≠ ∅ (parent edge only counted inside the window)

    PatternGraph to_graph() const;
    static TreeBitset from_graph(int k, const PatternGraph& g);

private:
    bool any_in_range(int level, std::int64_t lo, std::int64_t hi) const;  // [lo, hi)

    int k_;
    std::vector<std::vector<std::uint64_t>> bits_;  // bits_[j] covers 2^(k-j) edges
};

// Seeded structured subgraph of T_k: unions of a few random T_z, T_z^+ and
// downward path fragments.
TreeBitset sample_structured_subgraph(int k, Rng& rng, int max_pieces = 3);

}  // namespace phikit
