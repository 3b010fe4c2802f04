#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phikit/graph.hpp"
#include "phikit/rng.hpp"

namespace phikit {

struct JTNode {
    int left = -1, right = -1;    // both -1 for a leaf
    std::optional<Edge> label;    // leaves only; nullopt is ⊥
    int size = 1;                 // nodes in this subtree
    bool leaf() const { return left < 0; }
};

// Rooted binary tree with edge/⊥ leaves. Nodes are stored in postorder, so the
// subtree of node v is the contiguous range [v - size + 1, v] and the root is
// the last node. A tree with no nodes is the empty join-tree ⟨⟩.
class JoinTree {
public:
    explicit JoinTree(Ambient a = Ambient::PInf) : amb_(a) {}

    static JoinTree atom(Ambient a, const Edge& e);
    static JoinTree bot(Ambient a);
    static JoinTree join(const JoinTree& b, const JoinTree& c);

    Ambient ambient() const { return amb_; }
    bool empty() const { return nodes_.empty(); }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int root() const { return num_nodes() - 1; }
    const JTNode& node(int v) const { return nodes_[v]; }
    const std::vector<JTNode>& nodes() const { return nodes_; }
    int num_leaves() const;

    std::vector<Edge> labels_at(int v) const;  // non-⊥ labels, left to right, with repeats
    PatternGraph graph_at(int v) const;
    PatternGraph graph() const { return empty() ? PatternGraph(amb_) : graph_at(root()); }
    JoinTree subtree(int v) const;

    // [min vertex, max vertex] of Gr at node v; P_inf only
    std::pair<std::int64_t, std::int64_t> interval_at(int v) const;

    bool is_minimal() const;    // no ⊥, no repeated label
    bool is_connected() const;  // Gr(D) connected for every non-empty D ⪯ A

    std::string sexp() const;
    static JoinTree parse_sexp(const std::string& s);

    bool operator==(const JoinTree& o) const;

private:
    Ambient amb_;
    std::vector<JTNode> nodes_;
};

JoinTree restrict_jointree(const JoinTree& a, const VertexSet& s);  // A ⊖ S

// Node indices of every D ⪯ A, with -1 standing for ⟨⟩ (listed first).
std::vector<int> sub_join_trees(const JoinTree& a, bool proper_only = false);

// Interval join-trees over P_{0,k}
JoinTree canonical_rd(int k);
JoinTree canonical_mo(int k);  // 2^k - 1 nodes, so k <= 20
JoinTree canonical_fo(int k);
JoinTree jointree_rd(std::int64_t p, std::int64_t q);
JoinTree jointree_mo(std::int64_t p, std::int64_t q);
JoinTree jointree_fo(std::int64_t p, std::int64_t q);
JoinTree canonical_tk(int k);  // over T_k rooted at (k,0)

std::int64_t fib(int l);  // Fib(1) = Fib(2) = 1

// Minimal join-trees with graph F. By default one tree per unordered shape,
// (2q-3)!! of them; with `ordered` every child order is produced as well.
std::uint64_t enumerate_minimal_jointrees(const PatternGraph& f, const std::function<bool(const JoinTree&)>& fn,
                                          bool ordered = false, std::uint64_t cap = 20000000);
std::uint64_t count_minimal_jointrees(int q, bool ordered = false);
std::vector<JoinTree> all_minimal_jointrees(const PatternGraph& f, bool ordered = false);
JoinTree random_jointree(const PatternGraph& f, std::uint64_t seed);

}  // namespace phikit
