#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phikit/chi.hpp"
#include "phikit/graph.hpp"
#include "phikit/jointree.hpp"
#include "phikit/rational.hpp"
#include "phikit/threshold.hpp"

namespace phikit {

// Relation 𝒜 ⊆ [n]^V for a sorted vertex set V. A tuple x is coded as
// Σ x_i n^i with i the position of the vertex in V.
class Relation {
public:
    Relation() = default;
    Relation(int n, VertexSet vars);  // empty relation; n^|V| <= 2^24
    static Relation full(int n, VertexSet vars);
    static Relation from_mask(int n, VertexSet vars, std::uint64_t mask);  // universe <= 64

    int n() const { return n_; }
    const VertexSet& vars() const { return vars_; }
    int arity() const { return static_cast<int>(vars_.size()); }
    std::uint64_t universe() const { return universe_; }

    bool contains(std::uint64_t code) const { return (bits_[code >> 6] >> (code & 63)) & 1; }
    void insert(std::uint64_t code);
    void insert(const std::vector<int>& tuple) { insert(encode(tuple)); }
    std::uint64_t size() const;
    bool empty() const { return size() == 0; }
    std::vector<std::uint64_t> codes() const;
    std::uint64_t mask() const;  // universe <= 64

    std::uint64_t encode(const std::vector<int>& tuple) const;
    std::vector<int> decode(std::uint64_t code) const;
    int coord(std::uint64_t code, int i) const;  // value of the i-th variable

    Rational density() const;  // |𝒜| / n^|V|
    bool subset_of(const Relation& o) const;
    std::string str() const;   // "n=2 V={0,1} {(0,1),(1,1)}"

    bool operator==(const Relation& o) const { return n_ == o.n_ && vars_ == o.vars_ && bits_ == o.bits_; }

private:
    int n_ = 1;
    VertexSet vars_;
    std::uint64_t universe_ = 1;
    std::vector<std::uint64_t> bits_ = std::vector<std::uint64_t>(1, 0);
};

Relation rel_union(const Relation& a, const Relation& b);
Relation join(const Relation& a, const Relation& b);
Relation project(const Relation& a, const VertexSet& u);  // u ⊆ V(a)
// ρ: tuples over V \ T agreeing with z on V ∩ T; z lists one value per vertex of t
Relation restrict_rel(const Relation& a, const VertexSet& t, const std::vector<int>& z);

// exact test of count / n^dim <= n^{-Δ}
bool density_at_most(std::uint64_t count, int dim, int n, const Rational& delta);

// |𝒜| <= χ · n^{dim - Φ}, exact
bool chi_density_bound(std::uint64_t size, int dim, int n, const Rational& phi, std::int64_t chi);

// 𝒜 ∈ 𝒫(F|S): every restriction to T ⊇ S has density <= n^{-Δ(F|T)}
bool is_pathset(const Relation& a, const PatternGraph& f, const VertexSet& s, const ThresholdWeighting& th);

struct PathsetTriple {
    Relation a, b, c;   // for an atomic tree only `a` is used
    std::int64_t cost;  // max(χ_B(b), χ_C(c)), or 1 for an atomic cover member
};
struct PathsetCertificate {
    std::int64_t value = 0;
    bool atomic = false;
    std::vector<PathsetTriple> family;
};

// Exact χ_{A|S} by dynamic programming over subsets of the tuple universe.
// Covers can be taken disjoint because pathsets are closed under subsets, and
// each 𝒜_i is best served by ℬ_i, 𝒞_i equal to its projections since χ is
// monotone. Refuses (std::length_error) when n^{|V(node) \ S|} > universe_cap.
class PathsetOracle {
public:
    PathsetOracle(const JoinTree& a, const ThresholdWeighting& th, int n, int universe_cap = 12);

    const JoinTree& tree() const { return a_; }
    int n() const { return n_; }
    VertexSet free_vars(int node, const VertexSet& s) const;  // V(Gr(node)) \ S

    std::int64_t chi(int node, const VertexSet& s, const Relation& r);
    std::int64_t chi(const VertexSet& s, const Relation& r) { return chi(a_.root(), s, r); }
    PathsetCertificate certificate(int node, const VertexSet& s, const Relation& r);
    bool pathset(int node, const VertexSet& s, const Relation& r);

private:
    struct Table {
        VertexSet vars;
        std::vector<std::uint8_t> is_pathset;  // per mask
        std::vector<std::int64_t> cost;        // per mask: cost of one family member equal to it
        std::vector<std::int64_t> g;           // χ per mask
        std::vector<std::uint32_t> pick;       // member containing the lowest tuple in an optimal partition
    };
    const Table& table(int node, const VertexSet& s);
    std::uint64_t mask_in(const Table& t, const Relation& r) const;

    JoinTree a_;
    ThresholdWeighting th_;
    int n_;
    int cap_;
    std::map<std::pair<int, VertexSet>, Table> tables_;
};

// Product relation Π S_h over P_{0,k}; requires |S_h| <= n^{1-a_h} and ā ∈ 𝒫(k)
Relation rectangle_pathset(const Profile& a, const std::vector<std::vector<int>>& sets, int n);

}  // namespace phikit
