#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "phikit/graph.hpp"
#include "phikit/jointree.hpp"
#include "phikit/rational.hpp"
#include "phikit/threshold.hpp"

namespace phikit {

enum class Rule : std::uint8_t { Atomic, Dagger, InvDagger, DDagger };
const char* rule_name(Rule r);

struct TraceStep {
    Rule rule;
    int node;          // node of A the rule was applied at
    std::string side;  // "B"/"C" for (†)-type rules, empty otherwise
    int d = -1, e = -1;
    std::string restriction;  // retained edges (Φ) or S (Φ(A|S)), human readable
    Rational value;
};

struct PotentialValue {
    Rational value;
    std::vector<TraceStep> trace;  // filled only when requested
};

// Exact evaluator for Φ_θ(A) and Φ_θ(A|S) on one join-tree. Edges and
// vertices of Gr(A) are indexed into 64-bit masks, so |E(A)|, |V(A)| <= 64.
class PhiEvaluator {
public:
    PhiEvaluator(const JoinTree& a, const ThresholdWeighting& th, std::uint64_t state_cap = 10000000);

    const JoinTree& tree() const { return a_; }

    Rational phi();                                       // Φ(A)
    Rational phi_restricted(const VertexSet& s);          // Φ(A ⊖ S)
    Rational phi_at(int node, std::uint64_t retained);    // Φ of the subtree at node with labels ⊆ retained
    Rational phi_cond(const VertexSet& s);                // Φ(A|S)
    Rational phi_cond_at(int node, std::uint64_t s);

    std::vector<TraceStep> trace_phi();
    std::vector<TraceStep> trace_phi_cond(const VertexSet& s);

    // Φ(A) = Σ c_F Δ(F) from the tight rules, keyed by edge mask of F
    std::map<std::uint64_t, Rational> decompose();

    // helpers on masks
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_vertices() const { return static_cast<int>(verts_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const VertexSet& vertices() const { return verts_; }
    std::uint64_t edge_mask_at(int node) const { return emask_[node]; }
    std::uint64_t vertex_mask(std::uint64_t emask) const;
    std::uint64_t vertex_mask_of(const VertexSet& s) const;  // vertices outside V(A) are dropped
    std::uint64_t restrict_mask(std::uint64_t emask, std::uint64_t vmask);  // F ⊖ S on masks
    Rational delta_mask(std::uint64_t emask) const;
    PatternGraph graph_of(std::uint64_t emask) const;
    std::uint64_t states() const { return states_; }

private:
    struct Choice {
        Rule rule = Rule::Atomic;
        bool side_c = false;
        int d = -1, e = -1;
    };
    struct Entry {
        Rational v;
        Choice c;
    };
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& comps(std::uint64_t emask);
    const Entry& eval(int node, std::uint64_t r);
    const Entry& eval_cond(int node, std::uint64_t s);
    void bump();
    void expand(int node, std::uint64_t r, const Rational& w, std::map<std::uint64_t, Rational>& out);
    void trace_rec(int node, std::uint64_t r, std::vector<TraceStep>& out);
    void trace_cond_rec(int node, std::uint64_t s, std::vector<TraceStep>& out, int budget);
    std::string mask_str_e(std::uint64_t m) const;
    std::string mask_str_v(std::uint64_t m) const;

    JoinTree a_;
    ThresholdWeighting th_;
    std::uint64_t cap_;
    std::uint64_t states_ = 0;
    std::vector<Edge> edges_;
    VertexSet verts_;
    std::vector<std::uint64_t> ends_;   // per edge: vertex mask of its endpoints
    std::vector<std::uint64_t> adj_;    // per edge: edges sharing a vertex
    std::vector<std::int64_t> w_;       // θ(e) * lcd
    std::int64_t lcd_ = 1;
    std::vector<std::uint64_t> emask_;  // per node: labels in the subtree
    std::vector<std::uint64_t> vfull_;  // per node: V(Gr(subtree))
    std::vector<std::unordered_map<std::uint64_t, Entry>> memo_, memo_cond_;
    std::unordered_map<std::uint64_t, std::vector<std::pair<std::uint64_t, std::uint64_t>>> comp_cache_;
};

PotentialValue phi(const JoinTree& a, const ThresholdWeighting& th, bool trace = false);
PotentialValue phi_cond(const JoinTree& a, const VertexSet& s, const ThresholdWeighting& th, bool trace = false);

struct Decomposition {
    Rational phi;
    std::vector<std::pair<PatternGraph, Rational>> terms;  // (F, c_F), c_F > 0
    Rational reconstructed;   // Σ c_F Δ(F)
    Rational max_vertex_mass; // max_v Σ_{F ∋ v} c_F
};
// throws std::logic_error if the identity or the mass bound fails
Decomposition phi_decompose(const JoinTree& a, const ThresholdWeighting& th);

enum class TreeMode { Exhaustive, Canonical, Sampled };

struct MinPhiResult {
    Rational value;
    JoinTree argmin;
    std::uint64_t trees = 0;
};

// min over the chosen family of Φ(A) (or Φ(A|∅) when cond is set). Sampled
// mode draws `samples` random minimal trees from `seed`.
MinPhiResult min_phi_over_jointrees(const PatternGraph& f, const ThresholdWeighting& th, TreeMode mode,
                                    bool cond = false, std::uint64_t seed = 1, int samples = 200);

// min over minimal join-trees of max_{B ⪯ A} Δ(B)
MinPhiResult kappa_fixed_theta(const PatternGraph& g, const ThresholdWeighting& th);

}  // namespace phikit
