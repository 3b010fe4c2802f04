#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phikit/chi.hpp"
#include "phikit/jointree.hpp"

namespace phikit {

// π_1, ..., π_k : [n] → [n], stored 0-based; pi[h-1] is π_h.
struct PermSequence {
    int n = 0;
    std::vector<std::vector<int>> pi;

    int k() const { return static_cast<int>(pi.size()); }
    static PermSequence random(int n, int k, std::uint64_t seed);
    static PermSequence identity(int n, int k);
    void validate() const;  // throws unless every π_h is a bijection of [n]
};

// π_k ∘ ... ∘ π_1, as a table
std::vector<int> compose_direct(const PermSequence& ps);

struct SimParams {
    double c = 2.0;                    // polylog exponent in the sample counts
    std::uint64_t seed = 1;
    double outer_mult = 1.0;           // scales the number of outer rectangles
    std::uint64_t max_samples = 1ULL << 26;  // per node evaluation
};

enum class IsoKind { NotIsolated, Isolated, Inconsistent };
const char* iso_name(IsoKind k);

struct IsolationOutcome {
    IsoKind kind = IsoKind::NotIsolated;
    std::vector<int> path;                // x_0..x_k when isolated
    int candidates = 0;                   // π̄-paths inside the rectangle
    std::uint64_t samples = 0;            // samples T_ℓ inspected, all levels
    std::uint64_t evaluations = 0;        // node evaluations, all levels
    std::vector<std::uint64_t> level_candidates;  // Σ |paths| seen per depth
};

struct EnumResult {
    std::vector<std::vector<int>> paths;  // isolated, distinct, sorted by x_0
    bool sound = true;                    // every isolated tuple is a true π̄-path
    bool complete = false;                // all n paths found
    std::uint64_t rectangles = 0;         // outer rectangles drawn
    std::uint64_t evaluated = 0;          // rectangles whose root formula was evaluated
    std::uint64_t inconsistent = 0;
    std::uint64_t samples = 0;
};

struct SymbolicSize {
    double log2_size = 0;   // log2 of the formula size bound
    double log_n_size = 0;
    int depth = 0;
    int outputs = 0;        // 1 + (k+1)·B output formulas at the root
    std::vector<std::uint64_t> samples_per_node;  // m per internal node, root first
};

// Simulates the formulas f_{A,ā}, ḡ_{A,ā} on rectangle inputs. The formulas
// are never built; each gate value is computed from the sets it reads.
class PermProdSim {
public:
    PermProdSim(const JoinTree& tree, const Profile& a, const PermSequence& ps, const SimParams& p = {});

    int n() const { return ps_.n; }
    int k() const { return ps_.k(); }
    const Profile& profile() const { return a_; }
    // per internal node (root first): sampling probability per coordinate and m
    const std::vector<std::vector<double>>& probabilities() const { return prob_; }
    const std::vector<std::uint64_t>& samples_per_node() const { return m_; }

    // f and ḡ at the root for S̄ = sets (values in [0, n))
    IsolationOutcome isolate(const std::vector<std::vector<int>>& sets) const;
    // the OR over outer rectangles S_ℓ ⊆ [n], each S_{ℓ,h} kept with probability n^{-a_h}
    EnumResult enumerate_paths() const;

    struct Rect;

private:
    struct Eval;
    bool atom_gate(const std::vector<int>& xs, std::int64_t lo, std::int64_t hi, std::vector<std::uint32_t>& g) const;
    void eval(int t, const Rect& r, const std::vector<int>& xs, Eval& ev, int depth, std::vector<std::uint32_t>& g,
              bool& f, bool& conflict) const;
    IsolationOutcome run(const Rect& root) const;

    JoinTree tree_;
    Profile a_;
    PermSequence ps_;
    SimParams p_;
    IntervalTree it_;
    int bits_ = 1;
    std::vector<std::vector<int>> path_;   // path_[g][h]: value at coordinate h of the path with x_0 = g
    std::vector<std::vector<int>> at_;     // at_[h][v]: id of the path through v at coordinate h
    std::vector<std::vector<double>> prob_;
    std::vector<std::vector<std::uint64_t>> thr_;
    std::vector<std::uint64_t> m_;
    std::vector<int> atom_of_;             // child slot -> -1 or the atom's right endpoint
};

SymbolicSize symbolic_size(const JoinTree& tree, const Profile& a, int n, const SimParams& p = {});

}  // namespace phikit
