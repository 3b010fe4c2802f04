#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "phikit/jointree.hpp"
#include "phikit/rational.hpp"
#include "phikit/simplex.hpp"

namespace phikit {

using Profile = std::vector<Rational>;  // (a_0, ..., a_k)

bool in_profile_space(const Profile& a);  // entries in [0,1], sum >= 1
Rational profile_norm(const Profile& a);
std::string profile_str(const Profile& a);
Profile parse_profile(const std::string& s);  // "1/2,0,1/2"

Profile rd_profile(int k);
Profile mo_profile(int k);
Profile fib_profile(int k);

// Interval structure of a connected join-tree over P_{p,q}. Only internal
// nodes carry LP variables; atoms have cost 0.
struct IntervalNode {
    int node;               // index in the JoinTree
    std::int64_t lo, hi;    // interval of Gr at this node
    int child[2] = {-1, -1};  // indices into the IntervalTree vector, -1 for atoms
    std::int64_t child_lo[2], child_hi[2];
};
struct IntervalTree {
    std::int64_t lo = 0, hi = 0;
    std::vector<IntervalNode> nodes;  // internal nodes, root first
};
// throws std::invalid_argument when A is not a connected interval tree
IntervalTree interval_tree(const JoinTree& a);

struct NodeProfile {
    int node;                  // JoinTree node
    std::int64_t lo, hi;
    std::vector<double> b;     // b^{(ν)} over [lo, hi]
    std::vector<double> a;     // incoming a^{(ν)}
    double cost;               // c^{(ν)}
    Profile a_exact, b_exact;  // filled when an exactly feasible primal is known
};

struct LpSolution {
    std::string status;               // optimal / infeasible / unbounded / iteration-limit
    double value = 0;                 // χ_A(ā), or χ_A(ā)+‖ā‖ in free mode
    double chi = 0;                   // χ part only
    bool certified = false;           // lower == upper, both exact
    mpq_class lower, upper;           // certified bounds on `value`
    std::optional<Rational> exact;    // set when certified and representable
    Profile root_profile;             // the fixed ā, or the optimum found in free mode
    std::vector<NodeProfile> nodes;
    bool node_sums_ok = false;        // every child input sums >= 1, checked exactly
    int rows = 0, cols = 0;
    std::uint64_t pivots = 0;
};

struct ChiOptions {
    bool exact = false;                          // rational simplex end to end
    std::uint64_t exact_cap = 400000;            // tableau entries allowed in exact mode
};

// χ_A(ā) for fixed ā, or min_ā χ_A(ā)+‖ā‖ when `a` is nullopt.
LpSolution chi_lp(const JoinTree& a, const std::optional<Profile>& prof, const ChiOptions& opt = {});

// All connected interval split trees over P_{0,k}. Count for k = 1..4 is 1,1,3,22.
std::uint64_t count_interval_trees(int k);
std::uint64_t for_each_interval_tree(int k, const std::function<bool(const JoinTree&)>& fn,
                                     std::uint64_t cap = 1000000);

struct ChiGlobal {
    double value = 0;
    std::optional<Rational> exact;
    JoinTree argmin;
    std::uint64_t trees = 0;
};
// min over all connected join-trees; throws std::length_error when the tree count exceeds cap
ChiGlobal chi_global(int k, const std::optional<Profile>& prof, std::uint64_t cap = 1000000);

// Brute force on the grid (1/res)Z: every b̄ restricted to the grid. Values are
// returned in units of 1/res. Meant for k <= 4.
class GridChi {
public:
    GridChi(const JoinTree& a, int res);
    int res() const { return res_; }
    int k() const { return static_cast<int>(hi_ - lo_); }
    // χ_A(ā) for ā on the grid (units of 1/res); -1 if ā is not in 𝒫
    std::int64_t at(const std::vector<int>& a_units) const;
    // min over grid ā in 𝒫 of χ_A(ā)+‖ā‖
    std::int64_t free_min() const;

private:
    // per internal node: suffix minima H(a) = min_{b >= a} (Σb + max over children), over (res+1)^dim
    void build(int t);
    std::int32_t lookup(int t, const int* coords) const;  // H at node t, coords over its interval

    IntervalTree it_;
    int res_;
    std::int64_t lo_, hi_;
    std::vector<std::vector<std::int32_t>> h_;
};

// rational closest to x with denominator <= maxden (continued fractions)
mpq_class rationalize(double x, long maxden = 1000000);

}  // namespace phikit
