#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>

#include "phikit/chi.hpp"
#include "phikit/jointree.hpp"
#include "phikit/rng.hpp"

using namespace phikit;

namespace {

// χ on the grid (1/R)Z by direct recursion over the join-tree, in units of 1/R.
// Every input must sum to at least R. A node with input a picks b >= a,
// pays Σ(b-a), then the worse child on the restrictions of b; atoms cost 0.
class GridOracle {
public:
    GridOracle(const JoinTree& t, int r) : t_(t), r_(r) {}

    std::int64_t chi(const std::vector<int>& a) { return at(t_.root(), a); }

private:
    std::int64_t at(int v, const std::vector<int>& a) {
        int s = 0;
        for (int x : a) s += x;
        const JTNode& nd = t_.node(v);
        if (s < r_) return kInf;
        if (nd.leaf()) return 0;
        auto key = std::make_pair(v, a);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        auto [lo, hi] = t_.interval_at(v);
        auto [llo, lhi] = t_.interval_at(nd.left);
        auto [rlo, rhi] = t_.interval_at(nd.right);
        std::int64_t best = kInf;
        std::vector<int> b(a);
        std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t i, std::int64_t gap) {
            if (gap >= best) return;
            if (i == b.size()) {
                std::vector<int> bl(b.begin() + (llo - lo), b.begin() + (lhi - lo) + 1);
                std::vector<int> br(b.begin() + (rlo - lo), b.begin() + (rhi - lo) + 1);
                std::int64_t c = std::max(at(nd.left, bl), at(nd.right, br));
                best = std::min(best, gap + c);
                return;
            }
            for (int x = a[i]; x <= r_; ++x) {
                b[i] = x;
                rec(i + 1, gap + (x - a[i]));
            }
            b[i] = a[i];
        };
        (void)hi;
        rec(0, 0);
        memo_[key] = best;
        return best;
    }

    static constexpr std::int64_t kInf = 1 << 28;
    const JoinTree& t_;
    int r_;
    std::map<std::pair<int, std::vector<int>>, std::int64_t> memo_;
};

Profile units_to_profile(const std::vector<int>& a, int r) {
    Profile p;
    for (int x : a) p.push_back(Rational(x, r));
    return p;
}

}  // namespace

TEST_CASE("χ of the two-leaf tree") {
    JoinTree t = canonical_rd(2);
    Profile half = {Rational(1, 2), Rational(1, 2), Rational(1, 2)};
    LpSolution s = chi_lp(t, half);
    CHECK(s.status == "optimal");
    CHECK(s.chi == doctest::Approx(0).epsilon(1e-12));
    REQUIRE(s.exact.has_value());
    CHECK(*s.exact == Rational(0));

    LpSolution e = chi_lp(t, Profile{Rational(0), Rational(0), Rational(1)});
    GridOracle o(t, 64);
    CHECK(std::abs(e.chi - o.chi({0, 0, 64}) / 64.0) <= 1.0 / 32);
    CHECK(e.chi == doctest::Approx(1.0));
}

TEST_CASE("χ against the grid oracle") {
    // inputs on the 1/6 grid, search on the 1/12 grid, where these optima land
    const int r = 12;
    Rng rng(17);
    for (int k = 1; k <= 3; ++k) {
        for_each_interval_tree(k, [&](const JoinTree& t) {
            GridOracle o(t, r);
            GridChi g(t, r);
            for (int it = 0; it < 6; ++it) {
                std::vector<int> a(k + 1);
                int sum = 0;
                do {
                    sum = 0;
                    for (int& x : a) sum += x = 2 * static_cast<int>(rng.below(r / 2 + 1));
                } while (sum < r);
                std::int64_t want = o.chi(a);
                LpSolution s = chi_lp(t, units_to_profile(a, r));
                REQUIRE(s.status == "optimal");
                CHECK(std::abs(s.chi - static_cast<double>(want) / r) <= 1.0 / 32);
                CHECK(g.at(a) == want);
                CHECK(s.node_sums_ok);
            }
            return true;
        });
    }
}

TEST_CASE("FO_3 at the uniform third") {
    JoinTree t = canonical_fo(3);
    Profile third(4, Rational(1, 3));
    LpSolution s = chi_lp(t, third);
    CHECK(s.chi <= 1.0 / 3 + 1e-9);
    GridOracle o(t, 12);
    CHECK(o.chi({4, 4, 4, 4}) <= 4);
}

TEST_CASE("free-profile optimum sandwiches") {
    for (int k : {4, 8}) {
        LpSolution s = chi_lp(canonical_rd(k), std::nullopt);
        REQUIRE(s.status == "optimal");
        CHECK(s.value >= 0.5 * std::log2(k) - 1e-9);
        CHECK(s.value <= 0.5 * std::ceil(std::log2(k)) + 1 + 1e-9);
        LpSolution rd = chi_lp(canonical_rd(k), rd_profile(k));
        CHECK(rd.chi + profile_norm(rd_profile(k)).to_double() <= 0.5 * std::ceil(std::log2(k)) + 1 + 1e-9);
    }
    // FO at Fibonacci sizes: optimum <= (ℓ+1)/3
    for (int l = 3; l <= 6; ++l) {
        int k = static_cast<int>(fib(l));
        LpSolution s = chi_lp(canonical_fo(k), std::nullopt);
        CHECK(s.value <= (l + 1) / 3.0 + 1e-9);
    }
}

TEST_CASE("exact and float solves agree") {
    ChiOptions ex;
    ex.exact = true;
    for (int k = 2; k <= 5; ++k) {
        JoinTree t = canonical_fo(k);
        LpSolution f = chi_lp(t, fib_profile(k));
        LpSolution e = chi_lp(t, fib_profile(k), ex);
        REQUIRE(e.exact.has_value());
        CHECK(f.value == doctest::Approx(e.exact->to_double()).epsilon(1e-9));
        CHECK(e.certified);
    }
}

TEST_CASE("profiles and interval trees") {
    CHECK(count_interval_trees(1) == 1);
    CHECK(count_interval_trees(2) == 1);
    CHECK(count_interval_trees(3) == 3);
    CHECK(count_interval_trees(4) == 22);
    std::uint64_t seen = for_each_interval_tree(4, [](const JoinTree& t) {
        CHECK(t.is_connected());
        return true;
    });
    CHECK(seen == 22);
    for (int k = 1; k <= 20; ++k) {
        CHECK(in_profile_space(rd_profile(k)));
        CHECK(in_profile_space(mo_profile(k)));
        CHECK(in_profile_space(fib_profile(k)));
    }
    CHECK(parse_profile("1/2,0,1/2") == Profile{Rational(1, 2), Rational(0), Rational(1, 2)});
    CHECK_FALSE(in_profile_space({Rational(1, 4), Rational(1, 4)}));
    CHECK_THROWS(interval_tree(JoinTree::join(JoinTree::atom(Ambient::PInf, make_edge(Ambient::PInf, 0, 1)),
                                              JoinTree::atom(Ambient::PInf, make_edge(Ambient::PInf, 2, 3)))));
}
