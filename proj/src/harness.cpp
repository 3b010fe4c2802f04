#include "phikit/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <gmpxx.h>

#include "phikit/enumerate.hpp"
#include "phikit/logcmp.hpp"
#include "phikit/potential.hpp"

namespace phikit {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr std::size_t kMaxCounterexamples = 10;

}  // namespace

// fn(i) for i in [0, n); results are written by index, so aggregation order is fixed
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(jobs);
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next++) < n;) fn(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

namespace {

struct Ctx {
    int id;
    const SuiteConfig& cfg;
    SuiteReport& rep;
    std::size_t cex = 0;

    void row(const std::string& cs, std::uint64_t checked, std::uint64_t viol, const std::string& value,
             const std::string& detail = "") {
        rep.rows.push_back({std::to_string(id), cs, std::to_string(checked), std::to_string(viol), value, detail});
    }
    void counterexample(json j) {
        if (cex++ >= kMaxCounterexamples) return;
        j["criterion"] = id;
        rep.counterexamples.push_back(std::move(j));
    }
};

std::string fmt(double x, int prec = 6) {
    std::ostringstream os;
    os.precision(prec);
    os << x;
    return os.str();
}

// ---------------------------------------------------------------- 1
CriterionResult crit_threshold(Ctx& c) {
    bool ok = true;
    std::ostringstream sum;
    for (int k : {2, 3}) {
        PatternGraph g = build_complete_binary_tree(k);
        ThresholdWeighting th = theta_from_markov(uniform_walk(g), g);
        ThresholdReport r = validate_threshold(g, th);
        Rational total = delta(g, th);
        bool pass = r.ok && total == Rational(0) && r.checked + 1 >= (std::uint64_t{1} << g.num_edges());
        ok &= pass;
        c.row("T" + std::to_string(k) + " walk", r.checked, pass ? 0 : 1, total.str(), r.reason);
        if (!pass && r.witness) c.counterexample({{"graph", graph_to_json(*r.witness)}, {"theta", theta_to_json(th, Ambient::TInf)}});
        sum << "T" << k << ": " << r.checked << " subgraphs, Δ(T" << k << ")=" << total.str() << "; ";
    }
    return {1, "threshold validity", ok, sum.str()};
}

// ---------------------------------------------------------------- 2
CriterionResult crit_partial(Ctx& c) {
    ThresholdWeighting th = ThresholdWeighting::tinf();
    std::uint64_t viol = 0;
    std::uint64_t n = for_each_subgraph(build_complete_binary_tree(3), kNonEmpty, [&](const PatternGraph& f) {
        if (Rational(3) * delta(f, th) < Rational(boundary_size(f))) {
            ++viol;
            c.counterexample({{"graph", graph_to_json(f)}});
        }
        return true;
    });
    c.row("T3 all subgraphs", n, viol, "");
    return {2, "3Δ(F) >= ∂(F) on T3", viol == 0, std::to_string(n) + " subgraphs, " + std::to_string(viol) + " violations"};
}

// ---------------------------------------------------------------- 3
CriterionResult crit_boundary(Ctx& c) {
    std::uint64_t vb = 0, v0 = 0, ungrounded = 0, n = 0;
    bool capped = false;
    try {
        n = for_each_connected_subgraph(
            build_complete_binary_tree(4),
            [&](const PatternGraph& f) {
                int d = boundary_size(f), l = max_complete_height(f);
                std::uint64_t e = f.num_edges();
                if (is_ungrounded(f)) {
                    ++ungrounded;
                    if (2ULL * d < e + 3) {
                        ++vb;
                        c.counterexample({{"lemma", "boundarylarge"}, {"graph", graph_to_json(f)}});
                    }
                }
                // λ + ∂ >= log2(|E|+1)  <=>  2^(λ+∂) >= |E|+1
                if (l + d < 63 && (std::uint64_t{1} << (l + d)) < e + 1) {
                    ++v0;
                    c.counterexample({{"lemma", "boundary-large"}, {"graph", graph_to_json(f)}});
                }
                return true;
            },
            c.cfg.cap);
    } catch (const std::length_error&) {
        capped = true;
    }
    c.row("T4 connected, ungrounded: 2∂ >= |E|+3", ungrounded, vb, "", capped ? "cap exceeded" : "");
    c.row("T4 connected: λ+∂ >= log2(|E|+1)", n, v0, "", capped ? "cap exceeded" : "");

    std::uint64_t eq_bad = 0, eq_n = 0;
    for (int j = 0; j <= 3; ++j)
        for (std::int64_t i = 0; i < (std::int64_t{1} << (4 - j)); ++i) {
            PatternGraph g = subtree_plus(tv(j, i));
            int s = max_complete_height(g) + boundary_size(g);
            ++eq_n;
            if ((std::uint64_t{1} << s) != g.num_edges() + 1) {
                ++eq_bad;
                c.counterexample({{"lemma", "boundary equality"}, {"graph", graph_to_json(g)}});
            }
        }
    c.row("T_x^+ in T4: equality", eq_n, eq_bad, "");
    bool ok = !capped && vb == 0 && v0 == 0 && eq_bad == 0;
    std::ostringstream s;
    s << n << " connected subgraphs (" << ungrounded << " ungrounded), violations " << vb << "/" << v0 << ", equality on "
      << eq_n - eq_bad << "/" << eq_n << " T_x^+" << (capped ? ", cap exceeded" : "");
    return {3, "boundary lemmas on T4", ok, s.str()};
}

// ---------------------------------------------------------------- 4
CriterionResult crit_witness(Ctx& c) {
    const std::uint64_t want = 10000, max_attempts = 2000000;
    bool ok = true;
    std::ostringstream s;
    for (int k : {12, 18}) {
        Rng rng(split_seed(c.cfg.seed, 0x1a1 + k));
        std::uint64_t accepted = 0, found = 0, attempts = 0;
        std::map<int, std::uint64_t> by_boundary;
        while (accepted < want && attempts < max_attempts) {
            ++attempts;
            TreeBitset g = sample_structured_subgraph(k, rng);
            int d = g.boundary();
            std::uint64_t e = g.num_edges();
            if (e == 0 || 6 * d > k || e > (std::uint64_t{1} << k) - 1) continue;
            ++accepted;
            ++by_boundary[d];
            bool hit = false;
            for (std::int64_t i = 0; i < (std::int64_t{1} << d) && !hit; ++i) hit = !g.meets_subtree_plus(tv(k - d, i));
            if (hit) {
                ++found;
            } else {
                c.counterexample({{"k", k}, {"graph", graph_to_json(g.to_graph())}});
            }
        }
        std::ostringstream hist;
        for (auto [d, cnt] : by_boundary) hist << "∂=" << d << ":" << cnt << " ";
        c.row("T" + std::to_string(k), accepted, accepted - found, std::to_string(attempts) + " draws", hist.str());
        ok &= accepted == want && found == accepted;
        s << "T" << k << ": witness in " << found << "/" << accepted << " (" << hist.str() << "); ";
    }
    return {4, "witness subtree on T12/T18", ok, s.str()};
}

// ---------------------------------------------------------------- 5
CriterionResult crit_phi_lower(Ctx& c) {
    ThresholdWeighting th = ThresholdWeighting::tinf();
    std::vector<PatternGraph> graphs;
    for_each_connected_subgraph(build_complete_binary_tree(2), [&](const PatternGraph& f) {
        graphs.push_back(f);
        return true;
    });
    struct Out {
        std::uint64_t trees = 0, viol = 0;
        Rational min_gap{1000};
        std::vector<json> cex;
    };
    std::vector<Out> out(graphs.size());
    parallel_for(graphs.size(), c.cfg.jobs, [&](std::size_t gi) {
        const PatternGraph& f = graphs[gi];
        Rational bound = Rational(max_complete_height(f), 30) + Rational(2, 5) * delta(f, th);
        Out& o = out[gi];
        enumerate_minimal_jointrees(f, [&](const JoinTree& a) {
            Rational p = phi(a, th).value;
            ++o.trees;
            o.min_gap = rmin(o.min_gap, p - bound);
            if (p < bound) {
                ++o.viol;
                if (o.cex.size() < 2) o.cex.push_back({{"tree", a.sexp()}, {"phi", p.str()}, {"bound", bound.str()}});
            }
            return true;
        });
    });
    std::uint64_t trees = 0, viol = 0;
    Rational gap{1000};
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        trees += out[gi].trees;
        viol += out[gi].viol;
        gap = rmin(gap, out[gi].min_gap);
        for (auto& j : out[gi].cex) c.counterexample(j);
    }
    // one row per edge count keeps the detail file short
    std::map<std::size_t, std::array<std::uint64_t, 3>> by_size;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        auto& b = by_size[graphs[gi].num_edges()];
        b[0] += 1;
        b[1] += out[gi].trees;
        b[2] += out[gi].viol;
    }
    for (auto& [e, b] : by_size)
        c.row("T2 connected |E|=" + std::to_string(e), b[1], b[2], std::to_string(b[0]) + " graphs");
    std::ostringstream s;
    s << graphs.size() << " connected subgraphs, " << trees << " join-trees, " << viol << " violations, min slack "
      << gap.str();
    return {5, "Φ >= λ/30 + 2Δ/5 on T2", viol == 0, s.str()};
}

// ---------------------------------------------------------------- 6
CriterionResult crit_infinite(Ctx& c) {
    PatternGraph t2 = build_complete_binary_tree(2);
    ThresholdWeighting walk = theta_from_markov(uniform_walk(t2), t2), inf = ThresholdWeighting::tinf();
    Rational gap_sum;
    for (const Edge& e : t2.edges()) gap_sum = gap_sum + (walk(e) - inf(e));
    std::uint64_t n = 0, viol = 0;
    Rational slack{1000};
    enumerate_minimal_jointrees(t2, [&](const JoinTree& a) {
        Rational lhs = phi(a, walk).value, rhs = phi(a, inf).value - Rational(1, 3);
        ++n;
        slack = rmin(slack, lhs - rhs);
        if (lhs < rhs) {
            ++viol;
            c.counterexample({{"tree", a.sexp()}, {"phi_walk", lhs.str()}, {"phi_inf", (rhs + Rational(1, 3)).str()}});
        }
        return true;
    });
    c.row("T2 walk vs θ_inf", n, viol, slack.str(), "Σ(θ'-θ_inf)=" + gap_sum.str());

    // same transfer on P_k: 1+1/k against 1, total gap 1
    std::uint64_t pn = 0, pviol = 0;
    for (int k = 1; k <= 5; ++k) {
        ThresholdWeighting hi = ThresholdWeighting::constant(Rational(k + 1, k)), one = ThresholdWeighting::constant(1);
        enumerate_minimal_jointrees(build_path(k), [&](const JoinTree& a) {
            ++pn;
            if (phi(a, hi).value < phi(a, one).value - Rational(1)) {
                ++pviol;
                c.counterexample({{"tree", a.sexp()}, {"theta", "1+1/k"}});
            }
            return true;
        });
    }
    c.row("P1..P5 1+1/k vs 1", pn, pviol, "");
    bool ok = viol == 0 && pviol == 0 && n == 945 && gap_sum == Rational(1, 3);
    std::ostringstream s;
    s << n << " trees of T2, " << viol << " violations, min slack " << slack.str() << "; P_k extra " << pn << " trees, "
      << pviol << " violations";
    return {6, "Φ_θ' >= Φ_θinf - 1/3 on T2", ok, s.str()};
}

// ---------------------------------------------------------------- 7
CriterionResult crit_phipk(Ctx& c) {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    struct Tally {
        std::uint64_t checks = 0, viol = 0, undecided = 0, escalated = 0, trees = 0;
        std::vector<json> cex;
    };
    Tally all;
    bool root_ok = true;
    for (int k = 1; k <= 6; ++k) {
        PatternGraph pk = build_path(k);
        std::vector<JoinTree> trees = all_minimal_jointrees(pk);
        std::vector<Tally> part(trees.size());
        VertexSet vs = pk.vertices();
        parallel_for(trees.size(), c.cfg.jobs, [&](std::size_t ti) {
            Tally& t = part[ti];
            PhiEvaluator ev(trees[ti], one);
            for (std::uint64_t sm = 0; sm < (std::uint64_t{1} << vs.size()); ++sm) {
                VertexSet s;
                for (std::size_t b = 0; b < vs.size(); ++b)
                    if (sm >> b & 1) s.push_back(vs[b]);
                Rational ph = ev.phi_cond(s);
                for (const PComponent& comp : decompose_components(pk, s)) {
                    VertexSet su = s;
                    for (std::int64_t v = comp.i; v <= comp.j; ++v) su.push_back(v);
                    Rational rest = delta_cond(pk, make_vertex_set(su), one);
                    Rational m(comp.length());
                    const char* kind = comp.kind == CompKind::Open ? "open" : comp.half_open() ? "half-open" : "closed";
                    LogBound lb = make_bound([m, kind](auto z) {
                        using N = decltype(z);
                        N c = const_c(z), d = const_delta(z), x = num_const(z, m);
                        if (kind[0] == 'o') x = num_const(z, Rational(1, 2)) * d * x;
                        else if (kind[0] == 'h') x = d * x;
                        return log_base(x, c);
                    });
                    CmpOutcome r = check_geq(ph - rest, lb);
                    ++t.checks;
                    t.escalated += r.escalated;
                    if (r.result != CmpResult::Holds) {
                        ++t.viol;
                        t.undecided += r.result == CmpResult::Undecided;
                        if (t.cex.size() < 2)
                            t.cex.push_back({{"tree", trees[ti].sexp()}, {"S", s}, {"component", comp.str()},
                                             {"phi", ph.str()}, {"result", cmp_name(r.result)}});
                    }
                }
            }
        });
        Tally tk;
        for (auto& t : part) {
            tk.checks += t.checks;
            tk.viol += t.viol;
            tk.undecided += t.undecided;
            tk.escalated += t.escalated;
            for (auto& j : t.cex) c.counterexample(j);
        }
        tk.trees = trees.size();
        // Φ(A|∅) >= log_c(k) stated separately
        Rational minphi{1000};
        for (const JoinTree& a : trees) minphi = rmin(minphi, phi_cond(a, {}, one).value);
        LogBound lk = make_bound([k](auto z) { return log_base(num_const(z, Rational(k)), const_c(z)); });
        CmpOutcome rk = check_geq(minphi, lk);
        root_ok &= rk.result == CmpResult::Holds;
        c.row("P" + std::to_string(k), tk.checks, tk.viol, minphi.str(),
              std::to_string(tk.trees) + " trees, escalated " + std::to_string(tk.escalated) + ", min Φ(A|∅) vs log_c(k)=" +
                  fmt(static_cast<double>(rk.rhs)));
        all.checks += tk.checks;
        all.viol += tk.viol;
        all.undecided += tk.undecided;
        all.escalated += tk.escalated;
        all.trees += tk.trees;
    }
    std::ostringstream s;
    s << all.trees << " trees, " << all.checks << " component inequalities, " << all.viol << " violations ("
      << all.undecided << " undecided), " << all.escalated << " escalated to MPFR";
    return {7, "component inequalities on P_k, k<=6", all.viol == 0 && root_ok, s.str()};
}

// ---------------------------------------------------------------- 8
CriterionResult crit_tight(Ctx& c) {
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    bool ok = true;
    std::ostringstream s;
    for (int k : {4, 8, 16}) {
        JoinTree a = canonical_rd(k);
        PhiEvaluator ev(a, one);
        Rational p = ev.phi(), pc = ev.phi_cond({});
        LogBound lb = make_bound([k](auto z) {
            using std::log2;
            return num_const(z, Rational(1, 2)) * log2(num_const(z, Rational(k)));
        });
        CmpOutcome r1 = check_geq(p, lb), r2 = check_geq(pc, lb);
        bool pass = r1.result == CmpResult::Holds && r2.result == CmpResult::Holds;
        ok &= pass;
        c.row("RD" + std::to_string(k), 2, !pass, p.str() + "/" + pc.str(), "½log2(k)=" + fmt(static_cast<double>(r1.rhs)));
        s << "Φ(RD" << k << ")=" << p.str() << " Φ(RD" << k << "|∅)=" << pc.str() << "; ";
    }
    // Φ(A) >= (1/c)·log2 λ(A) + Δ(A) over every subgraph of P_6
    PatternGraph p6 = build_path(6);
    std::uint64_t n = 0, viol = 0, esc = 0;
    std::map<int, std::uint64_t> viol_by_lambda;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << p6.num_edges()); ++mask) {
        PatternGraph f = edge_subset(p6, mask);
        Rational d = delta(f, one);
        int lam = longest_component_length(f);
        LogBound lb = make_bound([lam](auto z) {
            using std::log2;
            return log2(num_const(z, Rational(lam))) / const_app(z);
        });
        enumerate_minimal_jointrees(f, [&](const JoinTree& a) {
            CmpOutcome r = check_geq(phi(a, one).value - d, lb);
            ++n;
            esc += r.escalated;
            if (r.result != CmpResult::Holds) {
                ++viol;
                ++viol_by_lambda[lam];
                c.counterexample({{"lemma", "log-length bound"}, {"tree", a.sexp()}, {"lambda", lam}, {"delta", d.str()}});
            }
            return true;
        });
    }
    c.row("subgraphs of P6, Φ(A) >= log2(λ)/c + Δ", n, viol, "", "escalated " + std::to_string(esc));
    s << n << " trees for the log-length bound, " << viol << " violations";
    for (auto [l, cnt] : viol_by_lambda) s << " (λ=" << l << ": " << cnt << ")";
    return {8, "canonical tightness and log-length bound", ok && viol == 0, s.str()};
}

// ---------------------------------------------------------------- 9
CriterionResult crit_chi(Ctx& c) {
    bool ok = true;
    std::ostringstream s;
    auto val = [](const LpSolution& sol) { return sol.exact ? sol.exact->to_double() : sol.value; };

    LpSolution rd = chi_lp(canonical_rd(16), std::nullopt);
    bool rd_ok = rd.status == "optimal" && (rd.exact ? (*rd.exact >= Rational(2) && *rd.exact <= Rational(3))
                                                      : (rd.value >= 2 - 1e-9 && rd.value <= 3 + 1e-9));
    c.row("RD16 free", 1, !rd_ok, rd.exact ? rd.exact->str() : fmt(rd.value), rd.certified ? "certified" : "float");
    ok &= rd_ok;

    LpSolution fo = chi_lp(canonical_fo(13), std::nullopt);
    bool fo_ok = fo.status == "optimal" && (fo.exact ? *fo.exact <= Rational(8, 3) : fo.value <= 8.0 / 3 + 1e-9);
    c.row("FO13 free", 1, !fo_ok, fo.exact ? fo.exact->str() : fmt(fo.value), fo.certified ? "certified" : "float");
    ok &= fo_ok;

    LpSolution half = chi_lp(canonical_rd(2), Profile{Rational(1, 2), Rational(1, 2), Rational(1, 2)});
    bool half_ok = half.exact && *half.exact == Rational(0);
    c.row("χ(1/2,1/2,1/2)", 1, !half_ok, half.exact ? half.exact->str() : fmt(half.value));
    ok &= half_ok;

    // grid search over every interval tree with k <= 4
    const int res = 24;
    std::uint64_t trees = 0, bad = 0;
    double worst = 0;
    for (int k = 1; k <= 4; ++k) {
        for_each_interval_tree(k, [&](const JoinTree& a) {
            ++trees;
            GridChi grid(a, res);
            double g = static_cast<double>(grid.free_min()) / res;
            double l = val(chi_lp(a, std::nullopt));
            double diff = std::fabs(g - l);
            // fixed profiles that sit on the grid
            for (const Profile& p : {rd_profile(k), mo_profile(k), fib_profile(k)}) {
                std::vector<int> units;
                bool on = true;
                for (const Rational& x : p) {
                    Rational u = x * Rational(res);
                    on &= u.is_integer();
                    units.push_back(static_cast<int>(u.num()));
                }
                if (!on) continue;
                std::int64_t gv = grid.at(units);
                if (gv < 0) continue;
                diff = std::max(diff, std::fabs(static_cast<double>(gv) / res - val(chi_lp(a, p))));
            }
            worst = std::max(worst, diff);
            if (diff > 1.0 / 32 + 1e-12) {
                ++bad;
                c.counterexample({{"tree", a.sexp()}, {"lp", l}, {"grid", g}});
            }
            return true;
        });
    }
    c.row("k<=4 LP vs grid 1/24", trees, bad, fmt(worst));
    ok &= bad == 0;
    s << "RD16 free " << (rd.exact ? rd.exact->str() : fmt(rd.value)) << ", FO13 free "
      << (fo.exact ? fo.exact->str() : fmt(fo.value)) << ", χ(½,½,½)=" << (half.exact ? half.exact->str() : "?") << ", "
      << trees << " trees vs grid, max gap " << fmt(worst);
    return {9, "χ LP sandwich", ok, s.str()};
}

// ---------------------------------------------------------------- 10
// |𝒜|·n^Φ <= χ·n^d exactly, with Φ = p/q
CriterionResult crit_pathset(Ctx& c) {
    const int n = 2;
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    PatternGraph p2 = build_path(2);
    std::vector<JoinTree> trees = all_minimal_jointrees(p2, true);
    std::uint64_t thm = 0, thm_bad = 0, proj = 0, proj_bad = 0, rest = 0, rest_bad = 0, props = 0, props_bad = 0;
    for (const JoinTree& a : trees) {
        PathsetOracle o(a, one, n);
        VertexSet va = a.graph().vertices();
        for (std::uint64_t sm = 0; sm < (std::uint64_t{1} << va.size()); ++sm) {
            VertexSet s;
            for (std::size_t b = 0; b < va.size(); ++b)
                if (sm >> b & 1) s.push_back(va[b]);
            VertexSet fv = o.free_vars(a.root(), s);
            std::uint64_t universe = 1;
            for (std::size_t i = 0; i < fv.size(); ++i) universe *= n;
            Rational ph = phi_cond(a, s, one).value;
            std::vector<std::int64_t> chis;
            std::vector<Relation> rels;
            for (std::uint64_t m = 0; m < (std::uint64_t{1} << universe); ++m) {
                Relation r = Relation::from_mask(n, fv, m);
                std::int64_t x = o.chi(s, r);
                rels.push_back(r);
                chis.push_back(x);
                ++thm;
                if (!chi_density_bound(r.size(), static_cast<int>(fv.size()), n, ph, x)) {
                    ++thm_bad;
                    c.counterexample({{"claim", "density"}, {"tree", a.sexp()}, {"S", s}, {"relation", relation_to_json(r)}});
                }
                // projection to every sub-join-tree
                for (int b = 0; b < a.num_nodes(); ++b) {
                    VertexSet fb = o.free_vars(b, s);
                    ++proj;
                    if (o.chi(b, s, project(r, fb)) > x) {
                        ++proj_bad;
                        c.counterexample({{"claim", "projection"}, {"tree", a.sexp()}, {"node", b}, {"relation", relation_to_json(r)}});
                    }
                }
                // restriction to every T ⊇ S and z ∈ [n]^T
                for (std::uint64_t tm = sm; tm < (std::uint64_t{1} << va.size()); ++tm) {
                    if ((tm & sm) != sm) continue;
                    VertexSet t;
                    for (std::size_t b = 0; b < va.size(); ++b)
                        if (tm >> b & 1) t.push_back(va[b]);
                    std::uint64_t zs = 1;
                    for (std::size_t i = 0; i < t.size(); ++i) zs *= n;
                    for (std::uint64_t zc = 0; zc < zs; ++zc) {
                        std::vector<int> z;
                        for (std::uint64_t q = zc, i = 0; i < t.size(); ++i, q /= n) z.push_back(static_cast<int>(q % n));
                        ++rest;
                        if (o.chi(t, restrict_rel(r, t, z)) > x) {
                            ++rest_bad;
                            c.counterexample({{"claim", "restriction"}, {"tree", a.sexp()}, {"T", t}, {"relation", relation_to_json(r)}});
                        }
                    }
                }
            }
            // subadditive and monotone over all pairs
            for (std::size_t i = 0; i < rels.size(); ++i)
                for (std::size_t j = 0; j < rels.size(); ++j) {
                    std::uint64_t u = i | j;
                    props += 2;
                    if (chis[u] > chis[i] + chis[j]) ++props_bad;
                    if ((i & j) == i && chis[i] > chis[j]) ++props_bad;
                }
            // χ_A(ℬ ⋈ 𝒞) <= max(χ_B(ℬ), χ_C(𝒞)) for pathsets ℬ, 𝒞
            const JTNode& root = a.node(a.root());
            if (!root.leaf()) {
                int bn = root.left, cn = root.right;
                VertexSet fb = o.free_vars(bn, s), fc = o.free_vars(cn, s);
                auto size_of = [&](const VertexSet& v) {
                    std::uint64_t u = 1;
                    for (std::size_t i = 0; i < v.size(); ++i) u *= n;
                    return u;
                };
                for (std::uint64_t mb = 0; mb < (std::uint64_t{1} << size_of(fb)); ++mb) {
                    Relation rb = Relation::from_mask(n, fb, mb);
                    if (!o.pathset(bn, s, rb)) continue;
                    for (std::uint64_t mc = 0; mc < (std::uint64_t{1} << size_of(fc)); ++mc) {
                        Relation rc = Relation::from_mask(n, fc, mc);
                        if (!o.pathset(cn, s, rc)) continue;
                        ++props;
                        if (o.chi(s, join(rb, rc)) > std::max(o.chi(bn, s, rb), o.chi(cn, s, rc))) {
                            ++props_bad;
                            c.counterexample({{"claim", "join"}, {"tree", a.sexp()}, {"B", relation_to_json(rb)}, {"C", relation_to_json(rc)}});
                        }
                    }
                }
            }
        }
    }
    c.row("density vs Φ(A|S)", thm, thm_bad, "");
    c.row("projection", proj, proj_bad, "");
    c.row("restriction", rest, rest_bad, "");
    c.row("subadditive/monotone/join", props, props_bad, "");
    std::ostringstream s;
    s << trees.size() << " trees, " << thm << " relations (all S), violations: density " << thm_bad << ", projection "
      << proj_bad << "/" << proj << ", restriction " << rest_bad << "/" << rest << ", properties " << props_bad << "/"
      << props;
    return {10, "pathset micro-oracle on P2, n=2", thm_bad + proj_bad + rest_bad + props_bad == 0, s.str()};
}

// ---------------------------------------------------------------- 11
CriterionResult crit_permprod(Ctx& c) {
    int trials = c.cfg.trials.value_or(100);
    int small_trials = c.cfg.trials ? *c.cfg.trials * 10 : 1000;
    struct Case {
        int n, k;
        const char* tree;
        const char* prof;
        int trials;
    };
    std::vector<Case> grid = {{256, 13, "fo", "fib", trials}, {16, 2, "rd", "rd", small_trials}};
    bool ok = true;
    std::ostringstream s;
    for (const Case& cs : grid) {
        if (cs.trials <= 0) continue;
        JoinTree tree = parse_tree_spec(cs.tree, cs.k);
        Profile a = parse_profile_spec(cs.prof, cs.k);
        std::vector<EnumResult> res(cs.trials);
        parallel_for(cs.trials, c.cfg.jobs, [&](std::size_t t) {
            std::uint64_t sd = split_seed(c.cfg.seed, 0x11000 + static_cast<std::uint64_t>(cs.n) * 100 + t);
            PermSequence ps = PermSequence::random(cs.n, cs.k, hash_seq(sd, {1}));
            SimParams p;
            p.seed = hash_seq(sd, {2});
            PermProdSim sim(tree, a, ps, p);
            res[t] = sim.enumerate_paths();
        });
        int sound = 0, complete = 0;
        std::string label = "n=" + std::to_string(cs.n) + " k=" + std::to_string(cs.k);
        for (int t = 0; t < cs.trials; ++t) {
            sound += res[t].sound;
            complete += res[t].complete;
            if (!res[t].sound || !res[t].complete)
                c.counterexample({{"n", cs.n}, {"k", cs.k}, {"trial", t}, {"found", res[t].paths.size()}, {"sound", res[t].sound}});
            c.row(label + " trial " + std::to_string(t), 1, !(res[t].sound && res[t].complete),
                  std::to_string(res[t].paths.size()),
                  "evaluated " + std::to_string(res[t].evaluated) + "/" + std::to_string(res[t].rectangles));
        }
        bool pass = sound == cs.trials &&
                    (cs.n == 256 ? complete * 100 >= 95 * cs.trials : complete * 100 >= 99 * cs.trials);
        ok &= pass;
        s << label << ": sound " << sound << "/" << cs.trials << ", complete " << complete << "/" << cs.trials << "; ";
    }
    if (trials <= 0) s << "empty grid";
    return {11, "permutation product isolation", ok, s.str()};
}

// ---------------------------------------------------------------- 12
CriterionResult crit_distribution(Ctx& c) {
    int samples = c.cfg.trials.value_or(500);
    PatternGraph p3 = build_path(3);
    ThresholdWeighting th = ThresholdWeighting::constant(Rational(4, 3));
    std::vector<char> yes(samples, 0);
    parallel_for(samples, c.cfg.jobs, [&](std::size_t i) {
        yes[i] = solve_sub(sample_instance(p3, th, 32, split_seed(c.cfg.seed, 0x12000 + i)));
    });
    int cnt = 0;
    for (char y : yes) cnt += y;
    double rate = samples ? static_cast<double>(cnt) / samples : 0.5;
    bool ok = rate >= 0.05 && rate <= 0.95;
    c.row("P3 θ=4/3 n=32", samples, !ok, fmt(rate));
    return {12, "Pr[YES] bounded away from 0 and 1", ok,
            std::to_string(cnt) + "/" + std::to_string(samples) + " YES, rate " + fmt(rate)};
}

// ---------------------------------------------------------------- 13
CriterionResult crit_td(Ctx& c) {
    bool ok = true;
    std::ostringstream s;
    for (int k = 1; k <= 4; ++k) {
        int d = tree_depth(build_complete_binary_tree(k), 32);
        ok &= d == k;
        c.row("td(T" + std::to_string(k) + ")", 1, d != k, std::to_string(d));
        s << "td(T" << k << ")=" << d << " ";
    }
    for (int k = 1; k <= 8; ++k) {
        SimpleGraph g = SimpleGraph::from_pattern(build_path(k));
        int d = tree_depth(g), o = tree_depth_naive(g);
        ok &= d == o;
        c.row("td(P" + std::to_string(k) + ")", 1, d != o, std::to_string(d), "naive " + std::to_string(o));
    }
    ThresholdWeighting one = ThresholdWeighting::constant(1);
    PatternGraph p8 = build_path(8);
    VertexSet vs = p8.vertices();
    std::uint64_t n = 0, bad = 0;
    for (std::uint64_t em = 0; em < (std::uint64_t{1} << p8.num_edges()); ++em) {
        PatternGraph f = edge_subset(p8, em);
        for (std::uint64_t sm = 0; sm < (std::uint64_t{1} << vs.size()); ++sm) {
            VertexSet sv;
            for (std::size_t b = 0; b < vs.size(); ++b)
                if (sm >> b & 1) sv.push_back(vs[b]);
            std::int64_t closed = 0;
            for (const PComponent& comp : decompose_components(f, sv)) closed += comp.kind == CompKind::Closed;
            ++n;
            if (delta_cond(f, sv, one) != Rational(closed)) {
                ++bad;
                c.counterexample({{"graph", graph_to_json(f)}, {"S", sv}});
            }
        }
    }
    c.row("Δ(F|S) = closed components, F ⊆ P8", n, bad, "");
    ok &= bad == 0;
    s << "; P_k td matches naive for k<=8; closed-component identity " << n - bad << "/" << n;
    return {13, "tree-depth and closed components", ok, s.str()};
}

using CritFn = CriterionResult (*)(Ctx&);
const CritFn kCriteria[] = {crit_threshold, crit_partial, crit_boundary, crit_witness,  crit_phi_lower,
                            crit_infinite,  crit_phipk,   crit_tight,    crit_chi,  crit_pathset,
                            crit_permprod,  crit_distribution, crit_td};

int naive_vertex_td(const SimpleGraph& g, std::uint64_t set) {
    if (!set) return 0;
    // split into components first
    std::uint64_t first = set & -set, comp = first, frontier = first;
    while (frontier) {
        int v = __builtin_ctzll(frontier);
        frontier &= frontier - 1;
        std::uint64_t nb = g.adj[v] & set & ~comp;
        comp |= nb;
        frontier |= nb;
    }
    if (comp != set) return std::max(naive_vertex_td(g, comp), naive_vertex_td(g, set & ~comp));
    int best = 64;
    for (std::uint64_t r = set; r; r &= r - 1) best = std::min(best, 1 + naive_vertex_td(g, set & ~(r & -r)));
    return best;
}

}  // namespace

int tree_depth_naive(const SimpleGraph& g) {
    if (g.n == 0) return 0;
    std::uint64_t all = g.n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << g.n) - 1;
    return std::max(0, naive_vertex_td(g, all) - 1);
}

std::string artifact_version() { return "phikit 1.0.0"; }

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"lemmas_t3",    "philb_sweep",   "phipk_sweep",       "chi_sandwich",
                                                   "pathset_micro", "permprod_bench", "distribution_check"};
    return names;
}

std::vector<int> suite_criteria(const std::string& name) {
    static const std::map<std::string, std::vector<int>> m = {
        {"lemmas_t3", {1, 2, 3, 4, 13}}, {"philb_sweep", {5, 6}},       {"phipk_sweep", {7, 8}},
        {"chi_sandwich", {9}},           {"pathset_micro", {10}},      {"permprod_bench", {11}},
        {"distribution_check", {12}}};
    auto it = m.find(name);
    if (it == m.end()) throw std::invalid_argument("unknown suite '" + name + "'");
    return it->second;
}

CriterionResult check_criterion(int id, const SuiteConfig& cfg, SuiteReport& report) {
    if (id < 1 || id > 13) throw std::invalid_argument("criterion id must be in 1..13");
    Ctx ctx{id, cfg, report};
    auto t0 = Clock::now();
    CriterionResult r;
    try {
        r = kCriteria[id - 1](ctx);
    } catch (const std::exception& e) {
        r = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what()};
        ctx.row("error", 0, 1, "", e.what());
    }
    r.seconds = since(t0);
    report.criteria.push_back(r);
    report.pass &= r.pass;
    return r;
}

SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg) {
    std::vector<int> ids = suite_criteria(name);
    SuiteReport rep;
    rep.suite = name;
    rep.seed = cfg.seed;
    rep.params = {{"seed", cfg.seed}, {"jobs", cfg.jobs}, {"cap", cfg.cap}, {"criteria", ids}};
    if (cfg.trials) rep.params["trials"] = *cfg.trials;
    auto t0 = Clock::now();
    for (int id : ids) check_criterion(id, cfg, rep);
    rep.seconds = since(t0);
    return rep;
}

std::string report_csv(const SuiteReport& r) {
    auto esc = [](const std::string& x) {
        if (x.find_first_of(",\"\n") == std::string::npos) return x;
        std::string o = "\"";
        for (char ch : x) {
            if (ch == '"') o += '"';
            o += ch;
        }
        return o + "\"";
    };
    std::ostringstream os;
    for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << esc(r.columns[i]);
    os << "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << esc(row[i]);
        os << "\n";
    }
    return os.str();
}

json report_json(const SuiteReport& r) {
    json crit = json::array();
    for (const auto& c : r.criteria)
        crit.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"summary", c.summary}, {"seconds", c.seconds}});
    return {{"suite", r.suite},   {"pass", r.pass},     {"seed", r.seed},
            {"params", r.params}, {"seconds", r.seconds}, {"version", artifact_version()},
            {"criteria", crit},   {"counterexamples", r.counterexamples}};
}

void write_report(const SuiteReport& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir + "/" + r.suite + ".json", report_json(r).dump(2) + "\n");
    write_file(dir + "/" + r.suite + ".csv", report_csv(r));
}

SuiteConfig load_config(const std::string& path) {
    json j = json::parse(read_file(path));
    if (j.value("version", 1) != 1) throw std::invalid_argument("unsupported config version");
    SuiteConfig c;
    c.seed = j.value("seed", c.seed);
    c.jobs = j.value("jobs", c.jobs);
    c.cap = j.value("cap", c.cap);
    if (j.contains("trials")) c.trials = j["trials"].get<int>();
    c.overrides = j;
    return c;
}

}  // namespace phikit
