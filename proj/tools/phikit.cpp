// phikit command line. Exit codes: 0 pass, 1 fail, 2 error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phikit/chi.hpp"
#include "phikit/harness.hpp"
#include "phikit/io.hpp"
#include "phikit/pathset.hpp"
#include "phikit/permprod.hpp"
#include "phikit/potential.hpp"
#include "phikit/rng.hpp"
#include "phikit/threshold.hpp"

using namespace phikit;

namespace {

struct Globals {
    std::uint64_t seed = 42;
    std::uint64_t cap = 1000000;
    int jobs = 1;
    std::string out;
};

Globals G;

// stdout, plus <out>/<file> when --out is given
void emit(const std::string& file, const std::string& text) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    if (G.out.empty()) return;
    std::filesystem::create_directories(G.out);
    write_file((std::filesystem::path(G.out) / file).string(), text);
}

json rat(const Rational& r) { return {{"value", r.str()}, {"value_num", r.num()}, {"value_den", r.den()}}; }

json trace_json(const std::vector<TraceStep>& tr) {
    json out = json::array();
    for (const TraceStep& s : tr) {
        json j{{"rule", rule_name(s.rule)}, {"node", s.node}, {"value", s.value.str()}, {"restriction", s.restriction}};
        if (!s.side.empty()) j["side"] = s.side;
        if (s.d >= 0) j["d"] = s.d;
        if (s.e >= 0) j["e"] = s.e;
        out.push_back(j);
    }
    return out;
}

int profile_k(const JoinTree& t) {
    IntervalTree it = interval_tree(t);
    return static_cast<int>(it.hi - it.lo);
}

json profile_json(const Profile& p) {
    json a = json::array();
    for (const Rational& x : p) a.push_back(x.str());
    return a;
}

// ---------------------------------------------------------------- phi / phi-cond

struct PhiOpts {
    std::string tree, theta = "one", cond;
    int k = 0;
    bool trace = false;
};

int cmd_phi(const PhiOpts& o, bool conditional) {
    JoinTree a = parse_tree_spec(o.tree, o.k);
    ThresholdWeighting th = parse_theta_spec(o.theta, a.graph());
    json j{{"tree", a.sexp()}, {"theta", th.describe()}};
    PotentialValue v;
    if (conditional) {
        VertexSet s = parse_vertex_set(a.graph().ambient(), o.cond);
        v = phi_cond(a, s, th, o.trace);
        j["S"] = vertex_set_to_json(a.graph().ambient(), s);
    } else {
        v = phi(a, th, o.trace);
    }
    j.update(rat(v.value));
    if (o.trace) j["rule_trace"] = trace_json(v.trace);
    emit(conditional ? "phi-cond.json" : "phi.json", j.dump(2));
    return 0;
}

// ---------------------------------------------------------------- min-phi / kappa

struct MinOpts {
    std::string graph, theta = "one", mode = "exhaustive";
    bool cond = false;
    int samples = 200;
};

int cmd_min_phi(const MinOpts& o) {
    PatternGraph g = parse_graph_spec(o.graph);
    ThresholdWeighting th = parse_theta_spec(o.theta, g);
    TreeMode m = o.mode == "exhaustive" ? TreeMode::Exhaustive
                 : o.mode == "canonical" ? TreeMode::Canonical
                 : o.mode == "sampled"   ? TreeMode::Sampled
                                         : throw std::invalid_argument("unknown mode '" + o.mode + "'");
    MinPhiResult r = min_phi_over_jointrees(g, th, m, o.cond, G.seed, o.samples);
    json j{{"graph", graph_to_json(g)}, {"theta", th.describe()}, {"mode", o.mode}, {"conditional", o.cond},
           {"min", rat(r.value)}, {"argmin", r.argmin.sexp()}, {"trees", r.trees}};
    emit("min-phi.json", j.dump(2));
    return 0;
}

int cmd_kappa(const MinOpts& o) {
    PatternGraph g = parse_graph_spec(o.graph);
    ThresholdWeighting th = parse_theta_spec(o.theta, g);
    MinPhiResult r = kappa_fixed_theta(g, th);
    json j{{"graph", graph_to_json(g)}, {"theta", th.describe()}, {"kappa", rat(r.value)}, {"argmin", r.argmin.sexp()},
           {"trees", r.trees}};
    emit("kappa.json", j.dump(2));
    return 0;
}

// ---------------------------------------------------------------- chi-lp / chi-sweep

struct ChiOpts {
    std::string tree, profile = "free", family = "rd";
    int k = 0, kmin = 1, kmax = 16;
    bool exact = false;
};

json lp_json(const LpSolution& s) {
    json j{{"status", s.status}, {"value", s.value}, {"chi", s.chi}, {"certified", s.certified},
           {"lower", s.lower.get_str()}, {"upper", s.upper.get_str()}, {"root_profile", profile_json(s.root_profile)},
           {"rows", s.rows}, {"cols", s.cols}, {"pivots", s.pivots}};
    if (s.exact) j["exact"] = s.exact->str();
    json nodes = json::array();
    for (const NodeProfile& n : s.nodes)
        nodes.push_back({{"node", n.node}, {"interval", {n.lo, n.hi}}, {"a", n.a}, {"b", n.b}, {"cost", n.cost}});
    j["nodes"] = nodes;
    return j;
}

int cmd_chi_lp(const ChiOpts& o) {
    JoinTree a = parse_tree_spec(o.tree, o.k);
    std::optional<Profile> p;
    if (o.profile != "free") p = parse_profile_spec(o.profile, profile_k(a));
    ChiOptions opt;
    opt.exact = o.exact;
    LpSolution s = chi_lp(a, p, opt);
    json j = lp_json(s);
    j["tree"] = a.sexp();
    j["mode"] = p ? "fixed" : "free";
    emit("chi-lp.json", j.dump(2));
    return s.status == "optimal" ? 0 : 1;
}

int cmd_chi_sweep(const ChiOpts& o) {
    if (o.kmin < 1 || o.kmax < o.kmin) throw std::invalid_argument("need 1 <= kmin <= kmax");
    std::ostringstream csv;
    csv << "family,k,profile,status,value,exact,lower_bound,upper_bound,pass\n";
    bool ok = true;
    for (int k = o.kmin; k <= o.kmax; ++k) {
        JoinTree a = parse_tree_spec(o.family, k);
        std::optional<Profile> p;
        if (o.profile != "free") p = parse_profile_spec(o.profile, k);
        ChiOptions opt;
        opt.exact = o.exact;
        LpSolution s = chi_lp(a, p, opt);
        bool pass = s.status == "optimal" && s.lower <= s.upper;
        ok &= pass;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9f", s.value);
        // lower/upper are the rationalized dual and primal values
        csv << o.family << ',' << k << ',' << o.profile << ',' << s.status << ',' << buf << ','
            << (s.exact ? s.exact->str() : "") << ',' << s.lower.get_str() << ',' << s.upper.get_str() << ','
            << (pass ? 1 : 0) << '\n';
    }
    emit("chi-sweep.csv", csv.str());
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------- pathset-verify

struct PathsetOpts {
    std::string graph = "P:2", theta = "one", tree, cond;
    int n = 2;
};

// |𝒜| <= χ_{A|S}(𝒜) · n^{|V \ S| - Φ(A|S)} for every relation 𝒜 over the free variables
int cmd_pathset_verify(const PathsetOpts& o) {
    PatternGraph g = parse_graph_spec(o.graph);
    ThresholdWeighting th = parse_theta_spec(o.theta, g);
    std::vector<JoinTree> trees;
    if (!o.tree.empty())
        trees.push_back(parse_tree_spec(o.tree, 0));
    else
        trees = all_minimal_jointrees(g, true);
    VertexSet s = o.cond.empty() ? VertexSet{} : parse_vertex_set(g.ambient(), o.cond);
    std::ostringstream csv;
    csv << "tree,relation,size,chi,phi,ok\n";
    std::uint64_t checked = 0, bad = 0;
    for (const JoinTree& a : trees) {
        PathsetOracle oracle(a, th, o.n);
        VertexSet fv = oracle.free_vars(a.root(), s);
        std::uint64_t universe = 1;
        for (std::size_t i = 0; i < fv.size(); ++i) universe *= static_cast<std::uint64_t>(o.n);
        if (universe > 20 || (std::uint64_t{1} << universe) > G.cap)
            throw std::length_error("2^" + std::to_string(universe) + " relations exceed --cap");
        Rational ph = phi_cond(a, s, th).value;
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << universe); ++m) {
            Relation r = Relation::from_mask(o.n, fv, m);
            std::int64_t x = oracle.chi(s, r);
            bool ok = chi_density_bound(r.size(), static_cast<int>(fv.size()), o.n, ph, x);
            ++checked;
            bad += !ok;
            csv << a.sexp() << ',' << m << ',' << r.size() << ',' << x << ',' << ph.str() << ',' << (ok ? 1 : 0) << '\n';
        }
    }
    emit("pathset-verify.csv", csv.str());
    std::cerr << trees.size() << " trees, " << checked << " relations, " << bad << " violations\n";
    return bad == 0 ? 0 : 1;
}

// ---------------------------------------------------------------- permprod

struct PermOpts {
    int n = 16, k = 2, trials = 1;
    std::string tree = "fo", profile = "fib", perms;
    double c = 2.0, outer = 1.0;
    bool symbolic = false;
};

int cmd_permprod(const PermOpts& o) {
    std::optional<PermSequence> fixed;
    int k = o.k;
    if (!o.perms.empty()) {
        fixed = perms_from_json(json::parse(read_file(o.perms)));
        k = fixed->k();
    }
    int n = fixed ? fixed->n : o.n;
    JoinTree tree = parse_tree_spec(o.tree, k);
    Profile a = parse_profile_spec(o.profile, k);
    SimParams base;
    base.c = o.c;
    base.outer_mult = o.outer;
    if (o.symbolic) {
        SymbolicSize z = symbolic_size(tree, a, n, base);
        json j{{"n", n}, {"k", k}, {"log2_size", z.log2_size}, {"log_n_size", z.log_n_size}, {"depth", z.depth},
               {"outputs", z.outputs}, {"samples_per_node", z.samples_per_node}};
        emit("permprod-size.json", j.dump(2));
        return 0;
    }
    struct Row {
        EnumResult r;
        double secs = 0;
    };
    std::vector<Row> rows(std::max(o.trials, 0));
    parallel_for(rows.size(), G.jobs, [&](std::size_t t) {
        std::uint64_t sd = split_seed(G.seed, t);
        PermSequence ps = fixed ? *fixed : PermSequence::random(n, k, hash_seq(sd, {1}));
        SimParams p = base;
        p.seed = hash_seq(sd, {2});
        auto t0 = std::chrono::steady_clock::now();
        rows[t].r = PermProdSim(tree, a, ps, p).enumerate_paths();
        rows[t].secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
    std::ostringstream csv;
    csv << "trial,isolated_count,complete,sound,wallclock\n";
    bool sound = true;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", rows[t].secs);
        csv << t << ',' << rows[t].r.paths.size() << ',' << (rows[t].r.complete ? 1 : 0) << ','
            << (rows[t].r.sound ? 1 : 0) << ',' << buf << '\n';
        sound &= rows[t].r.sound;
    }
    emit("permprod.csv", csv.str());
    return sound ? 0 : 1;
}

// ---------------------------------------------------------------- sample-x

struct SampleOpts {
    std::string graph = "P:3", theta = "const:4/3";
    int n = 32, trials = 500;
};

int cmd_sample_x(const SampleOpts& o) {
    PatternGraph g = parse_graph_spec(o.graph);
    ThresholdWeighting th = parse_theta_spec(o.theta, g);
    std::vector<char> yes(std::max(o.trials, 0));
    parallel_for(yes.size(), G.jobs,
                 [&](std::size_t i) { yes[i] = solve_sub(sample_instance(g, th, o.n, split_seed(G.seed, i))); });
    std::ostringstream csv;
    csv << "trial,yes\n";
    int cnt = 0;
    for (std::size_t i = 0; i < yes.size(); ++i) {
        csv << i << ',' << (yes[i] ? 1 : 0) << '\n';
        cnt += yes[i];
    }
    emit("sample-x.csv", csv.str());
    std::cerr << cnt << "/" << yes.size() << " YES\n";
    return 0;
}

// ---------------------------------------------------------------- td

struct TdOpts {
    std::string graph;
    int max_vertices = 32;
    bool naive = false;
};

int cmd_td(const TdOpts& o) {
    PatternGraph g = parse_graph_spec(o.graph);
    int d = o.naive ? tree_depth_naive(SimpleGraph::from_pattern(g)) : tree_depth(g, o.max_vertices);
    emit("td.txt", std::to_string(d) + "\n");
    return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyOpts {
    std::string suite, config;
    int trials = -1;
};

int cmd_verify(const VerifyOpts& o, const CLI::App& app) {
    SuiteConfig cfg = o.config.empty() ? SuiteConfig{} : load_config(o.config);
    // flags override the config file
    if (o.config.empty() || app.count("--seed")) cfg.seed = G.seed;
    if (o.config.empty() || app.count("--jobs")) cfg.jobs = G.jobs;
    if (o.config.empty() || app.count("--cap")) cfg.cap = G.cap;
    if (o.trials >= 0) cfg.trials = o.trials;
    SuiteReport r = run_suite(o.suite, cfg);
    for (const CriterionResult& c : r.criteria)
        std::printf("%s criterion %2d (%s): %s\n", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), c.summary.c_str());
    std::string dir = G.out.empty() ? "reports" : G.out;
    write_report(r, dir);
    std::printf("%s: %s, report in %s\n", r.suite.c_str(), r.pass ? "pass" : "fail", dir.c_str());
    return r.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phikit: potentials, pathset complexity and permutation-product experiments"};
    app.set_version_flag("--version", artifact_version());
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", G.seed, "random seed")->capture_default_str();
    app.add_option("--cap", G.cap, "enumeration cap")->capture_default_str();
    app.add_option("--jobs", G.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--out", G.out, "directory for result files");

    int rc = 0;

    PhiOpts phi_o;
    auto add_phi = [&](const char* name, const char* desc, bool cond) {
        CLI::App* s = app.add_subcommand(name, desc);
        s->add_option("--tree", phi_o.tree, "rd|mo|fo|tk, an s-expression, or a file")->required();
        s->add_option("-k,--k", phi_o.k, "size for the canonical families");
        s->add_option("--theta", phi_o.theta, "const:p/q|one|tinf|walk, JSON or a file")->capture_default_str();
        auto* c = s->add_option("--cond", phi_o.cond, "conditioning set S");
        if (cond) c->required();
        s->add_flag("--trace", phi_o.trace, "print the rules attaining the value");
        s->callback([&, cond] { rc = cmd_phi(phi_o, cond); });
    };
    add_phi("phi", "Φ_θ(A) for one join-tree", false);
    add_phi("phi-cond", "Φ_θ(A|S) for one join-tree", true);

    MinOpts min_o;
    CLI::App* mp = app.add_subcommand("min-phi", "minimum of Φ over join-trees of a graph");
    mp->add_option("--graph", min_o.graph, "T:k|P:k|P:i-j, JSON or a file")->required();
    mp->add_option("--theta", min_o.theta)->capture_default_str();
    mp->add_option("--mode", min_o.mode)->check(CLI::IsMember({"exhaustive", "canonical", "sampled"}))->capture_default_str();
    mp->add_flag("--cond", min_o.cond, "use Φ(A|∅) instead of Φ(A)");
    mp->add_option("--samples", min_o.samples)->capture_default_str();
    mp->callback([&] { rc = cmd_min_phi(min_o); });

    CLI::App* kp = app.add_subcommand("kappa", "min over minimal join-trees of the largest Δ of a sub-join-tree");
    kp->add_option("--graph", min_o.graph)->required();
    kp->add_option("--theta", min_o.theta)->capture_default_str();
    kp->callback([&] { rc = cmd_kappa(min_o); });

    ChiOpts chi_o;
    CLI::App* cl = app.add_subcommand("chi-lp", "χ_A(ā) by linear programming");
    cl->add_option("--tree", chi_o.tree)->required();
    cl->add_option("-k,--k", chi_o.k);
    cl->add_option("--profile", chi_o.profile, "free|rd|mo|fib|a0,a1,...")->capture_default_str();
    cl->add_flag("--exact", chi_o.exact, "rational simplex");
    cl->callback([&] { rc = cmd_chi_lp(chi_o); });

    CLI::App* cs = app.add_subcommand("chi-sweep", "chi-lp over a canonical family, CSV");
    cs->add_option("--family", chi_o.family)->check(CLI::IsMember({"rd", "mo", "fo"}))->capture_default_str();
    cs->add_option("--kmin", chi_o.kmin)->capture_default_str();
    cs->add_option("--kmax", chi_o.kmax)->capture_default_str();
    cs->add_option("--profile", chi_o.profile)->capture_default_str();
    cs->add_flag("--exact", chi_o.exact);
    cs->callback([&] { rc = cmd_chi_sweep(chi_o); });

    PathsetOpts ps_o;
    CLI::App* pv = app.add_subcommand("pathset-verify", "brute-force χ against Φ(A|S) on every relation");
    pv->add_option("--graph", ps_o.graph)->capture_default_str();
    pv->add_option("--theta", ps_o.theta)->capture_default_str();
    pv->add_option("--tree", ps_o.tree, "one s-expression; default all minimal join-trees");
    pv->add_option("--cond", ps_o.cond, "conditioning set S");
    pv->add_option("-n,--n", ps_o.n)->capture_default_str()->check(CLI::PositiveNumber);
    pv->callback([&] { rc = cmd_pathset_verify(ps_o); });

    PermOpts pp_o;
    CLI::App* pp = app.add_subcommand("permprod", "isolate π̄-paths with the simulated formulas, CSV per trial");
    pp->add_option("-n,--n", pp_o.n)->capture_default_str()->check(CLI::PositiveNumber);
    pp->add_option("-k,--k", pp_o.k)->capture_default_str()->check(CLI::PositiveNumber);
    pp->add_option("--tree", pp_o.tree)->capture_default_str();
    pp->add_option("--profile", pp_o.profile)->capture_default_str();
    pp->add_option("--trials", pp_o.trials)->capture_default_str();
    pp->add_option("--c", pp_o.c, "polylog exponent")->capture_default_str();
    pp->add_option("--outer", pp_o.outer, "outer rectangle multiplier")->capture_default_str();
    pp->add_option("--perms", pp_o.perms, "JSON file with fixed permutations");
    pp->add_flag("--symbolic", pp_o.symbolic, "print the formula size bound instead");
    pp->callback([&] { rc = cmd_permprod(pp_o); });

    SampleOpts sx_o;
    CLI::App* sx = app.add_subcommand("sample-x", "sample X_{θ,n} and decide SUB, CSV per trial");
    sx->add_option("--pattern,--graph", sx_o.graph)->capture_default_str();
    sx->add_option("--theta", sx_o.theta)->capture_default_str();
    sx->add_option("-n,--n", sx_o.n)->capture_default_str()->check(CLI::PositiveNumber);
    sx->add_option("--trials", sx_o.trials)->capture_default_str();
    sx->callback([&] { rc = cmd_sample_x(sx_o); });

    TdOpts td_o;
    CLI::App* td = app.add_subcommand("td", "tree-depth, edge-height convention");
    td->add_option("--graph", td_o.graph)->required();
    td->add_option("--max-vertices", td_o.max_vertices)->capture_default_str();
    td->add_flag("--naive", td_o.naive, "un-memoized recursion");
    td->callback([&] { rc = cmd_td(td_o); });

    VerifyOpts v_o;
    CLI::App* vf = app.add_subcommand("verify", "run a verification suite and write JSON/CSV reports");
    vf->add_option("suite", v_o.suite)->required()->check(CLI::IsMember(suite_names()));
    vf->add_option("--config", v_o.config, "versioned JSON config");
    vf->add_option("--trials", v_o.trials, "trial count for the randomized suites");
    vf->callback([&] { rc = cmd_verify(v_o, app); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
