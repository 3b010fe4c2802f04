#include "phikit/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phikit {

namespace {

bool looks_like_json(const std::string& s) {
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '{' || c == '[';
    }
    return false;
}

bool file_exists(const std::string& p) {
    std::ifstream f(p);
    return f.good();
}

json load_json_spec(const std::string& spec) {
    if (looks_like_json(spec)) return json::parse(spec);
    return json::parse(read_file(spec));
}

Ambient ambient_from(const std::string& s) {
    if (s == "Tinf" || s == "TInf" || s == "T") return Ambient::TInf;
    if (s == "Pinf" || s == "PInf" || s == "P") return Ambient::PInf;
    throw std::invalid_argument("unknown ambient '" + s + "'");
}

std::string ambient_tag(Ambient a) { return a == Ambient::TInf ? "Tinf" : "Pinf"; }

int parse_int(const std::string& s, const char* what) {
    std::size_t used = 0;
    int v;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("bad ") + what + " '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument(std::string("bad ") + what + " '" + s + "'");
    return v;
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

json vertex_to_json(Ambient a, Vertex v) {
    if (a == Ambient::PInf) return v;
    return json::array({tlevel(v), tindex(v)});
}

Vertex vertex_from_json(Ambient a, const json& j) {
    if (a == Ambient::PInf) {
        if (!j.is_number_integer()) throw std::invalid_argument("P_inf vertex must be an integer");
        return j.get<std::int64_t>();
    }
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("T_inf vertex must be [level, index]");
    std::int64_t l = j[0].get<std::int64_t>(), i = j[1].get<std::int64_t>();
    if (l < 0 || i < 0 || i >= (std::int64_t{1} << kIndexBits)) throw std::invalid_argument("T_inf vertex out of range");
    return tv(static_cast<int>(l), i);
}

json vertex_set_to_json(Ambient a, const VertexSet& s) {
    json out = json::array();
    for (Vertex v : s) out.push_back(vertex_to_json(a, v));
    return out;
}

VertexSet vertex_set_from_json(Ambient a, const json& j) {
    std::vector<Vertex> vs;
    for (const auto& x : j) vs.push_back(vertex_from_json(a, x));
    return make_vertex_set(std::move(vs));
}

json graph_to_json(const PatternGraph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges())
        edges.push_back(json::array({vertex_to_json(g.ambient(), e.u), vertex_to_json(g.ambient(), e.v)}));
    json out{{"ambient", ambient_tag(g.ambient())}, {"edges", edges}};
    if (g.allows_isolated()) out["vertices"] = vertex_set_to_json(g.ambient(), g.vertices());
    return out;
}

PatternGraph graph_from_json(const json& j) {
    Ambient a = ambient_from(j.at("ambient").get<std::string>());
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw std::invalid_argument("edge must be a pair");
        edges.push_back(make_edge(a, vertex_from_json(a, e[0]), vertex_from_json(a, e[1])));
    }
    if (j.contains("vertices")) return PatternGraph(a, edges, vertex_set_from_json(a, j["vertices"]));
    return PatternGraph(a, edges);
}

PatternGraph parse_graph_spec(const std::string& spec) {
    if (spec.size() > 2 && (spec[0] == 'T' || spec[0] == 'P') && spec[1] == ':') {
        std::string rest = spec.substr(2);
        if (spec[0] == 'T') {
            int k = parse_int(rest, "tree height");
            if (k < 1) throw std::invalid_argument("T:k needs k >= 1");
            return build_complete_binary_tree(k);
        }
        auto dash = rest.find('-', 1);
        if (dash != std::string::npos)
            return build_path_range(parse_int(rest.substr(0, dash), "path start"), parse_int(rest.substr(dash + 1), "path end"));
        int k = parse_int(rest, "path length");
        if (k < 1) throw std::invalid_argument("P:k needs k >= 1");
        return build_path(k);
    }
    if (!looks_like_json(spec) && !file_exists(spec)) throw std::invalid_argument("unknown graph spec '" + spec + "'");
    return graph_from_json(load_json_spec(spec));
}

VertexSet parse_vertex_set(Ambient a, const std::string& spec) {
    if (looks_like_json(spec)) return vertex_set_from_json(a, json::parse(spec));
    std::vector<Vertex> vs;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        if (a == Ambient::PInf) {
            vs.push_back(parse_int(tok, "vertex"));
        } else {
            auto c = tok.find(':');
            if (c == std::string::npos) throw std::invalid_argument("T_inf vertex must be level:index");
            vs.push_back(tv(parse_int(tok.substr(0, c), "level"), parse_int(tok.substr(c + 1), "index")));
        }
    }
    return make_vertex_set(std::move(vs));
}

json rational_to_json(const Rational& r) { return json::array({r.num(), r.den()}); }

Rational rational_from_json(const json& j) {
    if (j.is_array() && j.size() == 2) return Rational(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    throw std::invalid_argument("rational must be [num, den], an integer or a string");
}

json theta_to_json(const ThresholdWeighting& th, Ambient a) {
    switch (th.kind()) {
        case ThresholdWeighting::Kind::Constant:
            return {{"kind", "constant"}, {"value", rational_to_json(th.constant_value())}};
        case ThresholdWeighting::Kind::TInf:
            return {{"kind", "tinf"}};
        case ThresholdWeighting::Kind::Explicit: {
            json w = json::array();
            Ambient amb = a;
            for (const auto& [e, v] : th.values())
                w.push_back(json::array(
                    {json::array({vertex_to_json(amb, e.u), vertex_to_json(amb, e.v)}), rational_to_json(v)}));
            return {{"kind", "explicit"}, {"ambient", ambient_tag(amb)}, {"weights", w}};
        }
    }
    return {};
}

ThresholdWeighting theta_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return ThresholdWeighting::constant(rational_from_json(j.at("value")));
    if (kind == "tinf") return ThresholdWeighting::tinf();
    if (kind != "explicit") throw std::invalid_argument("unknown θ kind '" + kind + "'");
    Ambient a = ambient_from(j.at("ambient").get<std::string>());
    std::map<Edge, Rational> m;
    for (const auto& item : j.at("weights")) {
        const json& e = item.at(0);
        m[make_edge(a, vertex_from_json(a, e.at(0)), vertex_from_json(a, e.at(1)))] = rational_from_json(item.at(1));
    }
    return ThresholdWeighting::explicit_map(std::move(m));
}

ThresholdWeighting parse_theta_spec(const std::string& spec, const PatternGraph& g) {
    if (spec.rfind("const:", 0) == 0) return ThresholdWeighting::constant(Rational::parse(spec.substr(6)));
    if (spec == "one") return ThresholdWeighting::constant(Rational(1));
    if (spec == "tinf") return ThresholdWeighting::tinf();
    if (spec == "walk") return theta_from_markov(uniform_walk(g), g);
    if (!looks_like_json(spec) && !file_exists(spec)) throw std::invalid_argument("unknown θ spec '" + spec + "'");
    return theta_from_json(load_json_spec(spec));
}

JoinTree parse_tree_spec(const std::string& spec, int k) {
    auto colon = spec.find(':');
    if (colon != std::string::npos && spec[0] != '(') {
        std::string fam = spec.substr(0, colon);
        if (fam == "rd" || fam == "mo" || fam == "fo" || fam == "tk")
            return parse_tree_spec(fam, parse_int(spec.substr(colon + 1), "tree size"));
    }
    if ((spec == "rd" || spec == "mo" || spec == "fo" || spec == "tk") && k < 1)
        throw std::invalid_argument("tree family '" + spec + "' needs k >= 1");
    if (spec == "rd") return canonical_rd(k);
    if (spec == "mo") return canonical_mo(k);
    if (spec == "fo") return canonical_fo(k);
    if (spec == "tk") return canonical_tk(k);
    std::string s = spec;
    if (!s.empty() && s[0] != '(') s = read_file(spec);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return JoinTree::parse_sexp(s);
}

Profile parse_profile_spec(const std::string& spec, int k) {
    if (spec == "rd") return rd_profile(k);
    if (spec == "mo") return mo_profile(k);
    if (spec == "fib") return fib_profile(k);
    return parse_profile(spec);
}

json relation_to_json(const Relation& r) {
    json tuples = json::array();
    for (std::uint64_t c : r.codes()) tuples.push_back(r.decode(c));
    return {{"n", r.n()}, {"vars", r.vars()}, {"tuples", tuples}};
}

Relation relation_from_json(const json& j) {
    VertexSet vars = make_vertex_set(j.at("vars").get<std::vector<Vertex>>());
    Relation r(j.at("n").get<int>(), vars);
    for (const auto& t : j.at("tuples")) r.insert(t.get<std::vector<int>>());
    return r;
}

PermSequence perms_from_json(const json& j) {
    PermSequence ps;
    const json& arr = j.is_array() ? j : j.at("perms");
    for (const auto& p : arr) ps.pi.push_back(p.get<std::vector<int>>());
    if (ps.pi.empty()) throw std::invalid_argument("no permutations given");
    ps.n = j.is_object() && j.contains("n") ? j["n"].get<int>() : static_cast<int>(ps.pi[0].size());
    ps.validate();
    return ps;
}

json perms_to_json(const PermSequence& ps) { return {{"n", ps.n}, {"perms", ps.pi}}; }

}  // namespace phikit
