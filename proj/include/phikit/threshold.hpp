#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phikit/graph.hpp"
#include "phikit/rational.hpp"

namespace phikit {

class ThresholdWeighting {
public:
    enum class Kind { Constant, TInf, Explicit };

    static ThresholdWeighting constant(Rational c);
    // θ_∞ on T_∞: 4/3 on edges touching the leaf level, 2/3 elsewhere
    static ThresholdWeighting tinf();
    static ThresholdWeighting explicit_map(std::map<Edge, Rational> values);

    Kind kind() const { return kind_; }
    bool defined(const Edge& e) const;
    Rational operator()(const Edge& e) const;  // throws std::out_of_range outside the domain
    const std::map<Edge, Rational>& values() const { return map_; }
    Rational constant_value() const { return c_; }
    std::string describe() const;

private:
    Kind kind_ = Kind::Constant;
    Rational c_{1};
    std::map<Edge, Rational> map_;
};

Rational delta(const PatternGraph& f, const ThresholdWeighting& th);
Rational delta_cond(const PatternGraph& f, const VertexSet& s, const ThresholdWeighting& th);

// Sum over v ∈ V(F) of the number of T_∞ edges at v missing from F, divided by
// the walk degree; for the uniform walk on T_∞ this equals Δ_{θ∞}(F).
Rational tinf_boundary_sum(const PatternGraph& f);

struct MarkovChain {
    Ambient ambient = Ambient::PInf;
    std::map<std::pair<Vertex, Vertex>, Rational> p;  // p[{v,w}] = M_{v,w}

    Rational at(Vertex v, Vertex w) const;
    // throws std::invalid_argument on a bad row sum or off-graph support
    void validate(const PatternGraph& g) const;
};

MarkovChain uniform_walk(const PatternGraph& g);
ThresholdWeighting theta_from_markov(const MarkovChain& m, const PatternGraph& g);
Rational boundary_sum_delta(const MarkovChain& m, const PatternGraph& f);

struct ThresholdReport {
    bool ok = true;
    std::string reason;
    std::optional<PatternGraph> witness;
    Rational witness_delta;
    Rational total_delta;
    std::uint64_t checked = 0;
};

ThresholdReport validate_threshold(const PatternGraph& g, const ThresholdWeighting& th);

// Random V(G)-coloured graph: vertex (v,i) for v ∈ V(G), i ∈ [n]; the pair
// {(v,i),(w,j)} for {v,w} ∈ E(G) is present with probability n^{-θ({v,w})}.
struct ColoredInstance {
    int n = 0;
    PatternGraph pattern;
    std::uint64_t seed = 0;
    // per pattern edge (in pattern.edges() order): present pairs (i at e.u, j at e.v)
    std::vector<std::vector<std::pair<int, int>>> pairs;
};

ColoredInstance sample_instance(const PatternGraph& g, const ThresholdWeighting& th, int n, std::uint64_t seed);
bool solve_sub(const ColoredInstance& inst);

}  // namespace phikit
