#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phikit/chi.hpp"
#include "phikit/graph.hpp"
#include "phikit/jointree.hpp"
#include "phikit/pathset.hpp"
#include "phikit/permprod.hpp"
#include "phikit/threshold.hpp"

namespace phikit {

using nlohmann::json;

// {"ambient":"Tinf","edges":[[[j,i],[j',i']],...]} or {"ambient":"Pinf","edges":[[a,b],...]}
json graph_to_json(const PatternGraph& g);
PatternGraph graph_from_json(const json& j);

json vertex_to_json(Ambient a, Vertex v);
Vertex vertex_from_json(Ambient a, const json& j);
json vertex_set_to_json(Ambient a, const VertexSet& s);
VertexSet vertex_set_from_json(Ambient a, const json& j);

// "T:k", "P:k", "P:i-j", a JSON file path, or inline JSON
PatternGraph parse_graph_spec(const std::string& spec);
// "0,2,5" for P_inf, "0:1,2:0" (level:index) for T_inf, or inline JSON
VertexSet parse_vertex_set(Ambient a, const std::string& spec);

// θ as {"kind":"explicit","ambient":..,"weights":[[edge,[num,den]],...]},
// {"kind":"constant","value":[num,den]} or {"kind":"tinf"}
json theta_to_json(const ThresholdWeighting& th, Ambient a = Ambient::PInf);
ThresholdWeighting theta_from_json(const json& j);
// "const:4/3", "one", "tinf", "walk" (uniform walk on g), a JSON file path, or inline JSON
ThresholdWeighting parse_theta_spec(const std::string& spec, const PatternGraph& g);

// "rd" / "mo" / "fo" (over P_k), "tk" (over T_k), optionally as "fo:13", an s-expression, or a file holding one
JoinTree parse_tree_spec(const std::string& spec, int k);
// "rd" / "mo" / "fib" or an explicit list "1/2,0,1/2"
Profile parse_profile_spec(const std::string& spec, int k);

json rational_to_json(const Rational& r);  // [num, den]
Rational rational_from_json(const json& j);

json relation_to_json(const Relation& r);
Relation relation_from_json(const json& j);

// {"n":..,"perms":[[...],...]}, 0-based
PermSequence perms_from_json(const json& j);
json perms_to_json(const PermSequence& ps);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace phikit
