#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace phikit {

enum class Ambient { PInf, TInf };

const char* ambient_name(Ambient a);

// P_inf vertices are plain integers. T_inf vertices pack (level, index) as
// level << 40 | index; level 0 is the leaf level and the parent of (j,i) is
// (j+1, i/2).
using Vertex = std::int64_t;

constexpr int kIndexBits = 40;

inline Vertex tv(int level, std::int64_t index) { return (static_cast<Vertex>(level) << kIndexBits) | index; }
inline int tlevel(Vertex v) { return static_cast<int>(v >> kIndexBits); }
inline std::int64_t tindex(Vertex v) { return v & ((std::int64_t{1} << kIndexBits) - 1); }
inline Vertex tparent(Vertex v) { return tv(tlevel(v) + 1, tindex(v) >> 1); }
inline Vertex tchild(Vertex v, int side) { return tv(tlevel(v) - 1, 2 * tindex(v) + side); }

std::string vertex_str(Ambient a, Vertex v);

// Normalized so that u < v. For T_inf that means u is the child.
struct Edge {
    Vertex u = 0, v = 0;
    auto operator<=>(const Edge&) const = default;
};

Edge make_edge(Ambient a, Vertex x, Vertex y);  // throws if not an ambient edge
bool is_ambient_edge(Ambient a, Vertex x, Vertex y);
std::string edge_str(Ambient a, const Edge& e);

using VertexSet = std::vector<Vertex>;  // kept sorted and unique

VertexSet make_vertex_set(std::vector<Vertex> vs);
bool vs_contains(const VertexSet& s, Vertex v);
VertexSet vs_union(const VertexSet& a, const VertexSet& b);
bool vs_intersects(const VertexSet& a, const VertexSet& b);
bool vs_subset(const VertexSet& a, const VertexSet& b);

// Finite subgraph of P_inf or T_inf.
class PatternGraph {
public:
    PatternGraph() = default;
    explicit PatternGraph(Ambient a) : amb_(a) {}
    PatternGraph(Ambient a, std::vector<Edge> edges);
    // with the isolated-vertex flag set, `extra` vertices are kept even if no edge touches them
    PatternGraph(Ambient a, std::vector<Edge> edges, VertexSet extra);

    Ambient ambient() const { return amb_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const VertexSet& vertices() const { return verts_; }
    std::size_t num_edges() const { return edges_.size(); }
    std::size_t num_vertices() const { return verts_.size(); }
    bool empty() const { return edges_.empty() && verts_.empty(); }
    bool allows_isolated() const { return isolated_; }

    bool has_edge(const Edge& e) const;
    bool has_vertex(Vertex v) const { return vs_contains(verts_, v); }

    bool operator==(const PatternGraph& o) const { return amb_ == o.amb_ && edges_ == o.edges_ && verts_ == o.verts_; }

private:
    void finish(VertexSet extra);

    Ambient amb_ = Ambient::PInf;
    std::vector<Edge> edges_;
    VertexSet verts_;
    bool isolated_ = false;
};

PatternGraph graph_union(const PatternGraph& a, const PatternGraph& b);
PatternGraph graph_intersection(const PatternGraph& a, const PatternGraph& b);
PatternGraph edge_subset(const PatternGraph& g, std::uint64_t mask);  // mask over g.edges()
bool is_subgraph(const PatternGraph& a, const PatternGraph& b);

// generators
PatternGraph build_path(int k);                      // P_k = P_{0,k}
PatternGraph build_path_range(std::int64_t i, std::int64_t j);
PatternGraph build_complete_binary_tree(int k);      // T_k rooted at (k,0)
PatternGraph subtree_at(Vertex x);                   // T_x
PatternGraph subtree_plus(Vertex x);                 // T_x plus the edge to parent(x)

// structure
std::vector<PatternGraph> components(const PatternGraph& f);
bool is_connected(const PatternGraph& f);
PatternGraph restrict_away(const PatternGraph& f, const VertexSet& s);  // F ⊖ S
PatternGraph induced_on(const PatternGraph& f, const VertexSet& t);    // F[T]

int boundary_size(const PatternGraph& f);            // relative to the infinite ambient
int max_complete_height(const PatternGraph& f);      // T_inf only
int longest_component_length(const PatternGraph& f); // edges in the largest component
bool is_grounded(const PatternGraph& f);
bool is_ungrounded(const PatternGraph& f);

// P_inf components of F|S
enum class CompKind { Open, LeftInS, RightInS, Closed };

struct PComponent {
    CompKind kind;
    std::int64_t i, j;
    std::int64_t length() const { return j - i; }
    VertexSet vertices() const;  // endpoints lying in S are excluded
    bool half_open() const { return kind == CompKind::LeftInS || kind == CompKind::RightInS; }
    std::string str() const;     // "(" marks an endpoint in S, "[" one that is not
    bool operator==(const PComponent&) const = default;
};

std::vector<PComponent> decompose_components(const PatternGraph& f, const VertexSet& s);

// Plain finite graph on 0..n-1, used by tree-depth.
struct SimpleGraph {
    int n = 0;
    std::vector<std::uint64_t> adj;  // n <= 64
    static SimpleGraph from_pattern(const PatternGraph& g);
    void add_edge(int a, int b);
};

// Edge-height convention: single edge -> 1, T_k -> k, empty graph -> 0.
int tree_depth(const SimpleGraph& g, int cap = 25);
int tree_depth(const PatternGraph& g, int cap = 25);

}  // namespace phikit
