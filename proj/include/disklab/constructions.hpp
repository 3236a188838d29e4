#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "disklab/chains.hpp"
#include "disklab/geometry.hpp"

namespace disklab {

enum class Role : std::uint8_t {
    // grid construction
    v, u, ubar, z, zbar, w, x, xbar,
    // K_{2,n} and L_n
    gu, guhat, gv, gw,
};

/// Vertex name: a role with up to three indices.
///   v(i,j) u(side,j) ubar(i,side) z(i,j) zbar(i,j) w x(i,j) xbar(i,j)
///   u1 u2 (gu) uhat1 uhat2 (guhat) v(j) (gv) w(i,j,k) (gw)
struct VertexId {
    Role role = Role::w;
    int a = 0, b = 0, c = 0;

    auto operator<=>(const VertexId&) const = default;
};

std::string format_vertex(const VertexId& v);
VertexId parse_vertex(std::string_view s);

using Edge = std::pair<std::uint32_t, std::uint32_t>;

struct Graph {
    std::vector<VertexId> vertices;
    std::vector<Edge> edges;  // a < b, sorted, unique
    std::string note;

    // Index of a vertex or -1.
    long find(const VertexId& v) const;
    bool has_edge(std::uint32_t a, std::uint32_t b) const;
    // Sorts and dedupes edges; rejects self-loops and out-of-range indices.
    void normalize();
};

// Symmetric neighbour lists of a graph.
struct Adjacency {
    std::vector<std::uint64_t> offsets;
    std::vector<std::uint32_t> neighbours;

    explicit Adjacency(const Graph& g);
    bool adjacent(std::uint32_t a, std::uint32_t b) const;
    std::size_t degree(std::uint32_t a) const { return offsets[a + 1] - offsets[a]; }
};

struct InteriorRealization {
    std::vector<VertexId> vertices;
    std::vector<Region> regions;  // aligned with vertices
};

struct ConstructionOutput {
    Graph graph;
    InteriorRealization realization;
    int m = 0, n = 0, k = 0;
    FamilyTag family = FamilyTag::hom;
    double eps = 0.0;
    double delta = 0.0;
    Shape shape = Shape::circle(0.5);  // base disk with bounding box [0,1]^2
};

Graph build_K2n(int n);
Graph build_Ln(int n);

// Largest eps0 such that every eps in (0, eps0) leaves the four near-edge chords
// of the unit-bbox shape at least (n+1) eps long.
double glue_epsilon(const Shape& unit_bbox_shape, int n);

inline constexpr double kEpsCap = 0.25;
inline constexpr std::size_t kMaxVertices = 10'000'000;

ConstructionOutput build_Gmn(const Shape& shape, FamilyTag family, int m, int n, const ChainConfig& cfg = {});

// Edge uv iff the interiors of the regions of u and v intersect.
Graph extract_graph(const InteriorRealization& r);
// All-pairs reference implementation through interiors_intersect.
Graph extract_graph_bruteforce(const InteriorRealization& r);

struct PropertyReport {
    std::array<bool, 5> pass{};
    std::vector<std::string> failures;  // prefixed with the property number

    bool all() const { return pass[0] && pass[1] && pass[2] && pass[3] && pass[4]; }
};

PropertyReport check_properties(const ConstructionOutput& out);

// Cell [(i-1)/m, i/m] x [(j-1)/m, j/m] against the placed shape.
bool cell_inside(const PlacedShape& s, int m, int i, int j);
bool cell_meets(const PlacedShape& s, int m, int i, int j);

// `gmn shape="<spec>" family=<tag> m= n= k= eps= delta=`, then `<id> <region>` lines
// and `edge <a> <b>` lines.
std::string format_construction(const ConstructionOutput& out);
ConstructionOutput parse_construction(std::string_view text);

// `vertex <id>` lines followed by `edge <a> <b>` lines.
std::string format_graph(const Graph& g);
Graph parse_graph(std::string_view text);

}  // namespace disklab
