#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "disklab/constructions.hpp"
#include "disklab/geometry.hpp"

namespace disklab {

/// Bounded placed copies of one base shape, one per vertex.
struct Realization {
    std::vector<VertexId> vertices;
    std::vector<PlacedShape> disks;  // aligned with vertices
    FamilyTag family = FamilyTag::hom;
};

enum class MismatchKind { missing_edge, extra_edge };

struct Mismatch {
    VertexId a, b;
    MismatchKind kind = MismatchKind::missing_edge;
    double distance = 0.0;  // signed distance of the two disks
};

const char* mismatch_name(MismatchKind k);

// Pairs where closed intersection and edge membership disagree. Empty iff r realizes g.
std::vector<Mismatch> verify_realization(const Graph& g, const Realization& r);

// Point in the interiors of both regions, as deep as practical.
Vec2 witness_point(const Region& a, const Region& b);

struct ConversionOptions {
    int max_rounds = 40;
    double eta = 0.25;  // first shrink amount
};

// Turns an interior-realization (half-planes allowed) into a realization by disks of
// the family. The result has been verified; exhausting the rounds throws.
Realization to_realization(const InteriorRealization& ir, const Graph& g, FamilyTag family = FamilyTag::hom,
                           const ConversionOptions& opt = {});

/// Image of the coordinate lines 0 = xs[0] < ... < xs[m] = 1 (and ys) under
/// f(x, y) = z + x a + y b.
struct MGrid {
    Vec2 z{0.0, 0.0};
    Vec2 a{1.0, 0.0};
    Vec2 b{0.0, 1.0};
    std::vector<double> xs{0.0, 1.0};
    std::vector<double> ys{0.0, 1.0};

    static MGrid uniform(int m);
    int m() const { return static_cast<int>(xs.size()) - 1; }
    Affine map() const { return {{a.x, b.x, a.y, b.y}, z}; }
    Vec2 operator()(double x, double y) const { return z + a * x + b * y; }
    void validate() const;  // throws input errors
};

struct AlignedConfig {
    MGrid grid;
    std::vector<PlacedShape> v;  // v[(j-1)*m + (i-1)] is V_ij
    std::vector<HalfPlane> u1, u2;        // U_1j, U_2j for j = 1..m
    std::vector<HalfPlane> ubar1, ubar2;  // Ubar_i1, Ubar_i2 for i = 1..m
    std::optional<PlacedShape> w;
};

struct AlignmentReport {
    bool aligned = true;
    std::vector<std::string> violations;  // each starts with the offending element name
};

AlignmentReport check_aligned(const AlignedConfig& cfg);

// The canonical realization of a construction read as a configuration on the uniform grid.
AlignedConfig aligned_config(const ConstructionOutput& out);

AlignedConfig apply_affine(const Affine& f, const AlignedConfig& cfg);

struct PixelMask {
    int m = 0;
    std::vector<char> cells;  // cells[(j-1)*m + (i-1)]

    bool at(int i, int j) const { return cells[static_cast<std::size_t>((j - 1) * m + (i - 1))] != 0; }
    void set(int i, int j, bool on) { cells[static_cast<std::size_t>((j - 1) * m + (i - 1))] = on; }
    std::size_t count() const;
    bool operator==(const PixelMask&) const = default;
};

// Cell (i, j) is on iff v(i,j) and w are adjacent.
PixelMask pixel_mask(const Graph& g, int m);

struct Reconstruction {
    std::vector<Vec2> hull;                  // counter-clockwise
    std::vector<std::array<Vec2, 4>> cells;  // the raw union, one parallelogram per marked cell
    double cell_diameter = 0.0;              // largest cell diameter of the grid
};

Reconstruction reconstruct_shape(const PixelMask& mask, const MGrid& grid);

double polygon_support(const std::vector<Vec2>& poly, Vec2 u);
// Hausdorff distance between a convex polygon and a placed shape.
double hausdorff(const std::vector<Vec2>& poly, const PlacedShape& s);

struct GridDiagnostics {
    static constexpr std::array<const char*, 5> names{"x/y", "y/x", "sin(phi)", "alpha-sums", "beta-sums"};
    std::array<double, 5> value{};   // x/y, y/x, sin(phi), worst partial sums
    std::array<double, 5> margin{};  // positive when the inequality holds
    std::array<bool, 5> pass{};

    bool all() const { return pass[0] && pass[1] && pass[2] && pass[3] && pass[4]; }
};

GridDiagnostics grid_diagnostics(const MGrid& grid, double c);

// `mask m=<i>` then m rows of '#'/'.', top row (j = m) first.
std::string format_mask(const PixelMask& mask);
PixelMask parse_mask(std::string_view text);
// `grid z=(..) a=(..) b=(..) xs=x0,x1,.. ys=y0,y1,..`
std::string format_grid(const MGrid& grid);
MGrid parse_grid(std::string_view text);

// `realization family=<tag>` then one `<vertex> <placed shape>` line per disk.
std::string format_realization(const Realization& r);
Realization parse_realization(std::string_view text);

}  // namespace disklab
