#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "disklab/geometry.hpp"
#include "disklab/optimize.hpp"

namespace disklab {

/// Region between the parallel lines {<p, perp(u)> = d1} and {<p, perp(u)> = d2}.
struct Strip {
    Vec2 u{1.0, 0.0};
    double d1 = 0.0;
    double d2 = 1.0;

    double width() const { return d2 - d1; }
    Vec2 normal() const { return perp(u); }
    bool operator==(const Strip&) const = default;
};

struct Chain {
    Strip strip;
    ShapePtr shape;
    std::vector<Placement> placements;
    FamilyTag family = FamilyTag::sim;
    bool warning = false;  // set when the optimizer stopped without converging

    std::size_t size() const { return placements.size(); }
    PlacedShape disk(std::size_t i) const { return {shape, placements[i]}; }
};

struct ChainReport {
    bool valid = false;
    bool strict = false;
    double length = 0.0;
    std::vector<double> gaps;  // signed distance of consecutive disks
    std::vector<std::string> violations;
};

struct ChainConfig {
    int starts = 32;
    std::uint64_t seed = 0;
    BfgsOptions bfgs{};
};

struct StretchEstimate {
    FamilyTag family = FamilyTag::sim;
    std::vector<double> sigma;  // sigma[n-1]: best n-chain length found
    std::vector<Chain> chains;  // witnesses for sigma
    double sigma1_upper = 0.0;  // rigorous upper bound on the 1-chain length
    double certified_lower = 0.0;
    double heuristic = 0.0;
    bool warning = false;
};

struct StrictChain {
    Chain chain;
    int k = 0;
    double delta = 0.0;
};

enum class Axis { horizontal, vertical };

ChainReport chain_check(const Chain& chain);

// Longest chain found in the strip {0 <= y <= 1}. HOM is solved exactly; the
// similarity families are searched from cfg.starts seeded starts plus the warm starts.
Chain max_chain(const Shape& shape, FamilyTag family, int n, const ChainConfig& cfg = {},
                const std::vector<Chain>& warm_starts = {});

// c2 moved into the strip of c1 and pushed along it as far as contact with the last disk of c1 allows.
Chain concatenate(const Chain& c1, const Chain& c2);

// Rigid motion p -> R(angle) p + shift applied to the whole chain, strip included.
Chain move_chain(const Chain& c, double angle, Vec2 shift);

// Upper bound on the length of a 1-chain over all admissible placements.
double single_disk_upper_bound(const Shape& shape, FamilyTag family);

StretchEstimate stretch_bounds(const Shape& shape, FamilyTag family, int n_max, const ChainConfig& cfg = {});

// Length of the longest HOM n-chain along the axis.
double hom_chain_length(const Shape& shape, int n, Axis axis = Axis::horizontal);

// Minimal k such that strict k-chains of length > m exist along both axes.
int min_k_exceeding(const Shape& shape, FamilyTag family, int m, const ChainConfig& cfg = {});

// Strict k-chain with union bounding box [-delta, 1+delta] x [(j-1)/m, j/m]
// (horizontal) or its transpose (vertical).
StrictChain strict_chain_with_bbox(const Shape& shape, FamilyTag family, int m, Axis axis, int j,
                                   const ChainConfig& cfg = {});

// Text form: a `strip u=(ux,uy) d1=<f> d2=<f> family=<tag>` header followed by one
// placed-shape line per disk.
std::string format_chain(const Chain& c);
Chain parse_chain(std::string_view text);

}  // namespace disklab
