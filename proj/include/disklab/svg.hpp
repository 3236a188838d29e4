#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "disklab/chains.hpp"
#include "disklab/constructions.hpp"
#include "disklab/realize_grid.hpp"

namespace disklab {

struct SvgItem {
    Region region;
    std::string fill = "none";
    std::string stroke = "#1f3b73";
    std::string title;  // emitted as <title>
};

struct SvgScene {
    std::optional<Box> view;  // fitted to the bounded items when empty
    std::vector<SvgItem> items;
    std::vector<std::array<Vec2, 4>> cells;  // shaded quadrilaterals
    std::vector<std::pair<Vec2, Vec2>> lines;
    std::vector<Vec2> polygon;  // outlined, e.g. a reconstruction hull
    int boundary_samples = 512;
};

SvgScene realization_scene(const InteriorRealization& r);
SvgScene realization_scene(const Realization& r);
SvgScene chain_scene(const Chain& c);
// Grid lines plus one shaded cell per marked pixel; the hull is outlined when given.
SvgScene grid_scene(const MGrid& grid, const PixelMask& mask, const std::vector<Vec2>& hull = {});

// SVG 1.1 document. Identical scenes give identical bytes.
std::string render_svg(const SvgScene& scene);

// Throws an io error when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace disklab
