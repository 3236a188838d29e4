#pragma once

// Text grammar for shapes, placements and regions.
//
//   circle r=<f>
//   ellipse a=<f> b=<f>
//   superellipse p=<f>
//   smoothpoly r=<f> pts=(x1,y1;x2,y2;...)
//
// Any shape may carry `frame=(a,b,c,d,tx,ty)` (affine frame, omitted when identity)
// and be followed by `@ scale=<f> rot=<f> dx=<f> dy=<f> [reflect]`.
// Half-planes print as `halfplane n=(nx,ny) d=<f>`.
// Floats are written with 17 significant digits so that print/parse is lossless.

#include <string>
#include <string_view>

#include "disklab/geometry.hpp"

namespace disklab {

struct ShapeSpec {
    Shape shape;
    Placement placement;
};

std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

std::string format_vec(Vec2 v);  // (x,y)
Vec2 parse_vec(std::string_view s);

std::string format_shape(const Shape& s);
std::string format_placement(const Placement& p);
std::string format_shape_spec(const ShapeSpec& s);
std::string format_region(const Region& r);

// Accepts a shape with an optional placement; missing placement is the identity.
ShapeSpec parse_shape_spec(std::string_view text);
Shape parse_shape(std::string_view text);
// Accepts a shape spec or a half-plane record.
Region parse_region(std::string_view text);

}  // namespace disklab
