#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace disklab {

// Separation/penetration band that distinguishes touching from overlapping.
inline constexpr double kGeoTol = 1e-9;
inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorKind { input, unsupported_region, construction, conversion, reconstruction, io, usage };

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 unit_at(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static Mat2 identity() { return {}; }
    static Mat2 rotation(double theta);
    static Mat2 diag(double sx, double sy) { return {sx, 0.0, 0.0, sy}; }

    Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(const Mat2& o) const;
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2 transposed() const { return {a, c, b, d}; }
    double det() const { return a * d - b * c; }
    Mat2 inverse() const;
    bool operator==(const Mat2&) const = default;
};

// p -> lin * p + off
struct Affine {
    Mat2 lin;
    Vec2 off;

    static Affine identity() { return {}; }
    Vec2 operator()(Vec2 p) const { return lin * p + off; }
    // (this ∘ inner)(p) = this(inner(p))
    Affine compose(const Affine& inner) const { return {lin * inner.lin, lin * inner.off + off}; }
    Affine inverse() const;
    bool is_identity() const { return lin == Mat2{} && off == Vec2{}; }
    bool operator==(const Affine&) const = default;
};

enum class ShapeKind { circle, ellipse, superellipse, smoothed_polygon };

/// Smooth convex disk described analytically by its support function.
///
/// The base body is centered at the origin (circle radius r, ellipse with semi-axes
/// a and b, superellipse |x|^p + |y|^p <= 1, or the Minkowski sum of a convex polygon
/// with a disk of radius r). An optional affine frame is applied on top of the base
/// body; it is how normalized and affinely mapped shapes are carried around.
class Shape {
public:
    static Shape circle(double r);
    static Shape ellipse(double a, double b);
    static Shape superellipse(double p);
    static Shape smoothed_polygon(std::vector<Vec2> pts, double rounding);

    ShapeKind kind() const { return kind_; }
    // circle: r; ellipse: a; superellipse: p; smoothed polygon: rounding radius
    double param0() const { return p0_; }
    // ellipse: b; otherwise 0
    double param1() const { return p1_; }
    // convex hull in counter-clockwise order (smoothed polygons only)
    const std::vector<Vec2>& vertices() const { return pts_; }
    const Affine& frame() const { return frame_; }

    // Returns f(shape). The base parameters are untouched; only the frame changes.
    Shape mapped(const Affine& f) const;

    // Support value / point for any non-zero direction (positively homogeneous).
    double support(Vec2 v) const;
    Vec2 support_point(Vec2 v) const;

    // Frame is a rotation/reflection times a uniform scale.
    bool frame_is_conformal() const;

    bool operator==(const Shape& o) const;

private:
    double base_support(Vec2 v) const;
    Vec2 base_support_point(Vec2 v) const;

    ShapeKind kind_ = ShapeKind::circle;
    double p0_ = 1.0;
    double p1_ = 0.0;
    std::vector<Vec2> pts_;
    Affine frame_;
};

/// Similarity p -> offset + scale * R(rotation) * M * p where M mirrors x when reflect is set.
struct Placement {
    double scale = 1.0;
    double rotation = 0.0;
    Vec2 offset;
    bool reflect = false;

    Affine to_affine() const;
    bool operator==(const Placement&) const = default;
};

enum class FamilyTag { hom, sim, sim_refl };

const char* family_name(FamilyTag f);
FamilyTag parse_family(const std::string& s);
bool family_admits(FamilyTag f, const Placement& p);

using ShapePtr = std::shared_ptr<const Shape>;

inline ShapePtr share(Shape s) { return std::make_shared<const Shape>(std::move(s)); }

struct PlacedShape {
    ShapePtr shape;
    Placement placement;

    double support(Vec2 v) const;
    Vec2 support_point(Vec2 v) const;
    Vec2 map(Vec2 p) const { return placement.to_affine()(shape->frame()(p)); }

    struct Circle {
        Vec2 center;
        double radius;
    };
    // Present when the placed set is exactly a round disk.
    std::optional<Circle> as_circle() const;
};

/// {p : <p, normal> <= offset}
struct HalfPlane {
    Vec2 normal{0.0, 1.0};
    double offset = 0.0;

    static HalfPlane from(Vec2 n, double d);
    double support(Vec2 v) const;  // +inf unless v is a non-negative multiple of normal
    bool operator==(const HalfPlane&) const = default;
};

using Region = std::variant<PlacedShape, HalfPlane>;

struct Box {
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
};

struct SupportValue {
    double value;
    Vec2 point;
};

struct Line {
    Vec2 normal;    // unit, pointing away from the shape
    double offset;  // line is {p : <p, normal> = offset}
    Vec2 point;     // point of tangency
};

struct NormalizedShape {
    Shape shape;
    Affine map;  // map(original) == shape
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return hi < lo; }
    double length() const { return empty() ? 0.0 : hi - lo; }
};

// Support value and point of the placed shape; u must be unit length.
SupportValue support(const Shape& shape, const Placement& placement, Vec2 u);

Box bounding_box(const PlacedShape& s);
Box bounding_box(const Region& r);

// Anisotropic axis-aligned scaling plus translation onto bounding box [0,1]^2.
NormalizedShape normalize_to_unit_bbox(const Shape& shape);
// Rotation, uniform scaling and translation onto bounding box [0,1]^2; the rotation
// is chosen where width equals height.
NormalizedShape normalize_to_unit_bbox_similar(const Shape& shape);

// Positive: gap between the sets. Negative: minus the penetration depth.
double signed_distance(const Region& a, const Region& b);
bool intersects(const Region& a, const Region& b);
bool interiors_intersect(const Region& a, const Region& b);
double distance(const Region& a, const Region& b);

double hausdorff(const PlacedShape& a, const PlacedShape& b);
double hausdorff(const Region& a, const Region& b);

double diameter(const Shape& shape);
Line tangent_at(const Shape& shape, double normal_angle);

// Width of the shape in direction u: h(u) + h(-u).
double width(const Shape& shape, Vec2 u);

// Positive outside (Euclidean distance), negative inside (minus depth).
double point_signed_distance(const PlacedShape& s, Vec2 p);
double point_signed_distance(const Region& r, Vec2 p);

// Parameter interval {t : p + t*dir in region}; empty when the line misses it.
Interval line_chord(const PlacedShape& s, Vec2 p, Vec2 dir);

// {t : a and b + t*dir intersect}.
Interval translation_range(const PlacedShape& a, const PlacedShape& b, Vec2 dir);

// Total order used to canonicalize argument order of symmetric predicates.
bool canonical_less(const Region& a, const Region& b);

// Counter-clockwise hull without collinear points.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

// Centroid and second central moments of the placed shape (area-weighted).
struct Moments {
    double area;
    Vec2 centroid;
    Mat2 covariance;
};
Moments moments(const Shape& shape, int samples = 4096);

// Boundary sample, counter-clockwise, via support points at uniform normal angles.
std::vector<Vec2> boundary_points(const PlacedShape& s, int samples = 512);

// Applies an affine map to a placed shape; the result has the identity placement.
PlacedShape apply_affine(const Affine& f, const PlacedShape& s);
HalfPlane apply_affine(const Affine& f, const HalfPlane& h);

}  // namespace disklab
