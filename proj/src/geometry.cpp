#include "disklab/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <tuple>

#include "disklab/detail/search.hpp"

namespace disklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unit(Vec2 u) {
    if (!(std::abs(norm(u) - 1.0) <= 1e-9)) throw Error(ErrorKind::input, "direction must be a unit vector");
}

const PlacedShape& bounded(const Region& r, const char* op) {
    if (const auto* s = std::get_if<PlacedShape>(&r)) return *s;
    throw Error(ErrorKind::unsupported_region, std::string(op) + " requires a bounded region, got a half-plane");
}

double shape_shape_sd(const PlacedShape& a, const PlacedShape& b) {
    if (auto ca = a.as_circle()) {
        if (auto cb = b.as_circle()) return norm(ca->center - cb->center) - ca->radius - cb->radius;
    }
    auto gap = [&](double t) {
        const Vec2 u = unit_at(t);
        return -(a.support(u) + b.support(-u));
    };
    return detail::maximize_angle(gap, 256, 3).value;
}

double halfplane_shape_sd(const HalfPlane& h, const PlacedShape& s) {
    return -s.support(-h.normal) - h.offset;
}

double halfplane_halfplane_sd(const HalfPlane& a, const HalfPlane& b) {
    if (norm(a.normal + b.normal) < 1e-12) return -(a.offset + b.offset);
    return -kInf;
}

int compare_double(double a, double b) { return a < b ? -1 : (b < a ? 1 : 0); }

int compare_shape(const Shape& a, const Shape& b) {
    if (&a == &b) return 0;
    if (int c = compare_double(static_cast<int>(a.kind()), static_cast<int>(b.kind()))) return c;
    if (int c = compare_double(a.param0(), b.param0())) return c;
    if (int c = compare_double(a.param1(), b.param1())) return c;
    const Affine& fa = a.frame();
    const Affine& fb = b.frame();
    for (auto [x, y] : {std::pair{fa.lin.a, fb.lin.a}, {fa.lin.b, fb.lin.b}, {fa.lin.c, fb.lin.c},
                        {fa.lin.d, fb.lin.d}, {fa.off.x, fb.off.x}, {fa.off.y, fb.off.y}}) {
        if (int c = compare_double(x, y)) return c;
    }
    if (int c = compare_double(static_cast<double>(a.vertices().size()), static_cast<double>(b.vertices().size()))) return c;
    for (std::size_t i = 0; i < a.vertices().size(); ++i) {
        if (int c = compare_double(a.vertices()[i].x, b.vertices()[i].x)) return c;
        if (int c = compare_double(a.vertices()[i].y, b.vertices()[i].y)) return c;
    }
    return 0;
}

int compare_region(const Region& a, const Region& b) {
    if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
    if (const auto* ha = std::get_if<HalfPlane>(&a)) {
        const auto& hb = std::get<HalfPlane>(b);
        if (int c = compare_double(ha->normal.x, hb.normal.x)) return c;
        if (int c = compare_double(ha->normal.y, hb.normal.y)) return c;
        return compare_double(ha->offset, hb.offset);
    }
    const auto& sa = std::get<PlacedShape>(a);
    const auto& sb = std::get<PlacedShape>(b);
    const Placement& pa = sa.placement;
    const Placement& pb = sb.placement;
    if (int c = compare_double(pa.scale, pb.scale)) return c;
    if (int c = compare_double(pa.rotation, pb.rotation)) return c;
    if (int c = compare_double(pa.offset.x, pb.offset.x)) return c;
    if (int c = compare_double(pa.offset.y, pb.offset.y)) return c;
    if (pa.reflect != pb.reflect) return pa.reflect ? 1 : -1;
    return compare_shape(*sa.shape, *sb.shape);
}

}  // namespace

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::input: return "input";
        case ErrorKind::unsupported_region: return "unsupported-region";
        case ErrorKind::construction: return "construction";
        case ErrorKind::conversion: return "conversion";
        case ErrorKind::reconstruction: return "reconstruction";
        case ErrorKind::io: return "io";
        case ErrorKind::usage: return "usage";
    }
    return "unknown";
}

Mat2 Mat2::rotation(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c, -s, s, c};
}

Mat2 Mat2::operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Mat2 Mat2::inverse() const {
    const double k = det();
    if (k == 0.0) throw Error(ErrorKind::input, "singular matrix");
    return {d / k, -b / k, -c / k, a / k};
}

Affine Affine::inverse() const {
    const Mat2 inv = lin.inverse();
    return {inv, -(inv * off)};
}

// --- Shape ------------------------------------------------------------------

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const Vec2& p : pts) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}


Shape Shape::circle(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::input, "circle radius must be positive");
    Shape s;
    s.kind_ = ShapeKind::circle;
    s.p0_ = r;
    return s;
}

Shape Shape::ellipse(double a, double b) {
    if (!(a > 0.0 && b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw Error(ErrorKind::input, "ellipse semi-axes must be positive");
    Shape s;
    s.kind_ = ShapeKind::ellipse;
    s.p0_ = a;
    s.p1_ = b;
    return s;
}

Shape Shape::superellipse(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::input, "superellipse exponent must exceed 1");
    Shape s;
    s.kind_ = ShapeKind::superellipse;
    s.p0_ = p;
    return s;
}

Shape Shape::smoothed_polygon(std::vector<Vec2> pts, double rounding) {
    if (!(rounding > 0.0) || !std::isfinite(rounding))
        throw Error(ErrorKind::input, "smoothed polygon needs a positive rounding radius");
    if (pts.empty()) throw Error(ErrorKind::input, "smoothed polygon needs at least one point");
    for (Vec2 p : pts)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorKind::input, "non-finite polygon vertex");
    Shape s;
    s.kind_ = ShapeKind::smoothed_polygon;
    s.p0_ = rounding;
    s.pts_ = convex_hull(std::move(pts));
    return s;
}

Shape Shape::mapped(const Affine& f) const {
    if (!(std::abs(f.lin.det()) > 0.0)) throw Error(ErrorKind::input, "shape map must be invertible");
    Shape s = *this;
    s.frame_ = f.compose(frame_);
    return s;
}

double Shape::base_support(Vec2 v) const {
    switch (kind_) {
        case ShapeKind::circle: return p0_ * norm(v);
        case ShapeKind::ellipse: return std::hypot(p0_ * v.x, p1_ * v.y);
        case ShapeKind::superellipse: {
            const double q = p0_ / (p0_ - 1.0);
            const double m = std::max(std::abs(v.x), std::abs(v.y));
            if (m == 0.0) return 0.0;
            const double sx = std::abs(v.x) / m;
            const double sy = std::abs(v.y) / m;
            return m * std::pow(std::pow(sx, q) + std::pow(sy, q), 1.0 / q);
        }
        case ShapeKind::smoothed_polygon: {
            double best = -kInf;
            for (Vec2 p : pts_) best = std::max(best, dot(p, v));
            return best + p0_ * norm(v);
        }
    }
    return 0.0;
}

Vec2 Shape::base_support_point(Vec2 v) const {
    switch (kind_) {
        case ShapeKind::circle: return v * (p0_ / norm(v));
        case ShapeKind::ellipse: {
            const double h = std::hypot(p0_ * v.x, p1_ * v.y);
            return {p0_ * p0_ * v.x / h, p1_ * p1_ * v.y / h};
        }
        case ShapeKind::superellipse: {
            const double q = p0_ / (p0_ - 1.0);
            const double n = base_support(v);
            const double px = std::pow(std::abs(v.x) / n, q - 1.0);
            const double py = std::pow(std::abs(v.y) / n, q - 1.0);
            return {std::copysign(px, v.x), std::copysign(py, v.y)};
        }
        case ShapeKind::smoothed_polygon: {
            Vec2 arg = pts_.front();
            double best = dot(arg, v);
            for (Vec2 p : pts_) {
                const double d = dot(p, v);
                if (d > best) {
                    best = d;
                    arg = p;
                }
            }
            return arg + v * (p0_ / norm(v));
        }
    }
    return {};
}

double Shape::support(Vec2 v) const { return base_support(frame_.lin.transposed() * v) + dot(frame_.off, v); }

Vec2 Shape::support_point(Vec2 v) const { return frame_(base_support_point(frame_.lin.transposed() * v)); }

bool Shape::frame_is_conformal() const {
    const Mat2& m = frame_.lin;
    const double scale = std::abs(m.a) + std::abs(m.b) + std::abs(m.c) + std::abs(m.d);
    const double tol = 1e-14 * scale;
    const bool rot = std::abs(m.a - m.d) <= tol && std::abs(m.b + m.c) <= tol;
    const bool refl = std::abs(m.a + m.d) <= tol && std::abs(m.b - m.c) <= tol;
    return rot || refl;
}

bool Shape::operator==(const Shape& o) const { return compare_shape(*this, o) == 0; }

// --- Placement / family -----------------------------------------------------

Affine Placement::to_affine() const {
    Mat2 lin = Mat2::rotation(rotation) * scale;
    if (reflect) lin = lin * Mat2::diag(-1.0, 1.0);
    return {lin, offset};
}

const char* family_name(FamilyTag f) {
    switch (f) {
        case FamilyTag::hom: return "HOM";
        case FamilyTag::sim: return "SIM";
        case FamilyTag::sim_refl: return "SIM_REFL";
    }
    return "?";
}

FamilyTag parse_family(const std::string& s) {
    std::string t;
    for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "hom") return FamilyTag::hom;
    if (t == "sim") return FamilyTag::sim;
    if (t == "sim_refl" || t == "simrefl" || t == "sim-refl") return FamilyTag::sim_refl;
    throw Error(ErrorKind::input, "unknown family '" + s + "'");
}

bool family_admits(FamilyTag f, const Placement& p) {
    switch (f) {
        case FamilyTag::hom: return p.rotation == 0.0 && !p.reflect;
        case FamilyTag::sim: return !p.reflect;
        case FamilyTag::sim_refl: return true;
    }
    return false;
}

// --- Regions ----------------------------------------------------------------

double PlacedShape::support(Vec2 v) const {
    const Affine f = placement.to_affine();
    return shape->support(f.lin.transposed() * v) + dot(f.off, v);
}

Vec2 PlacedShape::support_point(Vec2 v) const {
    const Affine f = placement.to_affine();
    return f(shape->support_point(f.lin.transposed() * v));
}

std::optional<PlacedShape::Circle> PlacedShape::as_circle() const {
    const bool round = shape->kind() == ShapeKind::circle ||
                       (shape->kind() == ShapeKind::ellipse && shape->param0() == shape->param1());
    if (!round || !shape->frame_is_conformal()) return std::nullopt;
    const double r = shape->param0() * std::sqrt(std::abs(shape->frame().lin.det())) * placement.scale;
    return Circle{map({0.0, 0.0}), r};
}

HalfPlane HalfPlane::from(Vec2 n, double d) {
    const double len = norm(n);
    if (!(len > 0.0)) throw Error(ErrorKind::input, "half-plane normal must be non-zero");
    return {n / len, d / len};
}

double HalfPlane::support(Vec2 v) const {
    const double len = norm(v);
    if (std::abs(cross(v, normal)) <= 1e-12 * len && dot(v, normal) > 0.0) return offset * len;
    return kInf;
}

// --- Operations -------------------------------------------------------------

SupportValue support(const Shape& shape, const Placement& placement, Vec2 u) {
    require_unit(u);
    const PlacedShape s{std::make_shared<const Shape>(shape), placement};
    return {s.support(u), s.support_point(u)};
}

Box bounding_box(const PlacedShape& s) {
    return {-s.support({-1.0, 0.0}), s.support({1.0, 0.0}), -s.support({0.0, -1.0}), s.support({0.0, 1.0})};
}

Box bounding_box(const Region& r) { return bounding_box(bounded(r, "bounding_box")); }

NormalizedShape normalize_to_unit_bbox(const Shape& shape) {
    const Box b = bounding_box(PlacedShape{std::make_shared<const Shape>(shape), {}});
    if (!(b.width() > 0.0 && b.height() > 0.0)) throw Error(ErrorKind::input, "degenerate shape");
    const Affine f{Mat2::diag(1.0 / b.width(), 1.0 / b.height()), {-b.x1 / b.width(), -b.y1 / b.height()}};
    if (b.x1 == 0.0 && b.y1 == 0.0 && b.width() == 1.0 && b.height() == 1.0) return {shape, Affine::identity()};
    return {shape.mapped(f), f};
}

NormalizedShape normalize_to_unit_bbox_similar(const Shape& shape) {
    auto imbalance = [&](double theta) {
        const Mat2 rt = Mat2::rotation(theta).transposed();
        return width(shape, rt * Vec2{1.0, 0.0}) - width(shape, rt * Vec2{0.0, 1.0});
    };
    double theta = 0.0;
    const double d0 = imbalance(0.0);
    if (std::abs(d0) > 1e-15 * width(shape, {1.0, 0.0})) {
        // imbalance(theta + pi/2) == -imbalance(theta)
        double lo = 0.0;
        double hi = kPi / 2.0;
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((imbalance(mid) > 0.0) == (d0 > 0.0))
                lo = mid;
            else
                hi = mid;
        }
        theta = 0.5 * (lo + hi);
    }
    const Shape rotated = theta == 0.0 ? shape : shape.mapped({Mat2::rotation(theta), {}});
    const Box b = bounding_box(PlacedShape{std::make_shared<const Shape>(rotated), {}});
    const double s = 1.0 / b.width();
    if (theta == 0.0 && b.x1 == 0.0 && b.y1 == 0.0 && b.width() == 1.0 && b.height() == 1.0)
        return {shape, Affine::identity()};
    const Affine f = Affine{Mat2::diag(s, s), {-b.x1 * s, -b.y1 * s}}.compose({Mat2::rotation(theta), {}});
    return {shape.mapped(f), f};
}

double signed_distance(const Region& a0, const Region& b0) {
    const bool swap = canonical_less(b0, a0);
    const Region& a = swap ? b0 : a0;
    const Region& b = swap ? a0 : b0;
    const auto* sa = std::get_if<PlacedShape>(&a);
    const auto* sb = std::get_if<PlacedShape>(&b);
    if (sa && sb) return shape_shape_sd(*sa, *sb);
    if (sa) return halfplane_shape_sd(std::get<HalfPlane>(b), *sa);
    if (sb) return halfplane_shape_sd(std::get<HalfPlane>(a), *sb);
    return halfplane_halfplane_sd(std::get<HalfPlane>(a), std::get<HalfPlane>(b));
}

bool intersects(const Region& a, const Region& b) { return signed_distance(a, b) <= kGeoTol; }

bool interiors_intersect(const Region& a, const Region& b) { return signed_distance(a, b) < -kGeoTol; }

double distance(const Region& a, const Region& b) { return std::max(0.0, signed_distance(a, b)); }

double hausdorff(const PlacedShape& a0, const PlacedShape& b0) {
    const bool swap = canonical_less(Region{b0}, Region{a0});
    const PlacedShape& a = swap ? b0 : a0;
    const PlacedShape& b = swap ? a0 : b0;
    auto diff = [&](double t) {
        const Vec2 u = unit_at(t);
        return std::abs(a.support(u) - b.support(u));
    };
    return detail::maximize_angle(diff, 2048, 4).value;
}

double hausdorff(const Region& a, const Region& b) { return hausdorff(bounded(a, "hausdorff"), bounded(b, "hausdorff")); }

double width(const Shape& shape, Vec2 u) { return shape.support(u) + shape.support(-u); }

double diameter(const Shape& shape) {
    if (shape.frame().is_identity()) {
        if (shape.kind() == ShapeKind::circle) return 2.0 * shape.param0();
        if (shape.kind() == ShapeKind::ellipse) return 2.0 * std::max(shape.param0(), shape.param1());
    }
    auto w = [&](double t) { return width(shape, unit_at(t)); };
    return detail::scan_max(w, 0.0, kPi, 1024, 4, true).value;
}

Line tangent_at(const Shape& shape, double normal_angle) {
    const Vec2 u = unit_at(normal_angle);
    return {u, shape.support(u), shape.support_point(u)};
}

double point_signed_distance(const PlacedShape& s, Vec2 p) {
    if (auto c = s.as_circle()) return norm(p - c->center) - c->radius;
    auto f = [&](double t) {
        const Vec2 u = unit_at(t);
        return dot(p, u) - s.support(u);
    };
    return detail::maximize_angle(f, 256, 3).value;
}

double point_signed_distance(const Region& r, Vec2 p) {
    if (const auto* h = std::get_if<HalfPlane>(&r)) return dot(p, h->normal) - h->offset;
    return point_signed_distance(std::get<PlacedShape>(r), p);
}

namespace {

// {t : p + t*dir in K} for the convex body K with support function h; dir is unit.
template <class H>
Interval chord_of(H&& h, Vec2 p, Vec2 d, int samples) {
    const Vec2 n = perp(d);
    const double level = dot(p, n);
    if (h(n) < level || -h(-n) > level) return {1.0, 0.0};
    // Upper end: min over supporting normals u with <u,d> > 0 of (h(u) - <p,u>) / <u,d>.
    auto end = [&](Vec2 axis) {
        auto neg_intercept = [&](double phi) {
            const Vec2 u = Mat2::rotation(phi) * axis;
            return -(h(u) - dot(p, u)) / std::cos(phi);
        };
        const double lim = kPi / 2.0 - 1e-9;
        return -detail::scan_max(neg_intercept, -lim, lim, samples, 2, false).value;
    };
    return {-end(-d), end(d)};
}

}  // namespace

Interval line_chord(const PlacedShape& s, Vec2 p, Vec2 dir) {
    const double len = norm(dir);
    if (!(len > 0.0)) throw Error(ErrorKind::input, "chord direction must be non-zero");
    const Vec2 d = dir / len;
    if (auto c = s.as_circle()) {
        const Vec2 q = p - c->center;
        const double b = dot(q, d);
        const double disc = b * b - (dot(q, q) - c->radius * c->radius);
        if (disc < 0.0) return {1.0, 0.0};
        const double r = std::sqrt(disc);
        return {(-b - r) / len, (-b + r) / len};
    }
    const Interval i = chord_of([&](Vec2 u) { return s.support(u); }, p, d, 256);
    return {i.lo / len, i.hi / len};
}

Interval translation_range(const PlacedShape& a, const PlacedShape& b, Vec2 dir) {
    const double len = norm(dir);
    if (!(len > 0.0)) throw Error(ErrorKind::input, "translation direction must be non-zero");
    const Vec2 d = dir / len;
    if (auto ca = a.as_circle()) {
        if (auto cb = b.as_circle()) {
            const PlacedShape diff{share(Shape::circle(ca->radius + cb->radius)), {1.0, 0.0, ca->center - cb->center, false}};
            const Interval i = line_chord(diff, {0.0, 0.0}, d);
            return {i.lo / len, i.hi / len};
        }
    }
    const Interval i = chord_of([&](Vec2 u) { return a.support(u) + b.support(-u); }, {0.0, 0.0}, d, 64);
    return {i.lo / len, i.hi / len};
}

bool canonical_less(const Region& a, const Region& b) { return compare_region(a, b) < 0; }

Moments moments(const Shape& shape, int samples) {
    const PlacedShape s{std::make_shared<const Shape>(shape), {}};
    const std::vector<Vec2> pts = boundary_points(s, samples);
    double area = 0.0, cx = 0.0, cy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = pts[i];
        const Vec2 q = pts[(i + 1) % n];
        const double w = cross(p, q);
        area += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
        sxx += (p.x * p.x + p.x * q.x + q.x * q.x) * w;
        syy += (p.y * p.y + p.y * q.y + q.y * q.y) * w;
        sxy += (p.x * q.y + 2.0 * p.x * p.y + 2.0 * q.x * q.y + q.x * p.y) * w;
    }
    area *= 0.5;
    const Vec2 c{cx / (6.0 * area), cy / (6.0 * area)};
    const double ixx = sxx / 12.0 / area - c.x * c.x;
    const double iyy = syy / 12.0 / area - c.y * c.y;
    const double ixy = sxy / 24.0 / area - c.x * c.y;
    return {area, c, {ixx, ixy, ixy, iyy}};
}

std::vector<Vec2> boundary_points(const PlacedShape& s, int samples) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const Vec2 p = s.support_point(unit_at(2.0 * kPi * k / samples));
        if (pts.empty() || norm(p - pts.back()) > 0.0) pts.push_back(p);
    }
    if (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
    return pts;
}

PlacedShape apply_affine(const Affine& f, const PlacedShape& s) {
    return {share(s.shape->mapped(f.compose(s.placement.to_affine()))), Placement{}};
}

HalfPlane apply_affine(const Affine& f, const HalfPlane& h) {
    const Mat2 inv_t = f.lin.inverse().transposed();
    const Vec2 n = inv_t * h.normal;
    return HalfPlane::from(n, h.offset + dot(f.off, n));
}

}  // namespace disklab
