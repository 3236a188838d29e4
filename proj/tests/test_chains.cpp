#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "disklab/chains.hpp"
#include "disklab/shape_io.hpp"

using namespace disklab;

namespace {

Chain circle_chain(std::vector<double> xs, double radius = 0.5) {
    Chain c;
    c.shape = share(Shape::circle(radius));
    c.family = FamilyTag::hom;
    for (double x : xs) c.placements.push_back({1.0, 0.0, {x, 0.5}, false});
    return c;
}

template <class F>
double scan_max(F f, double lo, double hi, int samples) {
    double best = -INFINITY, arg = lo;
    const double step = (hi - lo) / samples;
    for (int i = 0; i <= samples; ++i) {
        const double v = f(lo + i * step);
        if (v > best) best = v, arg = lo + i * step;
    }
    double a = arg - step, b = arg + step;
    for (int i = 0; i < 200; ++i) {
        const double c = b - 0.618 * (b - a), d = a + 0.618 * (b - a);
        if (f(c) > f(d)) b = d; else a = c;
    }
    return std::max(best, f(0.5 * (a + b)));
}

// Independent layout: unit-height disks touching y=0 and y=1, each pushed right by
// bisection on the signed distance to its predecessor.
double layout_length(const Shape& shape, const std::vector<double>& angles) {
    const ShapePtr sp = share(shape);
    std::vector<PlacedShape> disks;
    double lo = INFINITY, hi = -INFINITY;
    for (double th : angles) {
        PlacedShape d{sp, {1.0, th, {}, false}};
        const double h = d.support({0, 1}) + d.support({0, -1});
        d.placement.scale = 1.0 / h;
        d.placement.offset.y = d.support({0, -1});
        if (!disks.empty()) {
            const PlacedShape& prev = disks.back();
            double a = prev.placement.offset.x, b = a + 10.0;
            for (int i = 0; i < 50; ++i) {
                const double mid = 0.5 * (a + b);
                PlacedShape q = d;
                q.placement.offset.x = mid;
                (signed_distance(Region{prev}, Region{q}) <= 0.0 ? a : b) = mid;
            }
            d.placement.offset.x = a;
        }
        lo = std::min(lo, -d.support({-1, 0}));
        hi = std::max(hi, d.support({1, 0}));
        disks.push_back(d);
    }
    return hi - lo;
}

// Longest horizontal chord of a smoothed polygon: largest t with the polygon within
// 2r of its own translate, found by bisection on a segment-distance computation.
double seg_point_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double t = std::clamp(dot(p - a, d) / dot(d, d), 0.0, 1.0);
    return norm(p - (a + d * t));
}

double polygon_distance(const std::vector<Vec2>& P, const std::vector<Vec2>& Q) {
    // the polygons are disjoint convex sets in the uses below
    double best = INFINITY;
    for (std::size_t i = 0; i < P.size(); ++i)
        for (std::size_t j = 0; j < Q.size(); ++j) {
            best = std::min(best, seg_point_distance(P[i], Q[j], Q[(j + 1) % Q.size()]));
            best = std::min(best, seg_point_distance(Q[j], P[i], P[(i + 1) % P.size()]));
        }
    return best;
}

double smoothed_polygon_chord(const std::vector<Vec2>& pts, double r) {
    double a = 0.0, b = 100.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (a + b);
        std::vector<Vec2> moved = pts;
        for (Vec2& p : moved) p.x += mid;
        double minx = INFINITY, maxx = -INFINITY;
        for (Vec2 p : pts) minx = std::min(minx, p.x), maxx = std::max(maxx, p.x);
        const bool overlap_x = mid <= maxx - minx;
        const bool touch = overlap_x || polygon_distance(pts, moved) <= 2 * r;
        (touch ? a : b) = mid;
    }
    return a;
}

ChainConfig quick_cfg() {
    ChainConfig cfg;
    cfg.starts = 8;
    return cfg;
}

}  // namespace

TEST_CASE("chain_check examples") {
    auto r = chain_check(circle_chain({0.5, 1.5, 2.5}));
    CHECK(r.valid);
    CHECK_FALSE(r.strict);
    CHECK(r.length == doctest::Approx(3.0).epsilon(1e-12));

    r = chain_check(circle_chain({0.5, 1.4, 2.3}));
    CHECK(r.valid);
    CHECK(r.strict);
    CHECK(r.length == doctest::Approx(2.8).epsilon(1e-12));

    r = chain_check(circle_chain({0.5}, 0.4));
    CHECK_FALSE(r.valid);
    CHECK_FALSE(r.violations.empty());

    r = chain_check(circle_chain({0.5, 1.6}));
    CHECK_FALSE(r.valid);

    Chain empty = circle_chain({});
    CHECK_THROWS_AS(chain_check(empty), Error);

    Chain rotated = circle_chain({0.5, 1.5});
    rotated.placements[1].rotation = 0.3;
    CHECK_FALSE(chain_check(rotated).valid);  // HOM forbids rotation
    rotated.family = FamilyTag::sim;
    CHECK(chain_check(rotated).valid);
}

TEST_CASE("max_chain: circles") {
    const Chain c = max_chain(Shape::circle(1.0), FamilyTag::sim, 5, quick_cfg());
    const auto r = chain_check(c);
    CHECK(r.valid);
    CHECK(std::abs(r.length - 5.0) < 1e-6);
    CHECK_THROWS_AS(max_chain(Shape::circle(1.0), FamilyTag::sim, 0), Error);
}

TEST_CASE("max_chain: HOM ellipse is exact") {
    const Chain c = max_chain(Shape::ellipse(1, 0.5), FamilyTag::hom, 4);
    const auto r = chain_check(c);
    CHECK(r.valid);
    CHECK(std::abs(r.length - 8.0) < 1e-9);
    for (const Placement& p : c.placements) CHECK(p.rotation == 0.0);
}

TEST_CASE("max_chain: SIM ellipse single disk matches ratio scan") {
    const double a = 1.0, b = 0.5;
    const double oracle = scan_max(
        [&](double t) {
            const double c = std::cos(t), s = std::sin(t);
            return std::sqrt(a * a * c * c + b * b * s * s) / std::sqrt(a * a * s * s + b * b * c * c);
        },
        0.0, kPi, 10000);
    CHECK(oracle == doctest::Approx(2.0).epsilon(1e-12));
    const Chain c = max_chain(Shape::ellipse(a, b), FamilyTag::sim, 1, quick_cfg());
    CHECK(std::abs(chain_check(c).length - oracle) < 1e-8);
    CHECK(single_disk_upper_bound(Shape::ellipse(a, b), FamilyTag::sim) >= oracle);
    CHECK(single_disk_upper_bound(Shape::ellipse(a, b), FamilyTag::sim) < oracle + 1e-3);
    CHECK(single_disk_upper_bound(Shape::circle(1), FamilyTag::sim) == doctest::Approx(1.0));
}

TEST_CASE("max_chain is deterministic") {
    ChainConfig cfg = quick_cfg();
    cfg.seed = 17;
    const Chain a = max_chain(Shape::superellipse(3), FamilyTag::sim, 3, cfg);
    const Chain b = max_chain(Shape::superellipse(3), FamilyTag::sim, 3, cfg);
    CHECK(format_chain(a) == format_chain(b));
}

TEST_CASE("concatenate") {
    const Chain five = max_chain(Shape::circle(1.0), FamilyTag::sim, 5, quick_cfg());
    const Chain ten = concatenate(five, five);
    CHECK(ten.size() == 10);
    auto r = chain_check(ten);
    CHECK(r.valid);
    CHECK(std::abs(r.length - 10.0) < 1e-6);

    const Chain one = max_chain(Shape::circle(1.0), FamilyTag::sim, 1, quick_cfg());
    r = chain_check(concatenate(one, one));
    CHECK(r.valid);
    CHECK(r.length == doctest::Approx(2.0));

    const Chain e3 = max_chain(Shape::ellipse(1, 0.5), FamilyTag::sim, 3, quick_cfg());
    const Chain e6 = concatenate(e3, e3);
    r = chain_check(e6);
    CHECK(r.valid);
    CHECK(r.length >= chain_check(e3).length);
    const Chain best6 = max_chain(Shape::ellipse(1, 0.5), FamilyTag::sim, 6, quick_cfg(), {e6});
    CHECK(chain_check(best6).length >= r.length - 1e-12);

    // chains in different strips are moved together
    const Chain moved = move_chain(e3, 0.7, {2.0, -1.0});
    r = chain_check(concatenate(moved, e3));
    CHECK(r.valid);

    CHECK_THROWS_AS(concatenate(five, e3), Error);
    const Chain hom = max_chain(Shape::circle(1.0), FamilyTag::hom, 2);
    CHECK_THROWS_AS(concatenate(five, hom), Error);
}

TEST_CASE("stretch_bounds: circle and HOM ellipse") {
    const auto est = stretch_bounds(Shape::circle(1.0), FamilyTag::sim, 8, quick_cfg());
    REQUIRE(est.sigma.size() == 8);
    for (int n = 1; n <= 8; ++n) {
        CHECK(std::abs(est.sigma[static_cast<std::size_t>(n - 1)] - n) < 1e-6);
        CHECK(est.certified_lower >= (n - 1.0) / n - 1e-6);
    }
    CHECK(std::abs(est.heuristic - 1.0) < 1e-6);

    const auto hom = stretch_bounds(Shape::ellipse(1, 0.5), FamilyTag::hom, 8);
    for (int n = 1; n <= 8; ++n) CHECK(std::abs(hom.sigma[static_cast<std::size_t>(n - 1)] - 2.0 * n) < 1e-9);
    CHECK(hom.sigma1_upper == doctest::Approx(2.0));
    CHECK(hom.certified_lower <= hom.heuristic + 1e-4);
}

TEST_CASE("stretch_bounds: superellipse SIM against a coarse angle grid") {
    const Shape se = Shape::superellipse(3);
    const auto est = stretch_bounds(se, FamilyTag::sim, 6);
    for (std::size_t n = 1; n < est.sigma.size(); ++n) CHECK(est.sigma[n] >= est.sigma[n - 1] - 1e-12);
    for (std::size_t n = 0; n < est.sigma.size(); ++n) CHECK(est.sigma[n] <= est.sigma1_upper * static_cast<double>(n + 1) + 1e-9);
    CHECK(est.certified_lower <= est.heuristic + 1e-4);
    // 11 angles per disk over a quarter turn (the shape has 4-fold symmetry)
    for (int n = 1; n <= 3; ++n) {
        std::vector<double> angles(static_cast<std::size_t>(n));
        double floor = 0.0;
        int total = 1;
        for (int i = 0; i < n; ++i) total *= 11;
        for (int code = 0; code < total; ++code) {
            int c = code;
            for (int i = 0; i < n; ++i, c /= 11) angles[static_cast<std::size_t>(i)] = (c % 11) * (kPi / 2) / 11;
            floor = std::max(floor, layout_length(se, angles));
        }
        CHECK(est.sigma[static_cast<std::size_t>(n - 1)] >= floor - 1e-6);
    }
}

TEST_CASE("HOM chain length has the closed form") {
    // centrally symmetric shapes: the longest chord is the width
    for (const Shape& s : {Shape::circle(0.3), Shape::ellipse(2, 1), Shape::ellipse(1, 3), Shape::superellipse(3),
                           Shape::superellipse(4)}) {
        const Box b = bounding_box(PlacedShape{share(s), {}});
        for (int n = 1; n <= 6; ++n) {
            const double expected = n * b.width() / b.height();
            CHECK(std::abs(chain_check(max_chain(s, FamilyTag::hom, n)).length - expected) < 1e-9);
            CHECK(std::abs(hom_chain_length(s, n) - expected) < 1e-9);
        }
    }
    // asymmetric shape: one full width plus n-1 longest chords
    const std::vector<Vec2> pts{{0, 0}, {1, 0}, {0.3, 0.6}};
    const Shape tri = Shape::smoothed_polygon(pts, 0.1);
    const double chord = smoothed_polygon_chord(pts, 0.1);
    const Box b = bounding_box(PlacedShape{share(tri), {}});
    for (int n = 1; n <= 6; ++n) {
        const double expected = ((n - 1) * chord + b.width()) / b.height();
        CHECK(std::abs(chain_check(max_chain(tri, FamilyTag::hom, n)).length - expected) < 1e-9);
    }
}

TEST_CASE("chain length is invariant under rigid motions of the strip") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi), z(-5.0, 5.0);
    const Chain base = max_chain(Shape::ellipse(1, 0.5), FamilyTag::sim, 4, quick_cfg());
    const double len = chain_check(base).length;
    const Chain tri = max_chain(Shape::smoothed_polygon({{0, 0}, {1, 0}, {0.3, 0.6}}, 0.1), FamilyTag::sim, 3, quick_cfg());
    const double tri_len = chain_check(tri).length;
    for (int i = 0; i < 1000; ++i) {
        const double a = ang(rng);
        const Vec2 t{z(rng), z(rng)};
        const auto r = chain_check(move_chain(base, a, t));
        CHECK(r.valid);
        CHECK(std::abs(r.length - len) < 1e-9);
        CHECK(std::abs(chain_check(move_chain(tri, a, t)).length - tri_len) < 1e-9);
    }
}

TEST_CASE("min_k_exceeding") {
    const Shape unit_circle = normalize_to_unit_bbox(Shape::circle(1)).shape;
    CHECK(min_k_exceeding(unit_circle, FamilyTag::hom, 5) == 6);
    for (const Shape& s : {Shape::circle(1), Shape::ellipse(1, 0.5), Shape::superellipse(3)}) {
        const Shape unit = normalize_to_unit_bbox(s).shape;
        for (int m = 1; m <= 6; ++m) CHECK(min_k_exceeding(unit, FamilyTag::hom, m) == m + 1);
    }
    CHECK_THROWS_AS(min_k_exceeding(unit_circle, FamilyTag::hom, 0), Error);

    // un-normalized ellipse with similarities: first k whose table entry beats 4
    const Shape e = Shape::ellipse(1, 0.5);
    const ChainConfig cfg = quick_cfg();
    const int k = min_k_exceeding(e, FamilyTag::sim, 4, cfg);
    const auto est = stretch_bounds(e, FamilyTag::sim, k, cfg);
    for (std::size_t i = 1; i < est.sigma.size(); ++i) CHECK(est.sigma[i] >= est.sigma[i - 1] - 1e-12);
    CHECK(est.sigma.back() > 4.0);
    if (k > 1) CHECK(est.sigma[static_cast<std::size_t>(k - 2)] <= 4.0 + 1e-3);
}

TEST_CASE("strict chains with a prescribed bounding box") {
    const Shape unit_circle = normalize_to_unit_bbox(Shape::circle(1)).shape;
    for (int m : {2, 3, 5}) {
        for (Axis axis : {Axis::horizontal, Axis::vertical}) {
            for (int j = 1; j <= m; ++j) {
                const StrictChain sc = strict_chain_with_bbox(unit_circle, FamilyTag::hom, m, axis, j);
                CHECK(sc.k == m + 1);
                CHECK(sc.delta == doctest::Approx(1e-4 / m));
                const auto r = chain_check(sc.chain);
                CHECK(r.strict);
                double x1 = INFINITY, x2 = -INFINITY, y1 = INFINITY, y2 = -INFINITY;
                for (std::size_t i = 0; i < sc.chain.size(); ++i) {
                    const Box b = bounding_box(sc.chain.disk(i));
                    x1 = std::min(x1, b.x1), x2 = std::max(x2, b.x2), y1 = std::min(y1, b.y1), y2 = std::max(y2, b.y2);
                    CHECK(sc.chain.placements[i].scale == doctest::Approx(1.0 / m));
                }
                const double a1 = axis == Axis::horizontal ? x1 : y1, a2 = axis == Axis::horizontal ? x2 : y2;
                const double b1 = axis == Axis::horizontal ? y1 : x1, b2 = axis == Axis::horizontal ? y2 : x2;
                CHECK(std::abs(a1 + sc.delta) < 1e-12);
                CHECK(std::abs(a2 - 1 - sc.delta) < 1e-12);
                CHECK(std::abs(b1 - (j - 1.0) / m) < 1e-12);
                CHECK(std::abs(b2 - static_cast<double>(j) / m) < 1e-12);
            }
        }
    }
    CHECK(strict_chain_with_bbox(normalize_to_unit_bbox(Shape::ellipse(1, 0.5)).shape, FamilyTag::hom, 2, Axis::horizontal, 1).k == 3);
}

TEST_CASE("strict SIM chains from the optimizer") {
    // a squat ellipse in the unit box only by similarity: rotated copies stretch further
    const Shape e = normalize_to_unit_bbox_similar(Shape::ellipse(1, 0.5)).shape;
    const ChainConfig cfg = quick_cfg();
    for (Axis axis : {Axis::horizontal, Axis::vertical}) {
        const StrictChain sc = strict_chain_with_bbox(e, FamilyTag::sim, 3, axis, 2, cfg);
        const auto r = chain_check(sc.chain);
        CHECK(r.strict);
        double lo = INFINITY, hi = -INFINITY;
        const Vec2 u = axis == Axis::horizontal ? Vec2{1, 0} : Vec2{0, 1};
        for (std::size_t i = 0; i < sc.chain.size(); ++i) {
            lo = std::min(lo, -sc.chain.disk(i).support(-u));
            hi = std::max(hi, sc.chain.disk(i).support(u));
        }
        CHECK(std::abs(lo + sc.delta) < 1e-9);
        CHECK(std::abs(hi - 1 - sc.delta) < 1e-9);
    }
}

TEST_CASE("chain text round trip") {
    const Chain c = max_chain(Shape::superellipse(3), FamilyTag::sim, 3, quick_cfg());
    const std::string text = format_chain(c);
    const Chain back = parse_chain(text);
    CHECK(format_chain(back) == text);
    CHECK(back.strip == c.strip);
    CHECK(back.family == c.family);
    CHECK_THROWS_AS(parse_chain("circle r=1\n"), Error);
    CHECK_THROWS_AS(parse_chain("strip u=(1,0) d1=0 d2=1\n"), Error);
    CHECK_THROWS_AS(parse_chain("strip u=(1,0) d1=0 d2=1\ncircle r=1\nellipse a=1 b=2\n"), Error);
}

TEST_CASE("optimizer outputs are subadditive and monotone") {
    for (const Shape& s : {Shape::circle(1), Shape::ellipse(1, 0.5)}) {
        const auto est = stretch_bounds(s, FamilyTag::sim, 8);
        for (int a = 1; a <= 7; ++a)
            for (int b = 1; a + b <= 8; ++b)
                CHECK(est.sigma[static_cast<std::size_t>(a - 1)] + est.sigma[static_cast<std::size_t>(b - 1)] >=
                      est.sigma[static_cast<std::size_t>(a + b - 1)] - 1e-4);
        for (std::size_t n = 1; n < est.sigma.size(); ++n) CHECK(est.sigma[n] >= est.sigma[n - 1]);
        for (const Chain& c : est.chains) CHECK(chain_check(c).valid);
    }
}
