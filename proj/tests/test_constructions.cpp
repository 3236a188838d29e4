#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "disklab/constructions.hpp"
#include "disklab/shape_io.hpp"

using namespace disklab;

namespace {

ChainConfig quick_cfg() {
    ChainConfig cfg;
    cfg.starts = 8;
    return cfg;
}

// Edge set of L_n written out from the rules, by name.
std::set<std::pair<std::string, std::string>> ln_rules(int n) {
    std::vector<std::string> all{"u1", "u2", "uhat1", "uhat2"};
    for (int j = 1; j <= n; ++j) all.push_back("v(" + std::to_string(j) + ")");
    std::set<std::pair<std::string, std::string>> e;
    auto add = [&](std::string a, std::string b) {
        if (a > b) std::swap(a, b);
        e.insert({a, b});
    };
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) {
                const std::string w = "w(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ")";
                all.push_back(w);
                add("u" + std::to_string(i), w);
                add(w, "v(" + std::to_string(j) + ")");
            }
    for (const auto& x : all) {
        if (x != "uhat1" && x != "u2") add("uhat1", x);
        if (x != "uhat2" && x != "u1") add("uhat2", x);
    }
    return e;
}

std::set<std::pair<std::string, std::string>> named_edges(const Graph& g) {
    std::set<std::pair<std::string, std::string>> e;
    for (const Edge& x : g.edges) {
        std::string a = format_vertex(g.vertices[x.first]), b = format_vertex(g.vertices[x.second]);
        if (a > b) std::swap(a, b);
        e.insert({a, b});
    }
    return e;
}

bool same_graph(const Graph& a, const Graph& b) { return a.vertices == b.vertices && a.edges == b.edges; }

long index_of(const Graph& g, const std::string& name) { return g.find(parse_vertex(name)); }

}  // namespace

TEST_CASE("vertex names round trip") {
    for (const char* s : {"v(3,1)", "u(1,4)", "ubar(0,2)", "z(2,3)", "zbar(1,5)", "w", "x(17,0)", "xbar(2,9)", "u1", "uhat2",
                          "v(4)", "w(2,3,1)"})
        CHECK(format_vertex(parse_vertex(s)) == s);
    for (const char* s : {"", "q(1,2)", "v(1,", "u3", "w(1,2)", "x(a,1)"}) CHECK_THROWS_AS(parse_vertex(s), Error);
}

TEST_CASE("K_{2,n} and L_n") {
    const Graph k = build_K2n(3);
    CHECK(k.vertices.size() == 5);
    CHECK(k.edges.size() == 6);

    CHECK(build_Ln(1).vertices.size() == 7);
    CHECK(build_Ln(5).vertices.size() == 59);
    for (int n : {1, 2, 3}) CHECK(named_edges(build_Ln(n)) == ln_rules(n));
    // uhat1 sees everything but u2, uhat2 everything but u1
    const Graph l = build_Ln(2);
    const long h1 = index_of(l, "uhat1"), h2 = index_of(l, "uhat2");
    CHECK(!l.has_edge(h1, index_of(l, "u2")));
    CHECK(!l.has_edge(h2, index_of(l, "u1")));
    CHECK(l.has_edge(h1, h2));
    CHECK_THROWS_AS(build_Ln(0), Error);
}

TEST_CASE("glue width for the circle") {
    const Shape disk = normalize_to_unit_bbox(Shape::circle(1.0)).shape;
    for (int n = 1; n <= 10; ++n) {
        const double expect = 2.0 / ((n + 1) * (n + 1) + 1);
        CHECK(glue_epsilon(disk, n) == doctest::Approx(expect).epsilon(1e-6));
    }
    CHECK_THROWS_AS(glue_epsilon(Shape::circle(1.0), 2), Error);
}

TEST_CASE("construction for the circle, m = n = 2") {
    const ConstructionOutput out = build_Gmn(Shape::circle(1.0), FamilyTag::hom, 2, 2, quick_cfg());
    CHECK(out.graph.vertices.size() == 95);
    CHECK(out.k == 3);

    const long u11 = index_of(out.graph, "u(1,1)");
    REQUIRE(u11 >= 0);
    const auto& h = std::get<HalfPlane>(out.realization.regions[static_cast<std::size_t>(u11)]);
    CHECK(h.normal.x == 0.0);
    CHECK(h.normal.y == 1.0);
    CHECK(h.offset == 0.0);

    CHECK(same_graph(out.graph, extract_graph_bruteforce(out.realization)));

    const PropertyReport rep = check_properties(out);
    for (const auto& f : rep.failures) MESSAGE(f);
    CHECK(rep.all());
}

TEST_CASE("construction for an ellipse under similarities") {
    const ConstructionOutput out = build_Gmn(Shape::ellipse(1.0, 0.6), FamilyTag::sim, 2, 3, quick_cfg());
    CHECK(same_graph(out.graph, extract_graph_bruteforce(out.realization)));
    const PropertyReport rep = check_properties(out);
    for (const auto& f : rep.failures) MESSAGE(f);
    CHECK(rep.all());
}

TEST_CASE("removing the glue breaks the L_n property") {
    ConstructionOutput out = build_Gmn(Shape::circle(1.0), FamilyTag::hom, 2, 2, quick_cfg());
    InteriorRealization r;
    for (std::size_t i = 0; i < out.realization.vertices.size(); ++i) {
        const Role role = out.realization.vertices[i].role;
        if (role == Role::x || role == Role::xbar) continue;
        r.vertices.push_back(out.realization.vertices[i]);
        r.regions.push_back(out.realization.regions[i]);
    }
    out.realization = r;
    out.graph = extract_graph(r);
    const PropertyReport rep = check_properties(out);
    CHECK(!rep.pass[0]);
    CHECK(rep.pass[1]);
    CHECK(rep.pass[2]);
    CHECK(!rep.pass[3]);
    CHECK(rep.pass[4]);
}

TEST_CASE("w meets the middle cells") {
    const ConstructionOutput out = build_Gmn(Shape::circle(1.0), FamilyTag::hom, 4, 4, quick_cfg());
    const long w = index_of(out.graph, "w");
    for (const char* v : {"v(2,2)", "v(2,3)", "v(3,2)", "v(3,3)"}) CHECK(out.graph.has_edge(static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(index_of(out.graph, v))));
    CHECK(check_properties(out).all());
}

TEST_CASE("cells against a shape") {
    const PlacedShape disk{share(normalize_to_unit_bbox(Shape::circle(1.0)).shape), {}};
    CHECK(cell_inside(disk, 4, 2, 2));
    CHECK(!cell_inside(disk, 4, 1, 1));
    CHECK(cell_meets(disk, 4, 1, 1));
    // corner cell of a fine grid lies outside the disk
    CHECK(!cell_meets(disk, 10, 1, 1));
    CHECK(cell_meets(disk, 10, 1, 5));
}

TEST_CASE("extraction matches brute force on random scenes") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(0.0, 3.0), rad(0.01, 0.6), ang(0.0, 2 * kPi);
    const ShapePtr shapes[] = {share(Shape::circle(1.0)), share(Shape::ellipse(1.0, 0.3)), share(Shape::superellipse(4.0))};
    for (int trial = 0; trial < 20; ++trial) {
        InteriorRealization r;
        for (int i = 0; i < 60; ++i) {
            r.vertices.push_back({Role::x, i, trial});
            if (i % 15 == 14) {
                const Vec2 n = unit_at(ang(rng));
                r.regions.push_back(HalfPlane{n, pos(rng) - 1.5});
            } else {
                r.regions.push_back(PlacedShape{shapes[i % 3], {rad(rng), ang(rng), {pos(rng), pos(rng)}, false}});
            }
        }
        CHECK(same_graph(extract_graph(r), extract_graph_bruteforce(r)));
    }
}

TEST_CASE("touching is not an edge") {
    const ShapePtr c = share(Shape::circle(0.5));
    InteriorRealization r;
    r.vertices = {{Role::x, 0, 0}, {Role::x, 1, 0}, {Role::x, 2, 0}, {Role::u, 1, 1}};
    r.regions = {PlacedShape{c, {1.0, 0.0, {0.0, 0.0}, false}}, PlacedShape{c, {1.0, 0.0, {1.0, 0.0}, false}},
                 PlacedShape{c, {1.0, 0.0, {1.9, 0.0}, false}}, HalfPlane{{0.0, 1.0}, -0.5}};
    const Graph g = extract_graph(r);
    CHECK(g.edges == std::vector<Edge>{{1, 2}});
}

TEST_CASE("construction text round trip and determinism") {
    const ConstructionOutput a = build_Gmn(Shape::circle(1.0), FamilyTag::hom, 2, 2, quick_cfg());
    const ConstructionOutput b = build_Gmn(Shape::circle(1.0), FamilyTag::hom, 2, 2, quick_cfg());
    const std::string text = format_construction(a);
    CHECK(text == format_construction(b));
    const ConstructionOutput back = parse_construction(text);
    CHECK(back.m == 2);
    CHECK(back.k == a.k);
    CHECK(back.eps == a.eps);
    CHECK(same_graph(back.graph, a.graph));
    CHECK(format_construction(back) == text);

    const Graph g = parse_graph(format_graph(a.graph));
    CHECK(same_graph(g, a.graph));
    CHECK_THROWS_AS(parse_graph("vertex w\nedge w w\n"), Error);
    CHECK_THROWS_AS(parse_graph("vertex w\nedge w v(1,1)\n"), Error);
}

TEST_CASE("construction preconditions") {
    CHECK_THROWS_AS(build_Gmn(Shape::circle(1.0), FamilyTag::hom, 3, 2), Error);
    CHECK_THROWS_AS(build_Gmn(Shape::circle(1.0), FamilyTag::hom, 0, 2), Error);
    try {
        build_Gmn(Shape::circle(1.0), FamilyTag::hom, 2, 400, quick_cfg());
        FAIL("expected a size guard");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::construction);
    }
}

TEST_CASE("vertex count grows as expected") {
    const ConstructionOutput out = build_Gmn(Shape::circle(1.0), FamilyTag::hom, 3, 5, quick_cfg());
    const int m = 3, n = 5;
    const long glue = static_cast<long>(std::ceil(n / out.eps));
    const std::size_t expect = static_cast<std::size_t>(2 * n * m - m * m + 4 * (m + 1) + 2 * out.k * m + 1) +
                               static_cast<std::size_t>(2 * (m + 1) * glue);
    CHECK(out.graph.vertices.size() == expect);
    CHECK(out.eps < 2.0 / (36 + 1));
}
