#include "disklab/constructions.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <sstream>

#include "disklab/detail/broad_phase.hpp"
#include "disklab/detail/search.hpp"
#include "disklab/shape_io.hpp"

namespace disklab {

// --- Vertex names -------------------------------------------------------------

std::string format_vertex(const VertexId& v) {
    auto two = [&](const char* name) { return std::string(name) + "(" + std::to_string(v.a) + "," + std::to_string(v.b) + ")"; };
    switch (v.role) {
        case Role::v: return two("v");
        case Role::u: return two("u");
        case Role::ubar: return two("ubar");
        case Role::z: return two("z");
        case Role::zbar: return two("zbar");
        case Role::w: return "w";
        case Role::x: return two("x");
        case Role::xbar: return two("xbar");
        case Role::gu: return "u" + std::to_string(v.a);
        case Role::guhat: return "uhat" + std::to_string(v.a);
        case Role::gv: return "v(" + std::to_string(v.a) + ")";
        case Role::gw: return "w(" + std::to_string(v.a) + "," + std::to_string(v.b) + "," + std::to_string(v.c) + ")";
    }
    return "?";
}

VertexId parse_vertex(std::string_view s) {
    auto bad = [&] { return Error(ErrorKind::input, "bad vertex id '" + std::string(s) + "'"); };
    std::size_t p = 0;
    while (p < s.size() && std::isalpha(static_cast<unsigned char>(s[p]))) ++p;
    const std::string_view name = s.substr(0, p);
    std::vector<int> idx;
    if (p < s.size()) {
        if (s[p] != '(' || s.back() != ')') {
            // u1, u2, uhat1, uhat2
            int k = 0;
            auto [ptr, ec] = std::from_chars(s.data() + p, s.data() + s.size(), k);
            if (ec != std::errc() || ptr != s.data() + s.size()) throw bad();
            if (name == "u" && (k == 1 || k == 2)) return {Role::gu, k};
            if (name == "uhat" && (k == 1 || k == 2)) return {Role::guhat, k};
            throw bad();
        }
        const std::string_view inner = s.substr(p + 1, s.size() - p - 2);
        std::size_t start = 0;
        while (true) {
            const auto comma = inner.find(',', start);
            const std::string_view part = inner.substr(start, comma - start);
            int k = 0;
            auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), k);
            if (ec != std::errc() || ptr != part.data() + part.size() || part.empty()) throw bad();
            idx.push_back(k);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
    }
    const std::size_t n = idx.size();
    if (name == "w" && n == 0) return {Role::w};
    if (name == "w" && n == 3) return {Role::gw, idx[0], idx[1], idx[2]};
    if (name == "v" && n == 1) return {Role::gv, idx[0]};
    if (n != 2) throw bad();
    static const std::map<std::string_view, Role> two{{"v", Role::v},    {"u", Role::u},       {"ubar", Role::ubar},
                                                      {"z", Role::z},    {"zbar", Role::zbar}, {"x", Role::x},
                                                      {"xbar", Role::xbar}};
    auto it = two.find(name);
    if (it == two.end()) throw bad();
    return {it->second, idx[0], idx[1]};
}

// --- Graphs -------------------------------------------------------------------

long Graph::find(const VertexId& v) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i] == v) return static_cast<long>(i);
    return -1;
}

bool Graph::has_edge(std::uint32_t a, std::uint32_t b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges.begin(), edges.end(), Edge{a, b});
}

void Graph::normalize() {
    for (Edge& e : edges) {
        if (e.first == e.second) throw Error(ErrorKind::input, "self-loop at " + format_vertex(vertices.at(e.first)));
        if (e.first > e.second) std::swap(e.first, e.second);
        if (e.second >= vertices.size()) throw Error(ErrorKind::input, "edge refers to a missing vertex");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

Adjacency::Adjacency(const Graph& g) : offsets(g.vertices.size() + 1, 0) {
    for (const Edge& e : g.edges) ++offsets[e.first + 1], ++offsets[e.second + 1];
    for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
    neighbours.resize(offsets.back());
    std::vector<std::uint64_t> fill(offsets.begin(), offsets.end() - 1);
    for (const Edge& e : g.edges) {
        neighbours[fill[e.first]++] = e.second;
        neighbours[fill[e.second]++] = e.first;
    }
    for (std::size_t i = 0; i + 1 < offsets.size(); ++i)
        std::sort(neighbours.begin() + static_cast<long>(offsets[i]), neighbours.begin() + static_cast<long>(offsets[i + 1]));
}

bool Adjacency::adjacent(std::uint32_t a, std::uint32_t b) const {
    return std::binary_search(neighbours.begin() + static_cast<long>(offsets[a]),
                              neighbours.begin() + static_cast<long>(offsets[a + 1]), b);
}

Graph build_K2n(int n) {
    if (n < 1) throw Error(ErrorKind::input, "K_{2,n} needs n >= 1");
    Graph g;
    g.note = "K_{2," + std::to_string(n) + "}";
    g.vertices.push_back({Role::gu, 1});
    g.vertices.push_back({Role::gu, 2});
    for (int j = 1; j <= n; ++j) g.vertices.push_back({Role::gv, j});
    for (std::uint32_t i = 0; i < 2; ++i)
        for (int j = 0; j < n; ++j) g.edges.push_back({i, static_cast<std::uint32_t>(2 + j)});
    g.normalize();
    return g;
}

Graph build_Ln(int n) {
    if (n < 1) throw Error(ErrorKind::input, "L_n needs n >= 1");
    Graph g;
    g.note = "L_" + std::to_string(n);
    auto add = [&](VertexId v) {
        g.vertices.push_back(v);
        return static_cast<std::uint32_t>(g.vertices.size() - 1);
    };
    const std::uint32_t u1 = add({Role::gu, 1}), u2 = add({Role::gu, 2});
    std::vector<std::uint32_t> v;
    for (int j = 1; j <= n; ++j) v.push_back(add({Role::gv, j}));
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k) {
                const std::uint32_t w = add({Role::gw, i, j, k});
                g.edges.push_back({i == 1 ? u1 : u2, w});
                g.edges.push_back({w, v[static_cast<std::size_t>(j - 1)]});
            }
    const std::uint32_t h1 = add({Role::guhat, 1}), h2 = add({Role::guhat, 2});
    for (std::uint32_t x = 0; x < g.vertices.size(); ++x) {
        if (x != h1 && x != u2) g.edges.push_back({h1, x});
        if (x != h2 && x != u1 && x != h1) g.edges.push_back({h2, x});
    }
    g.normalize();
    return g;
}

// --- Glue ----------------------------------------------------------------------

double glue_epsilon(const Shape& shape, int n) {
    if (n < 1) throw Error(ErrorKind::input, "glue needs n >= 1");
    const PlacedShape s{share(shape), {}};
    const Box b = bounding_box(s);
    if (std::abs(b.x1) > 1e-9 || std::abs(b.y1) > 1e-9 || std::abs(b.x2 - 1) > 1e-9 || std::abs(b.y2 - 1) > 1e-9)
        throw Error(ErrorKind::input, "glue_epsilon needs a shape with bounding box [0,1]^2");
    auto ok = [&](double e) {
        const double need = (n + 1) * e;
        return line_chord(s, {0.0, e / 2}, {1.0, 0.0}).length() >= need &&
               line_chord(s, {0.0, 1.0 - e / 2}, {1.0, 0.0}).length() >= need &&
               line_chord(s, {e / 2, 0.0}, {0.0, 1.0}).length() >= need &&
               line_chord(s, {1.0 - e / 2, 0.0}, {0.0, 1.0}).length() >= need;
    };
    // geometric scan upward from tiny eps to the first failure, then bisection
    double good = 0.0, bad = 0.0;
    for (int t = 40 * 64; t >= 0; --t) {
        const double e = std::ldexp(std::exp2(-(t % 64) / 64.0), -(t / 64));
        if (!ok(e)) {
            bad = e;
            break;
        }
        good = e;
    }
    if (good == 0.0) throw Error(ErrorKind::construction, "no glue width works; is the shape smooth?");
    if (bad == 0.0) return good;
    while (bad - good > 1e-10) {
        const double mid = 0.5 * (good + bad);
        (ok(mid) ? good : bad) = mid;
    }
    return good;
}

// --- Construction 1 -------------------------------------------------------------

ConstructionOutput build_Gmn(const Shape& input, FamilyTag family, int m, int n, const ChainConfig& cfg) {
    if (m < 1 || n < m) throw Error(ErrorKind::input, "construction needs 1 <= m <= n");
    ConstructionOutput out;
    out.m = m;
    out.n = n;
    out.family = family;
    out.shape = family == FamilyTag::hom ? normalize_to_unit_bbox(input).shape : normalize_to_unit_bbox_similar(input).shape;
    const ShapePtr A = share(out.shape);

    const double eps0 = glue_epsilon(out.shape, n);
    out.eps = std::min(eps0, kEpsCap) * (1.0 - 1e-6);
    const long glue = static_cast<long>(std::ceil(n / out.eps));

    const StrictChain row = strict_chain_with_bbox(out.shape, family, m, Axis::horizontal, 1, cfg);
    const StrictChain col = strict_chain_with_bbox(out.shape, family, m, Axis::vertical, 1, cfg);
    out.k = row.k;
    out.delta = row.delta;

    const std::size_t count = static_cast<std::size_t>(2 * n * m - m * m) + 4 * static_cast<std::size_t>(m + 1) +
                              2 * static_cast<std::size_t>(out.k * m) + 1 + 2 * static_cast<std::size_t>(m + 1) * static_cast<std::size_t>(glue);
    if (count > kMaxVertices)
        throw Error(ErrorKind::construction, "construction would have " + std::to_string(count) + " vertices");

    auto& ids = out.realization.vertices;
    auto& regions = out.realization.regions;
    ids.reserve(count);
    regions.reserve(count);
    auto add = [&](VertexId id, Region r) {
        ids.push_back(id);
        regions.push_back(std::move(r));
    };
    const double md = m;
    for (int j = 1; j <= n; ++j)
        for (int i = 1; i <= n; ++i)
            if ((i <= n && j <= m) || (i <= m && j <= n))
                add({Role::v, i, j}, PlacedShape{A, {1.0 / md, 0.0, {(i - 1) / md, (j - 1) / md}, false}});
    for (int j = 1; j <= m + 1; ++j) add({Role::u, 1, j}, HalfPlane{{0.0, 1.0}, (j - 1) / md});
    for (int j = 0; j <= m; ++j) add({Role::u, 2, j}, HalfPlane{{0.0, -1.0}, -j / md});
    for (int i = 1; i <= m + 1; ++i) add({Role::ubar, i, 1}, HalfPlane{{1.0, 0.0}, (i - 1) / md});
    for (int i = 0; i <= m; ++i) add({Role::ubar, i, 2}, HalfPlane{{-1.0, 0.0}, -i / md});
    for (int j = 1; j <= m; ++j) {
        const Chain c = move_chain(row.chain, 0.0, {0.0, (j - 1) / md});
        for (int i = 1; i <= out.k; ++i) add({Role::z, i, j}, c.disk(static_cast<std::size_t>(i - 1)));
    }
    for (int i = 1; i <= m; ++i) {
        const Chain c = move_chain(col.chain, 0.0, {(i - 1) / md, 0.0});
        for (int j = 1; j <= out.k; ++j) add({Role::zbar, i, j}, c.disk(static_cast<std::size_t>(j - 1)));
    }
    add({Role::w}, PlacedShape{A, {}});
    const double s = out.eps / md;
    for (int j = 0; j <= m; ++j)
        for (long i = 0; i < glue; ++i)
            add({Role::x, static_cast<int>(i), j}, PlacedShape{A, {s, 0.0, {out.eps * static_cast<double>(i) / md, j / md - out.eps / (2 * md)}, false}});
    for (int i = 0; i <= m; ++i)
        for (long j = 0; j < glue; ++j)
            add({Role::xbar, i, static_cast<int>(j)}, PlacedShape{A, {s, 0.0, {i / md - out.eps / (2 * md), out.eps * static_cast<double>(j) / md}, false}});

    out.graph = extract_graph(out.realization);
    out.graph.note = "G_{" + std::to_string(m) + "," + std::to_string(n) + "}";
    return out;
}

// --- Graph extraction -------------------------------------------------------------

namespace {

struct Prepared {
    std::vector<Box> box;             // shapes only
    std::vector<char> half;           // region is a half-plane
    std::vector<std::uint32_t> halves;
};

Prepared prepare(const InteriorRealization& r) {
    if (r.vertices.size() != r.regions.size()) throw Error(ErrorKind::input, "realization vertex/region count mismatch");
    if (r.vertices.size() >= std::numeric_limits<std::uint32_t>::max()) throw Error(ErrorKind::input, "too many vertices");
    Prepared p;
    p.box.resize(r.regions.size());
    p.half.resize(r.regions.size());
    for (std::size_t i = 0; i < r.regions.size(); ++i) {
        if (std::holds_alternative<HalfPlane>(r.regions[i])) {
            p.half[i] = 1;
            p.halves.push_back(static_cast<std::uint32_t>(i));
        } else {
            p.box[i] = bounding_box(std::get<PlacedShape>(r.regions[i]));
        }
    }
    return p;
}

// Interior test of a half-plane against a shape; axis-aligned normals read the
// bounding box, which holds the same support values.
bool halfplane_meets(const HalfPlane& h, const PlacedShape& s, const Box& b) {
    double low;
    const Vec2 n = h.normal;
    if (n.x == 0.0 && n.y == 1.0) low = b.y1;
    else if (n.x == 0.0 && n.y == -1.0) low = -b.y2;
    else if (n.x == 1.0 && n.y == 0.0) low = b.x1;
    else if (n.x == -1.0 && n.y == 0.0) low = -b.x2;
    else low = -s.support(-n);
    return low - h.offset < -kGeoTol;
}

bool meets(const InteriorRealization& r, const Prepared& p, std::uint32_t a, std::uint32_t b) {
    if (p.half[a] && p.half[b]) return interiors_intersect(r.regions[a], r.regions[b]);
    if (p.half[a]) return halfplane_meets(std::get<HalfPlane>(r.regions[a]), std::get<PlacedShape>(r.regions[b]), p.box[b]);
    if (p.half[b]) return halfplane_meets(std::get<HalfPlane>(r.regions[b]), std::get<PlacedShape>(r.regions[a]), p.box[a]);
    const Box &x = p.box[a], &y = p.box[b];
    if (!(x.x1 < y.x2 && y.x1 < x.x2 && x.y1 < y.y2 && y.y1 < x.y2)) return false;
    return interiors_intersect(r.regions[a], r.regions[b]);
}

}  // namespace

Graph extract_graph(const InteriorRealization& r) {
    const Prepared p = prepare(r);
    const std::uint32_t count = static_cast<std::uint32_t>(r.regions.size());
    Graph g;
    g.vertices = r.vertices;

    std::vector<Edge> pairs;
    for (const Edge& e : detail::box_pairs(p.box, p.half, 0.0))
        if (meets(r, p, e.first, e.second)) pairs.push_back(e);

    // merge with half-plane pairs in vertex order, so the edge list comes out sorted
    std::size_t next = 0;
    std::vector<std::uint32_t> nbr;
    for (std::uint32_t a = 0; a < count; ++a) {
        if (p.half[a]) {
            for (std::uint32_t b = a + 1; b < count; ++b)
                if (meets(r, p, a, b)) g.edges.push_back({a, b});
            continue;
        }
        nbr.clear();
        for (; next < pairs.size() && pairs[next].first == a; ++next) nbr.push_back(pairs[next].second);
        for (std::uint32_t h : p.halves)
            if (h > a && meets(r, p, a, h)) nbr.push_back(h);
        std::sort(nbr.begin(), nbr.end());
        for (std::uint32_t b : nbr) g.edges.push_back({a, b});
    }
    return g;
}

Graph extract_graph_bruteforce(const InteriorRealization& r) {
    if (r.vertices.size() != r.regions.size()) throw Error(ErrorKind::input, "realization vertex/region count mismatch");
    Graph g;
    g.vertices = r.vertices;
    for (std::uint32_t a = 0; a < r.regions.size(); ++a)
        for (std::uint32_t b = a + 1; b < r.regions.size(); ++b)
            if (interiors_intersect(r.regions[a], r.regions[b])) g.edges.push_back({a, b});
    return g;
}

// --- Cells ------------------------------------------------------------------------

bool cell_inside(const PlacedShape& s, int m, int i, int j) {
    for (int dx = 0; dx <= 1; ++dx)
        for (int dy = 0; dy <= 1; ++dy)
            if (point_signed_distance(s, {static_cast<double>(i - 1 + dx) / m, static_cast<double>(j - 1 + dy) / m}) > 0.0) return false;
    return true;
}

bool cell_meets(const PlacedShape& s, int m, int i, int j) {
    const Vec2 lo{static_cast<double>(i - 1) / m, static_cast<double>(j - 1) / m};
    const double side = 1.0 / m;
    auto cell_support = [&](Vec2 u) { return dot(lo, u) + side * (std::max(u.x, 0.0) + std::max(u.y, 0.0)); };
    auto gap = [&](double t) {
        const Vec2 u = unit_at(t);
        return -(s.support(u) + cell_support(-u));
    };
    return detail::maximize_angle(gap, 256, 3).value <= kGeoTol;
}

// --- Lemma 8 properties -------------------------------------------------------------

namespace {

class Lookup {
public:
    explicit Lookup(const Graph& g) {
        sorted_.reserve(g.vertices.size());
        for (std::size_t i = 0; i < g.vertices.size(); ++i) sorted_.push_back({g.vertices[i], static_cast<std::uint32_t>(i)});
        std::sort(sorted_.begin(), sorted_.end());
    }
    long operator()(const VertexId& v) const {
        auto it = std::lower_bound(sorted_.begin(), sorted_.end(), std::pair<VertexId, std::uint32_t>{v, 0});
        if (it == sorted_.end() || !(it->first == v)) return -1;
        return it->second;
    }

private:
    std::vector<std::pair<VertexId, std::uint32_t>> sorted_;
};

struct Checker {
    const ConstructionOutput& out;
    const Graph& g;
    Lookup id;
    Adjacency adj;
    PropertyReport rep;

    Checker(const ConstructionOutput& o) : out(o), g(o.graph), id(o.graph), adj(o.graph) { rep.pass.fill(true); }

    void fail(int prop, const std::string& msg) {
        rep.pass[static_cast<std::size_t>(prop - 1)] = false;
        rep.failures.push_back(std::to_string(prop) + ": " + msg);
    }

    // Looks up all ids; reports and returns false when one is missing.
    bool get(int prop, std::initializer_list<VertexId> vs, std::vector<std::uint32_t>& outv) {
        outv.clear();
        for (const VertexId& v : vs) {
            const long i = id(v);
            if (i < 0) {
                fail(prop, "missing vertex " + format_vertex(v));
                return false;
            }
            outv.push_back(static_cast<std::uint32_t>(i));
        }
        return true;
    }

    long need(int prop, const VertexId& v) {
        const long i = id(v);
        if (i < 0) fail(prop, "missing vertex " + format_vertex(v));
        return i;
    }

    std::vector<std::uint32_t> glue_line(Role role, int line, bool row) const {
        std::vector<std::uint32_t> out_ids;
        for (int t = 0;; ++t) {
            const long i = id(row ? VertexId{role, t, line} : VertexId{role, line, t});
            if (i < 0) break;
            out_ids.push_back(static_cast<std::uint32_t>(i));
        }
        return out_ids;
    }

    // One L_n copy: roles u1, u2, uhat1, uhat2, v_1..v_n; w_{1jk} drawn from glue line
    // g1 and w_{2jk} from g2.
    void check_Ln(const std::string& where, std::uint32_t u1, std::uint32_t u2, std::uint32_t h1, std::uint32_t h2,
                  const std::vector<std::uint32_t>& v, const std::vector<std::uint32_t>& g1, const std::vector<std::uint32_t>& g2) {
        const int n = static_cast<int>(v.size());
        std::vector<std::uint32_t> core{u1, u2, h1, h2};
        core.insert(core.end(), v.begin(), v.end());
        // role vertex index in L_n for each chosen graph vertex
        const Graph ln = build_Ln(n);
        const Lookup lid(ln);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> chosen;  // (graph vertex, L_n vertex)
        chosen.push_back({u1, static_cast<std::uint32_t>(lid({Role::gu, 1}))});
        chosen.push_back({u2, static_cast<std::uint32_t>(lid({Role::gu, 2}))});
        chosen.push_back({h1, static_cast<std::uint32_t>(lid({Role::guhat, 1}))});
        chosen.push_back({h2, static_cast<std::uint32_t>(lid({Role::guhat, 2}))});
        for (int j = 1; j <= n; ++j) chosen.push_back({v[static_cast<std::size_t>(j - 1)], static_cast<std::uint32_t>(lid({Role::gv, j}))});
        for (int side = 1; side <= 2; ++side) {
            const std::vector<std::uint32_t>& pool = side == 1 ? g1 : g2;
            const std::uint32_t anchor = side == 1 ? u1 : u2;
            for (int j = 1; j <= n; ++j) {
                // glue disks that see exactly u_side, v_j and both hats among the core
                std::vector<std::uint32_t> picked;
                for (std::uint32_t x : pool) {
                    if (static_cast<int>(picked.size()) == n) break;
                    bool fits = true;
                    for (std::uint32_t c : core) {
                        const bool want = c == anchor || c == v[static_cast<std::size_t>(j - 1)] || c == h1 || c == h2;
                        if (adj.adjacent(x, c) != want) {
                            fits = false;
                            break;
                        }
                    }
                    for (std::uint32_t y : picked) fits = fits && !adj.adjacent(x, y);
                    if (fits) picked.push_back(x);
                }
                if (static_cast<int>(picked.size()) < n) {
                    fail(1, where + ": only " + std::to_string(picked.size()) + " glue disks for w(" + std::to_string(side) + "," +
                                std::to_string(j) + ",*)");
                    return;
                }
                for (int k = 1; k <= n; ++k)
                    chosen.push_back({picked[static_cast<std::size_t>(k - 1)], static_cast<std::uint32_t>(lid({Role::gw, side, j, k}))});
            }
        }
        // induced subgraph must match L_n exactly
        const Adjacency ladj(ln);
        for (std::size_t a = 0; a < chosen.size(); ++a)
            for (std::size_t b = a + 1; b < chosen.size(); ++b) {
                if (chosen[a].first == chosen[b].first) {
                    fail(1, where + ": vertex used twice");
                    return;
                }
                if (adj.adjacent(chosen[a].first, chosen[b].first) != ladj.adjacent(chosen[a].second, chosen[b].second)) {
                    fail(1, where + ": " + format_vertex(g.vertices[chosen[a].first]) + "-" + format_vertex(g.vertices[chosen[b].first]) +
                                " disagrees with L_n");
                    return;
                }
            }
    }

    void property1() {
        const int m = out.m, n = out.n;
        std::vector<std::uint32_t> hp;
        for (int j = 1; j <= m; ++j) {
            const std::string where = "row " + std::to_string(j);
            if (!get(1, {{Role::u, 1, j}, {Role::u, 2, j}, {Role::u, 1, j + 1}, {Role::u, 2, j - 1}}, hp)) continue;
            std::vector<std::uint32_t> v;
            bool okv = true;
            for (int i = 1; i <= n; ++i) {
                const long x = need(1, {Role::v, i, j});
                okv = okv && x >= 0;
                v.push_back(static_cast<std::uint32_t>(std::max(x, 0L)));
            }
            if (!okv) continue;
            check_Ln(where, hp[0], hp[1], hp[2], hp[3], v, glue_line(Role::x, j - 1, true), glue_line(Role::x, j, true));
        }
        for (int i = 1; i <= m; ++i) {
            const std::string where = "column " + std::to_string(i);
            if (!get(1, {{Role::ubar, i, 1}, {Role::ubar, i, 2}, {Role::ubar, i + 1, 1}, {Role::ubar, i - 1, 2}}, hp)) continue;
            std::vector<std::uint32_t> v;
            bool okv = true;
            for (int j = 1; j <= n; ++j) {
                const long x = need(1, {Role::v, i, j});
                okv = okv && x >= 0;
                v.push_back(static_cast<std::uint32_t>(std::max(x, 0L)));
            }
            if (!okv) continue;
            check_Ln(where, hp[0], hp[1], hp[2], hp[3], v, glue_line(Role::xbar, i - 1, false), glue_line(Role::xbar, i, false));
        }
    }

    bool connected(const std::vector<std::uint32_t>& set) const {
        if (set.empty()) return true;
        std::vector<char> seen(set.size(), 0);
        std::deque<std::size_t> queue{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!queue.empty()) {
            const std::size_t a = queue.front();
            queue.pop_front();
            for (std::size_t b = 0; b < set.size(); ++b)
                if (!seen[b] && adj.adjacent(set[a], set[b])) seen[b] = 1, ++reached, queue.push_back(b);
        }
        return reached == set.size();
    }

    void property2() {
        const int m = out.m, k = out.k;
        for (int line = 1; line <= m; ++line) {
            for (bool row : {true, false}) {
                std::vector<std::uint32_t> set, path;
                bool ok = true;
                for (int t = 1; t <= m; ++t) {
                    const long x = need(2, row ? VertexId{Role::v, t, line} : VertexId{Role::v, line, t});
                    ok = ok && x >= 0;
                    if (x >= 0) set.push_back(static_cast<std::uint32_t>(x));
                }
                for (int t = 1; t <= k; ++t) {
                    const long x = need(2, row ? VertexId{Role::z, t, line} : VertexId{Role::zbar, line, t});
                    ok = ok && x >= 0;
                    if (x >= 0) set.push_back(static_cast<std::uint32_t>(x)), path.push_back(static_cast<std::uint32_t>(x));
                }
                if (!ok) continue;
                const std::string where = (row ? "row " : "column ") + std::to_string(line);
                for (std::size_t t = 0; t + 1 < path.size(); ++t)
                    if (!adj.adjacent(path[t], path[t + 1])) fail(2, where + ": chain broken after disk " + std::to_string(t + 1));
                if (!connected(set)) fail(2, where + ": induced subgraph is disconnected");
            }
        }
    }

    void expect_edge(int prop, const VertexId& a, const VertexId& b) {
        const long x = need(prop, a), y = need(prop, b);
        if (x < 0 || y < 0) return;
        if (!adj.adjacent(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)))
            fail(prop, "missing edge " + format_vertex(a) + "-" + format_vertex(b));
    }

    void property3() {
        const int m = out.m, k = out.k;
        for (int j = 1; j <= m; ++j) {
            expect_edge(3, {Role::z, 1, j}, {Role::ubar, 1, 1});
            expect_edge(3, {Role::z, k, j}, {Role::ubar, m, 2});
        }
        for (int i = 1; i <= m; ++i) {
            expect_edge(3, {Role::zbar, i, 1}, {Role::u, 1, 1});
            expect_edge(3, {Role::zbar, i, k}, {Role::u, 2, m});
        }
    }

    void property4() {
        const int m = out.m, n = out.n, k = out.k;
        const long w = need(4, {Role::w});
        if (w < 0) return;
        const auto W = static_cast<std::uint32_t>(w);
        for (int line = 1; line <= m; ++line) {
            for (bool row : {true, false}) {
                bool any = false;
                for (int t = 1; t <= k; ++t) {
                    const long x = id(row ? VertexId{Role::z, t, line} : VertexId{Role::zbar, line, t});
                    any = any || (x >= 0 && adj.adjacent(W, static_cast<std::uint32_t>(x)));
                }
                if (!any) fail(4, std::string("w misses every chain disk of ") + (row ? "row " : "column ") + std::to_string(line));
            }
        }
        const std::pair<VertexId, std::vector<std::uint32_t>> cases[] = {
            {{Role::u, 1, 1}, glue_line(Role::x, 0, true)},
            {{Role::u, 2, m}, glue_line(Role::x, m, true)},
            {{Role::ubar, 1, 1}, glue_line(Role::xbar, 0, false)},
            {{Role::ubar, m, 2}, glue_line(Role::xbar, m, false)},
        };
        for (const auto& [uid, pool] : cases) {
            const long u = need(4, uid);
            if (u < 0) continue;
            const auto U = static_cast<std::uint32_t>(u);
            if (adj.adjacent(U, W)) {
                fail(4, format_vertex(uid) + " is adjacent to w");
                continue;
            }
            std::vector<std::uint32_t> picked;
            for (std::uint32_t x : pool) {
                if (static_cast<int>(picked.size()) == n) break;
                if (!adj.adjacent(x, U) || !adj.adjacent(x, W)) continue;
                bool free = true;
                for (std::uint32_t y : picked) free = free && !adj.adjacent(x, y);
                if (free) picked.push_back(x);
            }
            if (static_cast<int>(picked.size()) < n)
                fail(4, "no induced K_{2,n} on " + format_vertex(uid) + ", w (" + std::to_string(picked.size()) + " common neighbours)");
        }
    }

    void property5() {
        const int m = out.m;
        const long w = need(5, {Role::w});
        if (w < 0) return;
        const PlacedShape* a = std::get_if<PlacedShape>(&out.realization.regions.at(static_cast<std::size_t>(w)));
        if (!a) {
            fail(5, "w is not a shape");
            return;
        }
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= m; ++j) {
                const long v = need(5, {Role::v, i, j});
                if (v < 0) continue;
                const bool edge = adj.adjacent(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(w));
                if (!edge && cell_inside(*a, m, i, j)) fail(5, "cell (" + std::to_string(i) + "," + std::to_string(j) + ") lies in A but v-w is no edge");
                if (edge && !cell_meets(*a, m, i, j)) fail(5, "cell (" + std::to_string(i) + "," + std::to_string(j) + ") misses A but v-w is an edge");
            }
    }
};

}  // namespace

PropertyReport check_properties(const ConstructionOutput& out) {
    if (out.realization.vertices.size() != out.realization.regions.size())
        throw Error(ErrorKind::input, "realization vertex/region count mismatch");
    Checker c(out);
    c.property1();
    c.property2();
    c.property3();
    c.property4();
    c.property5();
    return c.rep;
}

// --- Text formats -------------------------------------------------------------------

namespace {

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        out.push_back(line.substr(first));
    }
    return out;
}

void append_edges(std::string& s, const Graph& g) {
    for (const Edge& e : g.edges) {
        s += "edge ";
        s += format_vertex(g.vertices[e.first]);
        s += ' ';
        s += format_vertex(g.vertices[e.second]);
        s += '\n';
    }
}

// Reads an `edge a b` line into g using a name lookup.
void read_edge(const std::string& line, Graph& g, const std::map<VertexId, std::uint32_t>& index) {
    std::istringstream ls(line);
    std::string tag, a, b, extra;
    ls >> tag >> a >> b;
    if (a.empty() || b.empty() || (ls >> extra)) throw Error(ErrorKind::input, "bad edge line '" + line + "'");
    auto ia = index.find(parse_vertex(a)), ib = index.find(parse_vertex(b));
    if (ia == index.end() || ib == index.end()) throw Error(ErrorKind::input, "edge names an unknown vertex: '" + line + "'");
    g.edges.push_back({ia->second, ib->second});
}

}  // namespace

std::string format_construction(const ConstructionOutput& out) {
    std::string s = "gmn shape=\"" + format_shape(out.shape) + "\" family=" + family_name(out.family) + " m=" + std::to_string(out.m) +
                    " n=" + std::to_string(out.n) + " k=" + std::to_string(out.k) + " eps=" + format_double(out.eps) +
                    " delta=" + format_double(out.delta) + "\n";
    for (std::size_t i = 0; i < out.realization.vertices.size(); ++i)
        s += format_vertex(out.realization.vertices[i]) + " " + format_region(out.realization.regions[i]) + "\n";
    append_edges(s, out.graph);
    return s;
}

ConstructionOutput parse_construction(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty() || lines[0].rfind("gmn ", 0) != 0) throw Error(ErrorKind::input, "construction must start with a gmn header");
    ConstructionOutput out;
    const std::string& h = lines[0];
    const auto q1 = h.find("shape=\"");
    const auto q2 = q1 == std::string::npos ? q1 : h.find('"', q1 + 7);
    if (q2 == std::string::npos) throw Error(ErrorKind::input, "gmn header needs shape=\"...\"");
    out.shape = parse_shape(h.substr(q1 + 7, q2 - q1 - 7));
    std::istringstream hs(h.substr(0, q1) + h.substr(q2 + 1));
    std::string tok;
    hs >> tok;
    bool have_m = false, have_n = false;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::input, "bad header field '" + tok + "'");
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "family") out.family = parse_family(val);
        else if (key == "m") out.m = static_cast<int>(parse_int(val)), have_m = true;
        else if (key == "n") out.n = static_cast<int>(parse_int(val)), have_n = true;
        else if (key == "k") out.k = static_cast<int>(parse_int(val));
        else if (key == "eps") out.eps = parse_double(val);
        else if (key == "delta") out.delta = parse_double(val);
        else throw Error(ErrorKind::input, "unknown header field '" + key + "'");
    }
    if (!have_m || !have_n) throw Error(ErrorKind::input, "gmn header needs m and n");
    std::map<VertexId, std::uint32_t> index;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const std::string& line = lines[l];
        if (line.rfind("edge ", 0) == 0) {
            read_edge(line, out.graph, index);
            continue;
        }
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw Error(ErrorKind::input, "vertex line needs a region: '" + line + "'");
        const VertexId v = parse_vertex(line.substr(0, sp));
        if (!index.emplace(v, static_cast<std::uint32_t>(out.realization.vertices.size())).second)
            throw Error(ErrorKind::input, "duplicate vertex " + format_vertex(v));
        out.realization.vertices.push_back(v);
        out.realization.regions.push_back(parse_region(line.substr(sp + 1)));
    }
    out.graph.vertices = out.realization.vertices;
    out.graph.normalize();
    return out;
}

std::string format_graph(const Graph& g) {
    std::string s;
    for (const VertexId& v : g.vertices) s += "vertex " + format_vertex(v) + "\n";
    append_edges(s, g);
    return s;
}

Graph parse_graph(std::string_view text) {
    Graph g;
    std::map<VertexId, std::uint32_t> index;
    for (const std::string& line : lines_of(text)) {
        if (line.rfind("edge ", 0) == 0) {
            read_edge(line, g, index);
        } else if (line.rfind("vertex ", 0) == 0) {
            std::istringstream ls(line);
            std::string tag, name, extra;
            ls >> tag >> name;
            if (name.empty() || (ls >> extra)) throw Error(ErrorKind::input, "bad vertex line '" + line + "'");
            const VertexId v = parse_vertex(name);
            if (!index.emplace(v, static_cast<std::uint32_t>(g.vertices.size())).second)
                throw Error(ErrorKind::input, "duplicate vertex " + name);
            g.vertices.push_back(v);
        } else {
            throw Error(ErrorKind::input, "unexpected line '" + line + "'");
        }
    }
    g.normalize();
    return g;
}

}  // namespace disklab
