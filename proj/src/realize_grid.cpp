#include "disklab/realize_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "disklab/detail/broad_phase.hpp"
#include "disklab/detail/search.hpp"
#include "disklab/optimize.hpp"
#include "disklab/shape_io.hpp"

namespace disklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec2 box_center(const Box& b) { return {0.5 * (b.x1 + b.x2), 0.5 * (b.y1 + b.y2)}; }

std::string pair_name(const VertexId& a, const VertexId& b) { return format_vertex(a) + "-" + format_vertex(b); }

}  // namespace

const char* mismatch_name(MismatchKind k) { return k == MismatchKind::missing_edge ? "missing-edge" : "extra-edge"; }

// --- Verification ---------------------------------------------------------------

std::vector<Mismatch> verify_realization(const Graph& g, const Realization& r) {
    if (r.disks.size() != r.vertices.size()) throw Error(ErrorKind::input, "realization vertex/disk count mismatch");
    if (g.vertices.size() != r.vertices.size()) throw Error(ErrorKind::input, "graph and realization have different vertex sets");
    const std::size_t count = r.vertices.size();

    // g index -> r index
    std::vector<std::uint32_t> to_r(count);
    if (g.vertices == r.vertices) {
        for (std::uint32_t i = 0; i < count; ++i) to_r[i] = i;
    } else {
        std::map<VertexId, std::uint32_t> index;
        for (std::uint32_t i = 0; i < count; ++i) index.emplace(r.vertices[i], i);
        for (std::uint32_t i = 0; i < count; ++i) {
            auto it = index.find(g.vertices[i]);
            if (it == index.end()) throw Error(ErrorKind::input, "vertex " + format_vertex(g.vertices[i]) + " has no disk");
            to_r[i] = it->second;
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (!r.disks[i].shape) throw Error(ErrorKind::input, "disk without a shape");
        if (!family_admits(r.family, r.disks[i].placement))
            throw Error(ErrorKind::input, "disk of " + format_vertex(r.vertices[i]) + " is not in family " + family_name(r.family));
    }
    std::vector<Edge> edges;
    edges.reserve(g.edges.size());
    for (const Edge& e : g.edges) {
        const std::uint32_t a = to_r[e.first], b = to_r[e.second];
        edges.push_back({std::min(a, b), std::max(a, b)});
    }
    std::sort(edges.begin(), edges.end());

    std::vector<Box> boxes(count);
    for (std::size_t i = 0; i < count; ++i) boxes[i] = bounding_box(r.disks[i]);
    const auto candidates = detail::box_pairs(boxes, std::vector<char>(count, 0), 2 * kGeoTol);
    std::vector<double> sd(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t k) {
        sd[k] = signed_distance(Region{r.disks[candidates[k].first]}, Region{r.disks[candidates[k].second]});
    });

    std::vector<Mismatch> out;
    std::size_t e = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const Edge& c = candidates[k];
        for (; e < edges.size() && edges[e] < c; ++e) {
            const Edge& m = edges[e];
            out.push_back({r.vertices[m.first], r.vertices[m.second], MismatchKind::missing_edge,
                           signed_distance(Region{r.disks[m.first]}, Region{r.disks[m.second]})});
        }
        const bool edge = e < edges.size() && edges[e] == c;
        if (edge) ++e;
        const bool hit = sd[k] <= kGeoTol;
        if (edge && !hit) out.push_back({r.vertices[c.first], r.vertices[c.second], MismatchKind::missing_edge, sd[k]});
        if (!edge && hit) out.push_back({r.vertices[c.first], r.vertices[c.second], MismatchKind::extra_edge, sd[k]});
    }
    for (; e < edges.size(); ++e) {
        const Edge& m = edges[e];
        out.push_back({r.vertices[m.first], r.vertices[m.second], MismatchKind::missing_edge,
                       signed_distance(Region{r.disks[m.first]}, Region{r.disks[m.second]})});
    }
    return out;
}

// --- Interior-realization to realization ---------------------------------------------

Vec2 witness_point(const Region& ra, const Region& rb) {
    const auto* ha = std::get_if<HalfPlane>(&ra);
    const auto* hb = std::get_if<HalfPlane>(&rb);
    if (ha && hb) {
        const HalfPlane a = HalfPlane::from(ha->normal, ha->offset), b = HalfPlane::from(hb->normal, hb->offset);
        const double c = dot(a.normal, b.normal);
        if (c > 1.0 - 1e-12) return a.normal * (std::min(a.offset, b.offset) - 1.0);
        if (c < -1.0 + 1e-12) {
            if (!(a.offset + b.offset > 0.0)) throw Error(ErrorKind::input, "half-planes with disjoint interiors have no witness");
            return a.normal * (0.5 * (a.offset - b.offset));
        }
        // corner of the two boundary lines, moved one unit deep into both
        const Mat2 n{a.normal.x, a.normal.y, b.normal.x, b.normal.y};
        return n.inverse() * Vec2{a.offset - 1.0, b.offset - 1.0};
    }
    if (ha || hb) {
        const HalfPlane h = ha ? HalfPlane::from(ha->normal, ha->offset) : HalfPlane::from(hb->normal, hb->offset);
        const PlacedShape& s = std::get<PlacedShape>(ha ? rb : ra);
        // walk from the point of s deepest in h back along the normal
        const Vec2 tip = s.support_point(-h.normal);
        const Vec2 start = s.as_circle() ? s.as_circle()->center - h.normal * s.as_circle()->radius : tip;
        const Interval chord = line_chord(s, start, h.normal);
        const double lo = std::max(chord.lo, 0.0), hi = std::min(chord.hi, h.offset - dot(start, h.normal));
        if (!(hi > lo)) throw Error(ErrorKind::conversion, "regions share no interior point");
        return start + h.normal * (0.5 * (lo + hi));
    }
    const auto& a = std::get<PlacedShape>(ra);
    const auto& b = std::get<PlacedShape>(rb);
    auto ca = a.as_circle(), cb = b.as_circle();
    if (ca && cb) {
        const Vec2 d = cb->center - ca->center;
        const double len = norm(d);
        if (len == 0.0) return ca->center;
        const double t = 0.5 * (ca->radius + len - cb->radius);
        return ca->center + d * (t / len);
    }
    // Start between the contact points of the least-overlap direction, then minimize
    // the larger of the two point distances.
    auto gap = [&](double t) {
        const Vec2 u = unit_at(t);
        return -(a.support(u) + b.support(-u));
    };
    const auto best = detail::maximize_angle(gap, 256, 3);
    if (!(best.value < 0.0)) throw Error(ErrorKind::conversion, "regions share no interior point");
    const Vec2 u = unit_at(best.arg);
    const Vec2 start = 0.5 * (a.support_point(u) + b.support_point(-u));
    auto f = [&](const std::vector<double>& x) {
        const Vec2 p{x[0], x[1]};
        return std::max(point_signed_distance(a, p), point_signed_distance(b, p));
    };
    NelderMeadOptions opt;
    opt.max_evaluations = 150;
    opt.restarts = 0;
    opt.initial_step = -0.25 * best.value;
    opt.simplex_tol = 1e-9 * opt.initial_step;
    const LocalResult res = minimize_nelder_mead(f, {start.x, start.y}, opt);
    if (!(res.value < 0.0)) throw Error(ErrorKind::conversion, "regions share no interior point");
    return {res.x[0], res.x[1]};
}

Realization to_realization(const InteriorRealization& ir, const Graph& g, FamilyTag family, const ConversionOptions& opt) {
    if (ir.vertices.size() != ir.regions.size()) throw Error(ErrorKind::input, "realization vertex/region count mismatch");
    if (ir.vertices != g.vertices) throw Error(ErrorKind::input, "graph and interior-realization list different vertices");
    const std::size_t count = ir.vertices.size();

    ShapePtr base;
    Box all{kInf, -kInf, kInf, -kInf};
    for (const Region& r : ir.regions) {
        const auto* s = std::get_if<PlacedShape>(&r);
        if (!s) continue;
        if (!s->shape) throw Error(ErrorKind::input, "placed shape without a shape");
        if (!base) base = s->shape;
        else if (!(*s->shape == *base)) throw Error(ErrorKind::input, "all bounded regions must share one base shape");
        if (!family_admits(family, s->placement)) throw Error(ErrorKind::input, std::string("region not in family ") + family_name(family));
        const Box b = bounding_box(*s);
        all = {std::min(all.x1, b.x1), std::max(all.x2, b.x2), std::min(all.y1, b.y1), std::max(all.y2, b.y2)};
    }
    if (!base) throw Error(ErrorKind::input, "conversion needs at least one bounded region");
    if (extract_graph(ir).edges != g.edges) throw Error(ErrorKind::input, "graph differs from the one the interior-realization gives");
    const double span = std::max({all.width(), all.height(), 1e-12});

    std::vector<Vec2> witness(g.edges.size());
    parallel_for(g.edges.size(), [&](std::size_t k) {
        witness[k] = witness_point(ir.regions[g.edges[k].first], ir.regions[g.edges[k].second]);
    });

    // shrink centres for bounded regions, anchors for half-planes
    const Vec2 centroid = moments(*base).centroid;
    struct Anchor {
        HalfPlane h;
        Vec2 point;
        double gap = 0.0;
        double scale = 1.0;
    };
    std::vector<Vec2> centre(count);
    std::vector<Anchor> anchor(count);
    std::vector<std::vector<Vec2>> inside(count);
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        inside[g.edges[k].first].push_back(witness[k]);
        inside[g.edges[k].second].push_back(witness[k]);
    }
    const double base_diam = diameter(*base);
    for (std::size_t i = 0; i < count; ++i) {
        if (const auto* s = std::get_if<PlacedShape>(&ir.regions[i])) {
            centre[i] = s->placement.to_affine()(centroid);
            continue;
        }
        const auto& raw = std::get<HalfPlane>(ir.regions[i]);
        Anchor a;
        a.h = HalfPlane::from(raw.normal, raw.offset);
        const Vec2 n = a.h.normal;
        Vec2 mean = box_center(all);
        double depth = span;
        if (!inside[i].empty()) {
            mean = {};
            depth = kInf;
            for (Vec2 p : inside[i]) {
                mean += p;
                depth = std::min(depth, a.h.offset - dot(p, n));
            }
            mean = mean / static_cast<double>(inside[i].size());
        }
        a.point = mean + n * (a.h.offset - dot(mean, n));
        a.gap = 0.5 * depth;
        double spread = 0.0;
        for (Vec2 p : inside[i]) spread = std::max(spread, norm(p - a.point));
        a.scale = 4.0 * std::max(spread, 1e-3 * span) / base_diam;
        anchor[i] = a;
    }

    std::vector<Mismatch> last;
    for (int round = 0; round < opt.max_rounds; ++round) {
        const double eta = std::ldexp(opt.eta, -round);
        const double grow = std::ldexp(1.0, round);
        Realization out;
        out.vertices = ir.vertices;
        out.family = family;
        out.disks.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            if (const auto* s = std::get_if<PlacedShape>(&ir.regions[i])) {
                Placement p = s->placement;
                p.scale *= 1.0 - eta;
                p.offset = centre[i] + (p.offset - centre[i]) * (1.0 - eta);
                out.disks.push_back({s->shape, p});
                continue;
            }
            const Anchor& a = anchor[i];
            const double scale = a.scale * grow;
            const Vec2 touch = a.point - a.h.normal * a.gap;
            out.disks.push_back({base, {scale, 0.0, touch - base->support_point(a.h.normal) * scale, false}});
        }
        last = verify_realization(g, out);
        if (last.empty()) return out;
    }
    std::string msg = "no realization after " + std::to_string(opt.max_rounds) + " rounds;";
    for (std::size_t k = 0; k < last.size() && k < 5; ++k)
        msg += " " + std::string(mismatch_name(last[k].kind)) + " " + pair_name(last[k].a, last[k].b);
    if (last.size() > 5) msg += " (+" + std::to_string(last.size() - 5) + " more)";
    throw Error(ErrorKind::conversion, msg);
}

// --- Grids and alignment ----------------------------------------------------------------

MGrid MGrid::uniform(int m) {
    if (m < 1) throw Error(ErrorKind::input, "grid needs m >= 1");
    MGrid g;
    g.xs.resize(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) g.xs[static_cast<std::size_t>(i)] = static_cast<double>(i) / m;
    g.ys = g.xs;
    return g;
}

void MGrid::validate() const {
    if (!(std::abs(cross(a, b)) > 0.0)) throw Error(ErrorKind::input, "grid basis is degenerate");
    if (xs.size() < 2 || xs.size() != ys.size()) throw Error(ErrorKind::input, "grid needs m+1 coordinates on both axes");
    for (const auto* c : {&xs, &ys}) {
        if (c->front() != 0.0 || c->back() != 1.0) throw Error(ErrorKind::input, "grid coordinates must run from 0 to 1");
        for (std::size_t i = 1; i < c->size(); ++i)
            if (!((*c)[i] > (*c)[i - 1])) throw Error(ErrorKind::input, "grid coordinates must increase strictly");
    }
}

namespace {

struct ExpectedLines {
    std::vector<HalfPlane> u1, u2, ubar1, ubar2;
};

ExpectedLines grid_halfplanes(const MGrid& grid) {
    const Affine f = grid.map();
    const std::size_t m = static_cast<std::size_t>(grid.m());
    ExpectedLines e;
    for (std::size_t j = 1; j <= m; ++j) {
        e.u1.push_back(apply_affine(f, HalfPlane::from({0.0, 1.0}, grid.ys[j - 1])));
        e.u2.push_back(apply_affine(f, HalfPlane::from({0.0, -1.0}, -grid.ys[j])));
    }
    for (std::size_t i = 1; i <= m; ++i) {
        e.ubar1.push_back(apply_affine(f, HalfPlane::from({1.0, 0.0}, grid.xs[i - 1])));
        e.ubar2.push_back(apply_affine(f, HalfPlane::from({-1.0, 0.0}, -grid.xs[i])));
    }
    return e;
}

std::string two(const char* name, std::size_t a, std::size_t b) {
    return std::string(name) + "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

}  // namespace

AlignmentReport check_aligned(const AlignedConfig& cfg) {
    cfg.grid.validate();
    const std::size_t m = static_cast<std::size_t>(cfg.grid.m());
    if (cfg.v.size() != m * m || cfg.u1.size() != m || cfg.u2.size() != m || cfg.ubar1.size() != m || cfg.ubar2.size() != m)
        throw Error(ErrorKind::input, "configuration sizes do not match the grid");
    const double scale = std::max({1.0, norm(cfg.grid.z), norm(cfg.grid.a), norm(cfg.grid.b)});
    const double tol = kGeoTol * scale;
    AlignmentReport rep;
    auto flag = [&](std::string msg) {
        rep.aligned = false;
        rep.violations.push_back(std::move(msg));
    };
    const ExpectedLines e = grid_halfplanes(cfg.grid);
    auto same = [&](const HalfPlane& h, const HalfPlane& want, const std::string& name) {
        const HalfPlane n = HalfPlane::from(h.normal, h.offset);
        const double dn = norm(n.normal - want.normal), dd = std::abs(n.offset - want.offset);
        if (!(dn <= 1e-9 && dd <= tol))
            flag(name + ": not the grid half-plane (normal off by " + format_double(dn) + ", offset by " + format_double(dd) + ")");
    };
    for (std::size_t j = 1; j <= m; ++j) {
        same(cfg.u1[j - 1], e.u1[j - 1], two("u", 1, j));
        same(cfg.u2[j - 1], e.u2[j - 1], two("u", 2, j));
    }
    for (std::size_t i = 1; i <= m; ++i) {
        same(cfg.ubar1[i - 1], e.ubar1[i - 1], two("ubar", i, 1));
        same(cfg.ubar2[i - 1], e.ubar2[i - 1], two("ubar", i, 2));
    }
    for (std::size_t j = 1; j <= m; ++j)
        for (std::size_t i = 1; i <= m; ++i) {
            const PlacedShape& v = cfg.v[(j - 1) * m + (i - 1)];
            const std::pair<const HalfPlane*, std::string> sides[] = {{&cfg.u1[j - 1], two("u", 1, j)},
                                                                      {&cfg.u2[j - 1], two("u", 2, j)},
                                                                      {&cfg.ubar1[i - 1], two("ubar", i, 1)},
                                                                      {&cfg.ubar2[i - 1], two("ubar", i, 2)}};
            for (const auto& [h, name] : sides) {
                const double sd = signed_distance(Region{v}, Region{*h});
                if (!(std::abs(sd) <= tol))
                    flag(two("v", i, j) + ": does not touch " + name + " (signed distance " + format_double(sd) + ")");
            }
        }
    return rep;
}

AlignedConfig aligned_config(const ConstructionOutput& out) {
    const int m = out.m;
    std::map<VertexId, std::size_t> index;
    for (std::size_t i = 0; i < out.realization.vertices.size(); ++i) {
        const Role r = out.realization.vertices[i].role;
        if (r == Role::v || r == Role::u || r == Role::ubar || r == Role::w) index.emplace(out.realization.vertices[i], i);
    }
    auto region = [&](VertexId id) -> const Region& {
        auto it = index.find(id);
        if (it == index.end()) throw Error(ErrorKind::input, "construction lacks " + format_vertex(id));
        return out.realization.regions[it->second];
    };
    auto shape = [&](VertexId id) {
        const auto* s = std::get_if<PlacedShape>(&region(id));
        if (!s) throw Error(ErrorKind::input, format_vertex(id) + " is not a disk");
        return *s;
    };
    auto half = [&](VertexId id) {
        const auto* h = std::get_if<HalfPlane>(&region(id));
        if (!h) throw Error(ErrorKind::input, format_vertex(id) + " is not a half-plane");
        return *h;
    };
    AlignedConfig cfg;
    cfg.grid = MGrid::uniform(m);
    for (int j = 1; j <= m; ++j)
        for (int i = 1; i <= m; ++i) cfg.v.push_back(shape({Role::v, i, j}));
    for (int j = 1; j <= m; ++j) {
        cfg.u1.push_back(half({Role::u, 1, j}));
        cfg.u2.push_back(half({Role::u, 2, j}));
    }
    for (int i = 1; i <= m; ++i) {
        cfg.ubar1.push_back(half({Role::ubar, i, 1}));
        cfg.ubar2.push_back(half({Role::ubar, i, 2}));
    }
    cfg.w = shape({Role::w});
    return cfg;
}

AlignedConfig apply_affine(const Affine& f, const AlignedConfig& cfg) {
    AlignedConfig out;
    out.grid = cfg.grid;
    out.grid.z = f(cfg.grid.z);
    out.grid.a = f.lin * cfg.grid.a;
    out.grid.b = f.lin * cfg.grid.b;
    for (const PlacedShape& v : cfg.v) out.v.push_back(apply_affine(f, v));
    for (const auto& [src, dst] : {std::pair{&cfg.u1, &out.u1}, {&cfg.u2, &out.u2}, {&cfg.ubar1, &out.ubar1}, {&cfg.ubar2, &out.ubar2}})
        for (const HalfPlane& h : *src) dst->push_back(apply_affine(f, h));
    if (cfg.w) out.w = apply_affine(f, *cfg.w);
    return out;
}

// --- Pixel masks and reconstruction --------------------------------------------------------

std::size_t PixelMask::count() const { return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), 1)); }

PixelMask pixel_mask(const Graph& g, int m) {
    if (m < 1) throw Error(ErrorKind::input, "mask needs m >= 1");
    const std::size_t mm = static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
    long w = -1;
    std::vector<long> cell_vertex(mm, -1);
    std::vector<long> cell_of(g.vertices.size(), -1);
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        const VertexId& v = g.vertices[i];
        if (v.role == Role::w) w = static_cast<long>(i);
        if (v.role == Role::v && v.a >= 1 && v.a <= m && v.b >= 1 && v.b <= m) {
            const std::size_t c = static_cast<std::size_t>((v.b - 1) * m + (v.a - 1));
            cell_vertex[c] = static_cast<long>(i);
            cell_of[i] = static_cast<long>(c);
        }
    }
    if (w < 0) throw Error(ErrorKind::input, "graph has no vertex w");
    for (std::size_t c = 0; c < mm; ++c)
        if (cell_vertex[c] < 0)
            throw Error(ErrorKind::input, "graph has no vertex " + format_vertex({Role::v, static_cast<int>(c) % m + 1, static_cast<int>(c) / m + 1}));
    PixelMask mask{m, std::vector<char>(mm, 0)};
    const auto W = static_cast<std::uint32_t>(w);
    for (const Edge& e : g.edges) {
        if (e.first == W && cell_of[e.second] >= 0) mask.cells[static_cast<std::size_t>(cell_of[e.second])] = 1;
        if (e.second == W && cell_of[e.first] >= 0) mask.cells[static_cast<std::size_t>(cell_of[e.first])] = 1;
    }
    return mask;
}

Reconstruction reconstruct_shape(const PixelMask& mask, const MGrid& grid) {
    grid.validate();
    const int m = grid.m();
    if (mask.m != m || mask.cells.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(m))
        throw Error(ErrorKind::input, "mask and grid sizes differ");
    if (mask.count() == 0) throw Error(ErrorKind::reconstruction, "empty mask");
    Reconstruction out;
    std::vector<Vec2> corners;
    for (int j = 1; j <= m; ++j)
        for (int i = 1; i <= m; ++i) {
            const double x0 = grid.xs[static_cast<std::size_t>(i - 1)], x1 = grid.xs[static_cast<std::size_t>(i)];
            const double y0 = grid.ys[static_cast<std::size_t>(j - 1)], y1 = grid.ys[static_cast<std::size_t>(j)];
            const std::array<Vec2, 4> cell{grid(x0, y0), grid(x1, y0), grid(x1, y1), grid(x0, y1)};
            out.cell_diameter = std::max({out.cell_diameter, norm(cell[2] - cell[0]), norm(cell[3] - cell[1])});
            if (!mask.at(i, j)) continue;
            out.cells.push_back(cell);
            corners.insert(corners.end(), cell.begin(), cell.end());
        }
    out.hull = convex_hull(std::move(corners));
    return out;
}

double polygon_support(const std::vector<Vec2>& poly, Vec2 u) {
    double best = -kInf;
    for (Vec2 p : poly) best = std::max(best, dot(p, u));
    return best;
}

double hausdorff(const std::vector<Vec2>& poly, const PlacedShape& s) {
    if (poly.empty()) throw Error(ErrorKind::input, "hausdorff of an empty polygon");
    auto diff = [&](double t) {
        const Vec2 u = unit_at(t);
        return std::abs(polygon_support(poly, u) - s.support(u));
    };
    return detail::maximize_angle(diff, 4096, 6).value;
}

GridDiagnostics grid_diagnostics(const MGrid& grid, double c) {
    grid.validate();
    if (!(c > 0.0)) throw Error(ErrorKind::input, "grid diagnostics need c > 0");
    const double m = grid.m();
    const double x = norm(grid.a), y = norm(grid.b);
    GridDiagnostics d;
    d.value[0] = x / y;
    d.value[1] = y / x;
    d.value[2] = std::abs(cross(grid.a, grid.b)) / (x * y);
    d.margin[0] = 1.0 + c / m - d.value[0];
    d.margin[1] = 1.0 + c / m - d.value[1];
    d.margin[2] = d.value[2] - (1.0 - c / m);
    for (std::size_t axis = 0; axis < 2; ++axis) {
        const auto& coord = axis == 0 ? grid.xs : grid.ys;
        double worst = 0.0, margin = kInf;
        for (std::size_t i = 1; i + 1 < coord.size(); ++i) {
            const double off = coord[i] - static_cast<double>(i) / m;
            worst = std::max(worst, std::abs(off));
            margin = std::min(margin, 2.0 * c / m - std::abs(off));
        }
        d.value[3 + axis] = worst;
        d.margin[3 + axis] = margin;
    }
    for (std::size_t k = 0; k < 5; ++k) d.pass[k] = d.margin[k] > 0.0;
    return d;
}

// --- Text formats ------------------------------------------------------------------------------

std::string format_mask(const PixelMask& mask) {
    std::string s = "mask m=" + std::to_string(mask.m) + "\n";
    for (int j = mask.m; j >= 1; --j) {
        for (int i = 1; i <= mask.m; ++i) s += mask.at(i, j) ? '#' : '.';
        s += '\n';
    }
    return s;
}

PixelMask parse_mask(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line) || line.rfind("mask m=", 0) != 0) throw Error(ErrorKind::input, "mask must start with 'mask m=<i>'");
    const long m = parse_int(line.substr(7));
    if (m < 1 || m > 100000) throw Error(ErrorKind::input, "mask size out of range");
    PixelMask mask{static_cast<int>(m), std::vector<char>(static_cast<std::size_t>(m * m), 0)};
    for (long j = m; j >= 1; --j) {
        if (!std::getline(is, line)) throw Error(ErrorKind::input, "mask has too few rows");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (static_cast<long>(line.size()) != m) throw Error(ErrorKind::input, "mask row " + std::to_string(j) + " has the wrong length");
        for (long i = 1; i <= m; ++i) {
            const char ch = line[static_cast<std::size_t>(i - 1)];
            if (ch != '#' && ch != '.') throw Error(ErrorKind::input, std::string("bad mask character '") + ch + "'");
            mask.set(static_cast<int>(i), static_cast<int>(j), ch == '#');
        }
    }
    while (std::getline(is, line))
        if (line.find_first_not_of(" \t\r") != std::string::npos) throw Error(ErrorKind::input, "trailing text after mask");
    return mask;
}

namespace {

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

std::vector<double> split(std::string_view s) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(parse_double(s.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string format_grid(const MGrid& grid) {
    return "grid z=" + format_vec(grid.z) + " a=" + format_vec(grid.a) + " b=" + format_vec(grid.b) + " xs=" + join(grid.xs) +
           " ys=" + join(grid.ys) + "\n";
}

MGrid parse_grid(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string tok;
    if (!(is >> tok) || tok != "grid") throw Error(ErrorKind::input, "grid must start with 'grid'");
    MGrid g;
    bool seen[5] = {};
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::input, "bad grid field '" + tok + "'");
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "z") g.z = parse_vec(val), seen[0] = true;
        else if (key == "a") g.a = parse_vec(val), seen[1] = true;
        else if (key == "b") g.b = parse_vec(val), seen[2] = true;
        else if (key == "xs") g.xs = split(val), seen[3] = true;
        else if (key == "ys") g.ys = split(val), seen[4] = true;
        else throw Error(ErrorKind::input, "unknown grid field '" + key + "'");
    }
    if (!(seen[0] && seen[1] && seen[2] && seen[3] && seen[4])) throw Error(ErrorKind::input, "grid needs z, a, b, xs and ys");
    g.validate();
    return g;
}

std::string format_realization(const Realization& r) {
    std::string s = std::string("realization family=") + family_name(r.family) + "\n";
    for (std::size_t i = 0; i < r.vertices.size(); ++i) s += format_vertex(r.vertices[i]) + " " + format_region(Region{r.disks[i]}) + "\n";
    return s;
}

Realization parse_realization(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    Realization r;
    bool header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            const std::string key = "realization family=";
            if (line.rfind(key, 0) != 0) throw Error(ErrorKind::input, "realization must start with 'realization family=<tag>'");
            r.family = parse_family(line.substr(key.size()));
            header = true;
            continue;
        }
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw Error(ErrorKind::input, "realization line needs a shape: '" + line + "'");
        r.vertices.push_back(parse_vertex(line.substr(0, sp)));
        const Region reg = parse_region(line.substr(sp + 1));
        const auto* p = std::get_if<PlacedShape>(&reg);
        if (!p) throw Error(ErrorKind::input, "realization disks must be bounded");
        r.disks.push_back(*p);
    }
    if (!header) throw Error(ErrorKind::input, "empty realization");
    return r;
}

}  // namespace disklab
