#include "disklab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace disklab {

namespace {

const char* role_color(Role r) {
    switch (r) {
        case Role::v: return "#1f6fb4";
        case Role::u:
        case Role::ubar: return "#7f7f7f";
        case Role::z:
        case Role::zbar: return "#2e8b57";
        case Role::w: return "#c0392b";
        case Role::x:
        case Role::xbar: return "#d98c1a";
        default: return "#5a3d8a";
    }
}

// Sutherland-Hodgman clip of a convex polygon to the half-plane.
std::vector<Vec2> clip(const std::vector<Vec2>& poly, const HalfPlane& h) {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
        const double dp = dot(p, h.normal) - h.offset, dq = dot(q, h.normal) - h.offset;
        if (dp <= 0) out.push_back(p);
        if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) out.push_back(p + (q - p) * (dp / (dp - dq)));
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s = buf;
    return s == "-0.0000" ? "0.0000" : s;
}

class Writer {
public:
    Writer(const Box& view, double pixels) : view_(view), k_(pixels / std::max(view.width(), view.height())) {}

    std::string pt(Vec2 p) const { return num((p.x - view_.x1) * k_) + "," + num((view_.y2 - p.y) * k_); }
    double width() const { return view_.width() * k_; }
    double height() const { return view_.height() * k_; }

    std::string path(const std::vector<Vec2>& poly) const {
        std::string d;
        for (std::size_t i = 0; i < poly.size(); ++i) d += (i ? " L" : "M") + pt(poly[i]);
        return d + " Z";
    }

private:
    Box view_;
    double k_;
};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

}  // namespace

SvgScene realization_scene(const InteriorRealization& r) {
    SvgScene s;
    for (std::size_t i = 0; i < r.regions.size(); ++i) {
        SvgItem it{r.regions[i], "none", role_color(r.vertices[i].role), format_vertex(r.vertices[i])};
        if (std::holds_alternative<HalfPlane>(it.region)) it.fill = "#7f7f7f22";
        s.items.push_back(std::move(it));
    }
    return s;
}

SvgScene realization_scene(const Realization& r) {
    SvgScene s;
    for (std::size_t i = 0; i < r.disks.size(); ++i)
        s.items.push_back({r.disks[i], "none", role_color(r.vertices[i].role), format_vertex(r.vertices[i])});
    return s;
}

SvgScene chain_scene(const Chain& c) {
    SvgScene s;
    Box b{INFINITY, -INFINITY, INFINITY, -INFINITY};
    for (std::size_t i = 0; i < c.size(); ++i) {
        const PlacedShape d = c.disk(i);
        const Box e = bounding_box(d);
        b = {std::min(b.x1, e.x1), std::max(b.x2, e.x2), std::min(b.y1, e.y1), std::max(b.y2, e.y2)};
        s.items.push_back({d, "#1f6fb433", "#1f6fb4", "disk " + std::to_string(i + 1)});
    }
    if (c.size() == 0) b = {0, 1, 0, 1};
    // strip lines across the chain's extent
    const Vec2 n = c.strip.normal();
    double lo = INFINITY, hi = -INFINITY;
    for (Vec2 p : {Vec2{b.x1, b.y1}, Vec2{b.x2, b.y1}, Vec2{b.x1, b.y2}, Vec2{b.x2, b.y2}}) {
        lo = std::min(lo, dot(p, c.strip.u));
        hi = std::max(hi, dot(p, c.strip.u));
    }
    const double pad = 0.1 * (hi - lo + c.strip.width());
    for (double d : {c.strip.d1, c.strip.d2})
        s.lines.push_back({c.strip.u * (lo - pad) + n * d, c.strip.u * (hi + pad) + n * d});
    return s;
}

SvgScene grid_scene(const MGrid& grid, const PixelMask& mask, const std::vector<Vec2>& hull) {
    if (mask.m != grid.m()) throw Error(ErrorKind::input, "mask and grid sizes differ");
    SvgScene s;
    const int m = grid.m();
    for (int j = 1; j <= m; ++j)
        for (int i = 1; i <= m; ++i)
            if (mask.at(i, j)) {
                const double x0 = grid.xs[i - 1], x1 = grid.xs[i], y0 = grid.ys[j - 1], y1 = grid.ys[j];
                s.cells.push_back({grid(x0, y0), grid(x1, y0), grid(x1, y1), grid(x0, y1)});
            }
    for (double x : grid.xs) s.lines.push_back({grid(x, 0.0), grid(x, 1.0)});
    for (double y : grid.ys) s.lines.push_back({grid(0.0, y), grid(1.0, y)});
    s.polygon = hull;
    return s;
}

std::string render_svg(const SvgScene& scene) {
    Box view;
    if (scene.view) {
        view = *scene.view;
    } else {
        Box b{INFINITY, -INFINITY, INFINITY, -INFINITY};
        auto add = [&](Vec2 p) { b = {std::min(b.x1, p.x), std::max(b.x2, p.x), std::min(b.y1, p.y), std::max(b.y2, p.y)}; };
        for (const auto& it : scene.items)
            if (const auto* p = std::get_if<PlacedShape>(&it.region)) {
                const Box e = bounding_box(*p);
                add({e.x1, e.y1});
                add({e.x2, e.y2});
            }
        for (const auto& c : scene.cells)
            for (Vec2 p : c) add(p);
        for (const auto& [p, q] : scene.lines) {
            add(p);
            add(q);
        }
        for (Vec2 p : scene.polygon) add(p);
        if (!(b.x1 <= b.x2)) b = {0, 1, 0, 1};
        const double pad = 0.05 * std::max({b.width(), b.height(), 1e-9});
        view = {b.x1 - pad, b.x2 + pad, b.y1 - pad, b.y2 + pad};
    }
    if (!(view.width() > 0 && view.height() > 0)) throw Error(ErrorKind::input, "empty svg view box");
    const Writer w(view, 800.0);
    const std::vector<Vec2> frame{{view.x1, view.y1}, {view.x2, view.y1}, {view.x2, view.y2}, {view.x1, view.y2}};

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
        << "<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" \"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(w.width()) << "\" height=\"" << num(w.height())
        << "\" viewBox=\"0 0 " << num(w.width()) << " " << num(w.height()) << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << num(w.width()) << "\" height=\"" << num(w.height()) << "\" fill=\"white\"/>\n";
    for (const auto& c : scene.cells)
        out << "<path class=\"cell\" d=\"" << w.path({c.begin(), c.end()}) << "\" fill=\"#f2b134\" stroke=\"none\"/>\n";
    for (const auto& it : scene.items) {
        std::vector<Vec2> poly;
        std::string cls;
        if (const auto* h = std::get_if<HalfPlane>(&it.region)) {
            poly = clip(frame, *h);
            cls = "halfplane";
            if (poly.size() < 3) continue;
        } else {
            poly = boundary_points(std::get<PlacedShape>(it.region), scene.boundary_samples);
            cls = "shape";
        }
        out << "<path class=\"" << cls << "\" d=\"" << w.path(poly) << "\" fill=\"" << it.fill << "\" stroke=\"" << it.stroke
            << "\" stroke-width=\"0.6\">";
        if (!it.title.empty()) out << "<title>" << escape(it.title) << "</title>";
        out << "</path>\n";
    }
    for (const auto& [p, q] : scene.lines)
        out << "<path class=\"line\" d=\"M" << w.pt(p) << " L" << w.pt(q) << "\" stroke=\"#333333\" stroke-width=\"0.8\" fill=\"none\"/>\n";
    if (scene.polygon.size() >= 2)
        out << "<path class=\"hull\" d=\"" << w.path(scene.polygon) << "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
    out << "</svg>\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
    f << text;
    f.close();
    if (!f) throw Error(ErrorKind::io, "write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::io, "cannot open '" + path + "'");
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace disklab
