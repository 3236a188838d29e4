#include "disklab/shape_io.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

namespace disklab {

namespace {

std::vector<std::string> tokenize(std::string_view text) {
    // whitespace split, but whitespace inside parentheses is dropped
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (depth > 0) continue;
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
            continue;
        }
        cur.push_back(c);
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

using KeyValues = std::map<std::string, std::string, std::less<>>;

KeyValues key_values(const std::vector<std::string>& toks, std::size_t begin, std::size_t end,
                     std::vector<std::string>* flags = nullptr) {
    KeyValues kv;
    for (std::size_t i = begin; i < end; ++i) {
        const auto eq = toks[i].find('=');
        if (eq == std::string::npos) {
            if (flags) {
                flags->push_back(toks[i]);
                continue;
            }
            throw Error(ErrorKind::input, "expected key=value, got '" + toks[i] + "'");
        }
        auto [it, fresh] = kv.emplace(toks[i].substr(0, eq), toks[i].substr(eq + 1));
        if (!fresh) throw Error(ErrorKind::input, "duplicate key '" + it->first + "'");
    }
    return kv;
}

const std::string& require(const KeyValues& kv, const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::input, std::string("missing ") + key + "=");
    return it->second;
}

void reject_unknown(const KeyValues& kv, std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : kv) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw Error(ErrorKind::input, "unknown key '" + k + "'");
    }
}

std::string_view strip_parens(std::string_view s) {
    if (s.size() < 2 || s.front() != '(' || s.back() != ')')
        throw Error(ErrorKind::input, "expected parenthesized list, got '" + std::string(s) + "'");
    return s.substr(1, s.size() - 2);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

Affine parse_frame(std::string_view s) {
    const auto parts = split(strip_parens(s), ',');
    if (parts.size() != 6) throw Error(ErrorKind::input, "frame needs 6 numbers");
    double v[6];
    for (int i = 0; i < 6; ++i) v[i] = parse_double(parts[static_cast<std::size_t>(i)]);
    return {{v[0], v[1], v[2], v[3]}, {v[4], v[5]}};
}

Shape parse_shape_tokens(const std::vector<std::string>& toks, std::size_t end) {
    if (end == 0) throw Error(ErrorKind::input, "empty shape specification");
    const std::string& kind = toks[0];
    const KeyValues kv = key_values(toks, 1, end);
    Shape shape = Shape::circle(1.0);
    if (kind == "circle") {
        reject_unknown(kv, {"r", "frame"});
        shape = Shape::circle(parse_double(require(kv, "r")));
    } else if (kind == "ellipse") {
        reject_unknown(kv, {"a", "b", "frame"});
        shape = Shape::ellipse(parse_double(require(kv, "a")), parse_double(require(kv, "b")));
    } else if (kind == "superellipse") {
        reject_unknown(kv, {"p", "frame"});
        shape = Shape::superellipse(parse_double(require(kv, "p")));
    } else if (kind == "smoothpoly") {
        reject_unknown(kv, {"r", "pts", "frame"});
        std::vector<Vec2> pts;
        for (std::string_view pair : split(strip_parens(require(kv, "pts")), ';')) {
            const auto xy = split(pair, ',');
            if (xy.size() != 2) throw Error(ErrorKind::input, "polygon point needs two coordinates");
            pts.push_back({parse_double(xy[0]), parse_double(xy[1])});
        }
        shape = Shape::smoothed_polygon(std::move(pts), parse_double(require(kv, "r")));
    } else {
        throw Error(ErrorKind::input, "unknown shape kind '" + kind + "'");
    }
    if (auto it = kv.find("frame"); it != kv.end()) shape = shape.mapped(parse_frame(it->second));
    return shape;
}

Placement parse_placement_tokens(const std::vector<std::string>& toks, std::size_t begin) {
    std::vector<std::string> flags;
    const KeyValues kv = key_values(toks, begin, toks.size(), &flags);
    reject_unknown(kv, {"scale", "rot", "dx", "dy"});
    Placement p;
    if (auto it = kv.find("scale"); it != kv.end()) p.scale = parse_double(it->second);
    if (auto it = kv.find("rot"); it != kv.end()) p.rotation = parse_double(it->second);
    if (auto it = kv.find("dx"); it != kv.end()) p.offset.x = parse_double(it->second);
    if (auto it = kv.find("dy"); it != kv.end()) p.offset.y = parse_double(it->second);
    for (const std::string& f : flags) {
        if (f != "reflect") throw Error(ErrorKind::input, "unknown placement flag '" + f + "'");
        p.reflect = true;
    }
    if (!(p.scale > 0.0)) throw Error(ErrorKind::input, "placement scale must be positive");
    return p;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty())
        throw Error(ErrorKind::input, "invalid number '" + std::string(s) + "'");
    return v;
}

long long parse_int(std::string_view s) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw Error(ErrorKind::input, "invalid integer '" + std::string(s) + "'");
    return v;
}

std::string format_vec(Vec2 v) { return "(" + format_double(v.x) + "," + format_double(v.y) + ")"; }

Vec2 parse_vec(std::string_view s) {
    const auto parts = split(strip_parens(s), ',');
    if (parts.size() != 2) throw Error(ErrorKind::input, "expected (x,y)");
    return {parse_double(parts[0]), parse_double(parts[1])};
}

std::string format_shape(const Shape& s) {
    std::string out;
    switch (s.kind()) {
        case ShapeKind::circle: out = "circle r=" + format_double(s.param0()); break;
        case ShapeKind::ellipse:
            out = "ellipse a=" + format_double(s.param0()) + " b=" + format_double(s.param1());
            break;
        case ShapeKind::superellipse: out = "superellipse p=" + format_double(s.param0()); break;
        case ShapeKind::smoothed_polygon: {
            out = "smoothpoly r=" + format_double(s.param0()) + " pts=(";
            bool first = true;
            for (Vec2 p : s.vertices()) {
                if (!first) out += ";";
                out += format_double(p.x) + "," + format_double(p.y);
                first = false;
            }
            out += ")";
            break;
        }
    }
    if (!s.frame().is_identity()) {
        const Affine& f = s.frame();
        out += " frame=(" + format_double(f.lin.a) + "," + format_double(f.lin.b) + "," + format_double(f.lin.c) + "," +
               format_double(f.lin.d) + "," + format_double(f.off.x) + "," + format_double(f.off.y) + ")";
    }
    return out;
}

std::string format_placement(const Placement& p) {
    std::string out = "@ scale=" + format_double(p.scale) + " rot=" + format_double(p.rotation) +
                      " dx=" + format_double(p.offset.x) + " dy=" + format_double(p.offset.y);
    if (p.reflect) out += " reflect";
    return out;
}

std::string format_shape_spec(const ShapeSpec& s) { return format_shape(s.shape) + " " + format_placement(s.placement); }

std::string format_region(const Region& r) {
    if (const auto* h = std::get_if<HalfPlane>(&r))
        return "halfplane n=" + format_vec(h->normal) + " d=" + format_double(h->offset);
    const auto& s = std::get<PlacedShape>(r);
    return format_shape_spec({*s.shape, s.placement});
}

ShapeSpec parse_shape_spec(std::string_view text) {
    const auto toks = tokenize(text);
    std::size_t at = toks.size();
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i] == "@") {
            at = i;
            break;
        }
    }
    ShapeSpec spec{parse_shape_tokens(toks, at), Placement{}};
    if (at < toks.size()) spec.placement = parse_placement_tokens(toks, at + 1);
    return spec;
}

Shape parse_shape(std::string_view text) {
    ShapeSpec s = parse_shape_spec(text);
    if (!(s.placement == Placement{})) return s.shape.mapped(s.placement.to_affine());
    return s.shape;
}

Region parse_region(std::string_view text) {
    const auto toks = tokenize(text);
    if (!toks.empty() && toks[0] == "halfplane") {
        const KeyValues kv = key_values(toks, 1, toks.size());
        reject_unknown(kv, {"n", "d"});
        const Vec2 n = parse_vec(require(kv, "n"));
        if (std::abs(norm(n) - 1.0) > 1e-12) throw Error(ErrorKind::input, "half-plane normal must be unit length");
        return HalfPlane{n, parse_double(require(kv, "d"))};
    }
    ShapeSpec s = parse_shape_spec(text);
    return PlacedShape{share(std::move(s.shape)), s.placement};
}

}  // namespace disklab
