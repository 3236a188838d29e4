#include "disklab/chains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "disklab/detail/search.hpp"
#include "disklab/shape_io.hpp"

namespace disklab {

namespace {

constexpr Vec2 kRight{1.0, 0.0};
constexpr Vec2 kUp{0.0, 1.0};

// Disk orientations of a chain; scales and offsets follow from them.
struct Pose {
    std::vector<double> angles;
    std::vector<char> reflect;
};

// Places each oriented disk so it spans the strip 0 <= y <= 1 and pushes every
// disk as far right as contact with its predecessor allows.
std::vector<Placement> lay_out(const ShapePtr& shape, const Pose& pose) {
    const std::size_t n = pose.angles.size();
    std::vector<Placement> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Placement p{1.0, pose.angles[i], {}, pose.reflect[i] != 0};
        const PlacedShape unit{shape, p};
        const double below = unit.support(-kUp);
        p.scale = 1.0 / (unit.support(kUp) + below);
        p.offset.y = p.scale * below;
        if (i == 0) {
            p.offset.x = p.scale * unit.support(-kRight);
        } else {
            Placement q = p;
            q.offset.x = out[i - 1].offset.x;
            const Interval reach = translation_range({shape, out[i - 1]}, {shape, q}, kRight);
            q.offset.x += reach.hi;
            p = q;
        }
        out[i] = p;
    }
    return out;
}

double projected_length(const Chain& c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const PlacedShape d = c.disk(i);
        lo = std::min(lo, -d.support(-c.strip.u));
        hi = std::max(hi, d.support(c.strip.u));
    }
    return (hi - lo) / c.strip.width();
}

Chain canonical_chain(const ShapePtr& shape, FamilyTag family, const Pose& pose) {
    Chain c;
    c.shape = shape;
    c.family = family;
    c.placements = lay_out(shape, pose);
    return c;
}

double pose_length(const ShapePtr& shape, const Pose& pose) {
    Chain c;
    c.shape = shape;
    c.placements = lay_out(shape, pose);
    return projected_length(c);
}

double angle_of(Vec2 u) { return std::atan2(u.y, u.x); }

Pose pose_of(const Chain& c) {
    const double base = angle_of(c.strip.u);
    Pose p;
    for (const Placement& q : c.placements) {
        p.angles.push_back(q.rotation - base);
        p.reflect.push_back(q.reflect ? 1 : 0);
    }
    return p;
}

Placement move_placement(const Placement& p, double angle, Vec2 shift) {
    const Mat2 r = Mat2::rotation(angle);
    return {p.scale, p.rotation + angle, r * p.offset + shift, p.reflect};
}

// Threshold a chain length must beat to leave room for the bbox margin and strictness.
double exceed_threshold(int m) { return m + 1e-3; }

}  // namespace

ChainReport chain_check(const Chain& chain) {
    if (chain.placements.empty()) throw Error(ErrorKind::input, "chain has no disks");
    if (!chain.shape) throw Error(ErrorKind::input, "chain has no shape");
    if (!(chain.strip.d2 > chain.strip.d1)) throw Error(ErrorKind::input, "strip needs d2 > d1");
    if (std::abs(norm(chain.strip.u) - 1.0) > 1e-12) throw Error(ErrorKind::input, "strip direction must be unit length");
    ChainReport rep;
    rep.valid = true;
    const Vec2 nrm = chain.strip.normal();
    auto fail = [&](std::string msg) {
        rep.valid = false;
        rep.violations.push_back(std::move(msg));
    };
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const PlacedShape d = chain.disk(i);
        const std::string tag = "disk " + std::to_string(i + 1);
        if (!family_admits(chain.family, d.placement))
            fail(tag + ": placement not admitted by family " + family_name(chain.family));
        const double bottom = -d.support(-nrm);
        const double top = d.support(nrm);
        if (std::abs(bottom - chain.strip.d1) > kGeoTol)
            fail(tag + ": misses line d1 by " + format_double(bottom - chain.strip.d1));
        if (std::abs(top - chain.strip.d2) > kGeoTol)
            fail(tag + ": misses line d2 by " + format_double(top - chain.strip.d2));
    }
    rep.strict = true;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const Region a = chain.disk(i), b = chain.disk(i + 1);
        const double sd = signed_distance(a, b);
        rep.gaps.push_back(sd);
        if (sd > kGeoTol) fail("disks " + std::to_string(i + 1) + "," + std::to_string(i + 2) + " are apart by " + format_double(sd));
        if (!(sd < -kGeoTol)) rep.strict = false;
    }
    rep.strict = rep.strict && rep.valid;
    rep.length = projected_length(chain);
    return rep;
}

Chain move_chain(const Chain& c, double angle, Vec2 shift) {
    Chain out = c;
    const Mat2 r = Mat2::rotation(angle);
    out.strip.u = r * c.strip.u;
    const double along = dot(shift, out.strip.normal());
    out.strip.d1 += along;
    out.strip.d2 += along;
    for (Placement& p : out.placements) p = move_placement(p, angle, shift);
    return out;
}

Chain max_chain(const Shape& shape, FamilyTag family, int n, const ChainConfig& cfg, const std::vector<Chain>& warm_starts) {
    if (n < 1) throw Error(ErrorKind::input, "chain needs n >= 1");
    const ShapePtr sp = share(shape);
    const std::size_t nn = static_cast<std::size_t>(n);
    if (family == FamilyTag::hom) return canonical_chain(sp, family, {std::vector<double>(nn, 0.0), std::vector<char>(nn, 0)});

    std::vector<Pose> starts;
    starts.push_back({std::vector<double>(nn, 0.0), std::vector<char>(nn, 0)});
    starts.push_back({std::vector<double>(nn, kPi / 2.0), std::vector<char>(nn, 0)});
    for (int s = 2; s < cfg.starts; ++s) {
        std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(s));
        Pose p;
        for (std::size_t i = 0; i < nn; ++i) {
            p.angles.push_back(std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng));
            p.reflect.push_back(family == FamilyTag::sim_refl ? static_cast<char>(rng() & 1u) : 0);
        }
        starts.push_back(std::move(p));
    }
    for (const Chain& w : warm_starts) {
        if (w.size() != nn) throw Error(ErrorKind::input, "warm start has the wrong number of disks");
        Pose p = pose_of(w);
        if (family != FamilyTag::sim_refl) std::fill(p.reflect.begin(), p.reflect.end(), 0);
        starts.push_back(std::move(p));
    }

    struct Outcome {
        Pose pose;
        double length = 0.0;
        bool converged = false;
    };
    std::vector<Outcome> results(starts.size());
    parallel_for(starts.size(), [&](std::size_t s) {
        const Pose& start = starts[s];
        auto objective = [&](const std::vector<double>& x) {
            return -pose_length(sp, {x, start.reflect});
        };
        const LocalResult r = minimize_bfgs(objective, start.angles, cfg.bfgs);
        results[s] = {{r.x, start.reflect}, -r.value, r.converged};
    });
    std::size_t best = 0;
    for (std::size_t s = 1; s < results.size(); ++s)
        if (results[s].length > results[best].length) best = s;

    Chain c = canonical_chain(sp, family, results[best].pose);
    c.warning = !results[best].converged;
    return c;
}

Chain concatenate(const Chain& c1, const Chain& c2) {
    if (c1.placements.empty() || c2.placements.empty()) throw Error(ErrorKind::input, "cannot concatenate an empty chain");
    if (!c1.shape || !c2.shape || !(*c1.shape == *c2.shape)) throw Error(ErrorKind::input, "chains use different shapes");
    if (c1.family != c2.family) throw Error(ErrorKind::input, "chains use different families");
    if (std::abs(c1.strip.width() - c2.strip.width()) > kGeoTol) throw Error(ErrorKind::input, "strip widths differ");
    // rigid motion taking strip 2 onto strip 1
    const double turn = angle_of(c1.strip.u) - angle_of(c2.strip.u);
    Chain moved = move_chain(c2, turn, {0.0, 0.0});
    moved = move_chain(moved, 0.0, c1.strip.normal() * (c1.strip.d1 - moved.strip.d1));
    const PlacedShape last = c1.disk(c1.size() - 1);
    Chain at_last = move_chain(moved, 0.0, dot(last.placement.offset - moved.placements.front().offset, c1.strip.u) * c1.strip.u);
    const double t = translation_range(last, at_last.disk(0), c1.strip.u).hi;
    at_last = move_chain(at_last, 0.0, c1.strip.u * t);
    Chain out = c1;
    out.shape = c1.shape;
    out.warning = c1.warning || c2.warning;
    out.placements.insert(out.placements.end(), at_last.placements.begin(), at_last.placements.end());
    return out;
}

double single_disk_upper_bound(const Shape& shape, FamilyTag family) {
    const ShapePtr sp = share(shape);
    auto ratio = [&](double theta) {
        const PlacedShape d{sp, {1.0, theta, {}, false}};
        return (d.support(kRight) + d.support(-kRight)) / (d.support(kUp) + d.support(-kUp));
    };
    if (family == FamilyTag::hom) return ratio(0.0);
    // The ratio has period pi; reflections only revisit the same values.
    constexpr int samples = 10000;
    const double step = kPi / samples;
    std::vector<double> vals(samples + 1);
    for (int i = 0; i <= samples; ++i) vals[static_cast<std::size_t>(i)] = ratio(i * step);
    double top = 0.0, slope = 0.0;
    for (int i = 0; i < samples; ++i) {
        top = std::max(top, vals[static_cast<std::size_t>(i)]);
        slope = std::max(slope, std::abs(vals[static_cast<std::size_t>(i) + 1] - vals[static_cast<std::size_t>(i)]) / step);
    }
    // Any angle is within step/2 of a sample; the observed slope is doubled as safety.
    return top + 2.0 * slope * (step / 2.0);
}

StretchEstimate stretch_bounds(const Shape& shape, FamilyTag family, int n_max, const ChainConfig& cfg) {
    if (n_max < 2) throw Error(ErrorKind::input, "stretch bounds need n_max >= 2");
    StretchEstimate est;
    est.family = family;
    est.sigma1_upper = single_disk_upper_bound(shape, family);
    for (int n = 1; n <= n_max; ++n) {
        std::vector<Chain> warm;
        if (n > 1) {
            Chain ext = est.chains.back();
            ext.placements.push_back(ext.placements.back());
            warm.push_back(std::move(ext));
            for (int a = 1; a <= n / 2; ++a)
                warm.push_back(concatenate(est.chains[static_cast<std::size_t>(a - 1)], est.chains[static_cast<std::size_t>(n - a - 1)]));
        }
        Chain c = max_chain(shape, family, n, cfg, warm);
        est.warning = est.warning || c.warning;
        est.sigma.push_back(projected_length(c));
        est.chains.push_back(std::move(c));
    }
    est.certified_lower = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n_max; ++k)
        est.certified_lower = std::max(est.certified_lower, (est.sigma[static_cast<std::size_t>(k - 1)] - est.sigma1_upper) / k);
    est.heuristic = est.sigma.back() / n_max;
    return est;
}

double hom_chain_length(const Shape& shape, int n, Axis axis) {
    if (n < 1) throw Error(ErrorKind::input, "chain needs n >= 1");
    const PlacedShape d{share(shape), {}};
    const Box b = bounding_box(d);
    if (axis == Axis::horizontal) {
        const double c = translation_range(d, d, kRight).hi;
        return ((n - 1) * c + b.width()) / b.height();
    }
    const double c = translation_range(d, d, kUp).hi;
    return ((n - 1) * c + b.height()) / b.width();
}

int min_k_exceeding(const Shape& shape, FamilyTag family, int m, const ChainConfig& cfg) {
    if (m < 1) throw Error(ErrorKind::input, "m must be >= 1");
    const int k_max = 4 * m + 8;
    const double target = exceed_threshold(m);
    if (family == FamilyTag::hom) {
        for (int k = 1; k <= k_max; ++k)
            if (hom_chain_length(shape, k, Axis::horizontal) > target && hom_chain_length(shape, k, Axis::vertical) > target) return k;
        throw Error(ErrorKind::construction, "no strict chain longer than " + std::to_string(m) + " with k <= " + std::to_string(k_max));
    }
    // Rotating a horizontal similarity chain by 90 degrees gives a vertical one.
    std::vector<Chain> best;
    for (int k = 1; k <= k_max; ++k) {
        std::vector<Chain> warm;
        if (!best.empty()) {
            Chain ext = best.back();
            ext.placements.push_back(ext.placements.back());
            warm.push_back(std::move(ext));
        }
        Chain c = max_chain(shape, family, k, cfg, warm);
        if (projected_length(c) > target) return k;
        best.push_back(std::move(c));
    }
    throw Error(ErrorKind::construction, "no strict chain longer than " + std::to_string(m) + " with k <= " + std::to_string(k_max));
}

namespace {

// Homothets of the bbox-scaled shape, uniformly spaced to fill [-delta, 1+delta]
// along the axis, band j across it.
Chain hom_strict_chain(const ShapePtr& sp, int m, int k, Axis axis, int j, double delta) {
    const PlacedShape d{sp, {}};
    const Box b = bounding_box(d);
    const bool horiz = axis == Axis::horizontal;
    const double across = horiz ? b.height() : b.width();
    const double along = horiz ? b.width() : b.height();
    const double lo_along = horiz ? b.x1 : b.y1;
    const double lo_across = horiz ? b.y1 : b.x1;
    const double s = 1.0 / (m * across);
    const double step = (1.0 + 2.0 * delta - s * along) / (k - 1);
    Chain c;
    c.shape = sp;
    c.family = FamilyTag::hom;
    const double band = static_cast<double>(j - 1) / m;
    if (horiz) c.strip = {{1.0, 0.0}, band, static_cast<double>(j) / m};
    else c.strip = {{0.0, 1.0}, -static_cast<double>(j) / m, -band};
    for (int i = 0; i < k; ++i) {
        const double a = -delta - s * lo_along + i * step;
        const double t = band - s * lo_across;
        c.placements.push_back({s, 0.0, horiz ? Vec2{a, t} : Vec2{t, a}, false});
    }
    return c;
}

// Optimized similarity chain squeezed along the strip to span exactly 1 + 2 delta,
// scaled into band [(j-1)/m, j/m].
Chain sim_strict_chain(const Chain& best, int m, int j, double delta) {
    const std::size_t k = best.size();
    std::vector<double> steps(k, 0.0);
    for (std::size_t i = 1; i < k; ++i) steps[i] = best.placements[i].offset.x - best.placements[i - 1].offset.x;
    auto extent = [&](double lambda, double* left) {
        double x = best.placements[0].offset.x;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < k; ++i) {
            if (i > 0) x += lambda * steps[i];
            Placement p = best.placements[i];
            p.offset.x = x;
            const PlacedShape d{best.shape, p};
            lo = std::min(lo, -d.support(-kRight));
            hi = std::max(hi, d.support(kRight));
        }
        if (left) *left = lo;
        return hi - lo;
    };
    const double goal = m * (1.0 + 2.0 * delta);  // in units of the width-1 strip
    double a = 0.0, b = 1.0;
    if (!(extent(1.0, nullptr) > goal)) throw Error(ErrorKind::construction, "optimized chain is too short for the bounding box");
    if (extent(0.0, nullptr) > goal) throw Error(ErrorKind::construction, "a single disk is already wider than the bounding box");
    for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
        const double mid = 0.5 * (a + b);
        (extent(mid, nullptr) > goal ? b : a) = mid;
    }
    double left = 0.0;
    extent(a, &left);
    Chain c = best;
    c.strip = {{1.0, 0.0}, static_cast<double>(j - 1) / m, static_cast<double>(j) / m};
    double x = best.placements[0].offset.x;
    for (std::size_t i = 0; i < k; ++i) {
        if (i > 0) x += a * steps[i];
        Placement& p = c.placements[i];
        p.offset.x = x - left;
        p.scale /= m;
        p.offset = p.offset / m + Vec2{-delta, static_cast<double>(j - 1) / m};
    }
    return c;
}

}  // namespace

StrictChain strict_chain_with_bbox(const Shape& shape, FamilyTag family, int m, Axis axis, int j, const ChainConfig& cfg) {
    if (m < 1 || j < 1 || j > m) throw Error(ErrorKind::input, "band index out of range");
    int k = min_k_exceeding(shape, family, m, cfg);
    auto hom_long = [&](int kk) {
        return hom_chain_length(shape, kk, Axis::horizontal) > exceed_threshold(m) && hom_chain_length(shape, kk, Axis::vertical) > exceed_threshold(m);
    };
    // A single rotated copy can be longer than m; the glue still needs two disks,
    // so fall back to the shortest homothet chain that is long enough.
    if (k < 2) {
        k = 2;
        while (!hom_long(k)) ++k;
    }
    const double delta = 1e-4 / m;
    const ShapePtr sp = share(shape);
    StrictChain out{{}, k, delta};
    const bool hom_enough = hom_long(k);
    if (family == FamilyTag::hom || hom_enough) {
        out.chain = hom_strict_chain(sp, m, k, axis, j, delta);
        out.chain.family = family;
    } else {
        const Chain best = max_chain(shape, family, k, cfg);
        if (axis == Axis::horizontal) {
            out.chain = sim_strict_chain(best, m, j, delta);
        } else {
            // band [-j/m, -(j-1)/m] turned by +90 degrees lands on column [(j-1)/m, j/m]
            Chain row = sim_strict_chain(best, m, 1, delta);
            row = move_chain(row, 0.0, {0.0, -static_cast<double>(j) / m});
            out.chain = move_chain(row, kPi / 2.0, {0.0, 0.0});
        }
    }
    const ChainReport rep = chain_check(out.chain);
    if (!rep.strict) {
        std::string msg = "strict chain check failed; gaps:";
        for (double g : rep.gaps) msg += " " + format_double(g);
        for (const std::string& v : rep.violations) msg += "; " + v;
        throw Error(ErrorKind::construction, msg);
    }
    return out;
}

std::string format_chain(const Chain& c) {
    std::ostringstream os;
    os << "strip u=" << format_vec(c.strip.u) << " d1=" << format_double(c.strip.d1) << " d2=" << format_double(c.strip.d2)
       << " family=" << family_name(c.family) << "\n";
    for (const Placement& p : c.placements) os << format_shape_spec({*c.shape, p}) << "\n";
    return os.str();
}

Chain parse_chain(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string line;
    Chain c;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
        if (!header) {
            std::istringstream hs(line);
            std::string tok;
            hs >> tok;
            if (tok != "strip") throw Error(ErrorKind::input, "chain must start with a strip line");
            bool have_u = false, have_d1 = false, have_d2 = false;
            while (hs >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) throw Error(ErrorKind::input, "bad strip field '" + tok + "'");
                const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                if (key == "u") c.strip.u = parse_vec(val), have_u = true;
                else if (key == "d1") c.strip.d1 = parse_double(val), have_d1 = true;
                else if (key == "d2") c.strip.d2 = parse_double(val), have_d2 = true;
                else if (key == "family") c.family = parse_family(val);
                else throw Error(ErrorKind::input, "unknown strip field '" + key + "'");
            }
            if (!have_u || !have_d1 || !have_d2) throw Error(ErrorKind::input, "strip line needs u, d1 and d2");
            if (!(c.strip.d2 > c.strip.d1)) throw Error(ErrorKind::input, "strip needs d2 > d1");
            header = true;
            continue;
        }
        ShapeSpec s = parse_shape_spec(line);
        if (!c.shape) c.shape = share(std::move(s.shape));
        else if (!(*c.shape == s.shape)) throw Error(ErrorKind::input, "all disks of a chain must share one shape");
        c.placements.push_back(s.placement);
    }
    if (!header) throw Error(ErrorKind::input, "missing strip line");
    if (c.placements.empty()) throw Error(ErrorKind::input, "chain has no disks");
    return c;
}

}  // namespace disklab
