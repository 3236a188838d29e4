#include "disklab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "disklab/detail/search.hpp"
#include "disklab/shape_io.hpp"

namespace disklab {

namespace {

constexpr double kPenalty = 1e3;

// Square root of a symmetric positive definite matrix.
Mat2 sym_sqrt(const Mat2& m) {
    const double s = std::sqrt(m.det());
    const double t = std::sqrt(m.a + m.d + 2.0 * s);
    return Mat2{m.a + s, m.b, m.c, m.d + s} * (1.0 / t);
}

double principal_angle(const Mat2& cov) { return 0.5 * std::atan2(2.0 * cov.b, cov.a - cov.d); }

const Mat2 kMirror = Mat2::diag(-1.0, 1.0);

// Hausdorff distance of f(A) and B. At a best fit the support difference has many
// near-equal peaks, so every one of them gets refined.
double fitted_distance(const Shape& a, const Affine& f, const Shape& b) {
    const Shape fa = a.mapped(f);
    auto diff = [&](double t) {
        const Vec2 u = unit_at(t);
        return std::abs(fa.support(u) - b.support(u));
    };
    return detail::maximize_angle(diff, 2048, 32).value;
}

struct Target {
    const Shape& a;
    const Shape& b;
    double diam_b;
    std::vector<Vec2> dirs;
    std::vector<double> hb;

    Target(const Shape& a_, const Shape& b_, int directions) : a(a_), b(b_), diam_b(diameter(b_)) {
        for (int i = 0; i < directions; ++i) {
            dirs.push_back(unit_at(2.0 * kPi * i / directions));
            hb.push_back(b.support(dirs.back()));
        }
    }

    double coarse(const Affine& f) const {
        const Mat2 lt = f.lin.transposed();
        double worst = 0.0;
        for (std::size_t i = 0; i < dirs.size(); ++i)
            worst = std::max(worst, std::abs(a.support(lt * dirs[i]) + dot(f.off, dirs[i]) - hb[i]));
        return worst / diam_b;
    }

    double fine(const Affine& f) const { return fitted_distance(a, f, b) / diam_b; }
};

// Parametrization of the candidate maps; x is dimensionless.
struct Family {
    bool similarity;
    bool reflect;
    double ks;      // diam B / diam A
    double diam_b;

    Affine to_affine(const std::vector<double>& x) const {
        if (similarity) {
            Mat2 l = Mat2::rotation(x[1]) * (ks * std::exp(x[0]));
            if (reflect) l = l * kMirror;
            return {l, Vec2{x[2], x[3]} * diam_b};
        }
        return {Mat2{x[0], x[1], x[2], x[3]} * ks, Vec2{x[4], x[5]} * diam_b};
    }

    bool degenerate(const Affine& f) const { return !(std::abs(f.lin.det()) > 1e-12 * ks * ks); }
};

struct Seeded {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    bool converged = false;
};

// max c.x subject to A x <= b, x >= 0, with b >= 0 so the origin is feasible.
// Dense tableau simplex with Bland's rule.
std::vector<double> maximize_lp(const std::vector<std::vector<double>>& A, const std::vector<double>& b, const std::vector<double>& c) {
    const std::size_t m = A.size(), n = c.size(), w = n + m + 1;
    std::vector<std::vector<double>> t(m + 1, std::vector<double>(w, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
        t[i][n + i] = 1.0;
        t[i][w - 1] = b[i];
        basis[i] = n + i;
    }
    for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];
    for (int iter = 0; iter < 500; ++iter) {
        std::size_t enter = w;
        for (std::size_t j = 0; j + 1 < w; ++j)
            if (t[m][j] < -1e-14) {
                enter = j;
                break;
            }
        if (enter == w) break;
        std::size_t leave = m;
        double ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i)
            if (t[i][enter] > 1e-14) {
                const double r = t[i][w - 1] / t[i][enter];
                if (r < ratio || (r == ratio && basis[i] < basis[leave])) ratio = r, leave = i;
            }
        if (leave == m) break;  // unbounded; cannot happen with the box rows
        const double piv = t[leave][enter];
        for (double& v : t[leave]) v /= piv;
        for (std::size_t i = 0; i <= m; ++i)
            if (i != leave && t[i][enter] != 0.0) {
                const double f = t[i][enter];
                for (std::size_t j = 0; j < w; ++j) t[i][j] -= f * t[leave][j];
            }
        basis[leave] = enter;
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) x[basis[i]] = t[i][w - 1];
    return x;
}

struct Peak {
    double angle;
    double sign;
    double value;
};

// Local maxima of |h_f(A) - h_B| with refined angles.
std::vector<Peak> difference_peaks(const Shape& a, const Affine& f, const Shape& b, int samples, int count) {
    const Shape fa = a.mapped(f);
    auto diff = [&](double t) {
        const Vec2 u = unit_at(t);
        return fa.support(u) - b.support(u);
    };
    auto mag = [&](double t) { return std::abs(diff(t)); };
    const double step = 2.0 * kPi / samples;
    std::vector<double> vals(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) vals[static_cast<std::size_t>(k)] = mag(step * k);
    std::vector<int> idx;
    for (int k = 0; k < samples; ++k) {
        const double v = vals[static_cast<std::size_t>(k)];
        if (v >= vals[static_cast<std::size_t>((k + samples - 1) % samples)] && v >= vals[static_cast<std::size_t>((k + 1) % samples)])
            idx.push_back(k);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](int p, int q) { return vals[static_cast<std::size_t>(p)] > vals[static_cast<std::size_t>(q)]; });
    if (idx.size() > static_cast<std::size_t>(count)) idx.resize(static_cast<std::size_t>(count));
    std::vector<Peak> out;
    for (int k : idx) {
        const detail::ArgMax r = detail::golden_max(mag, step * k - step, step * k + step);
        const double d = diff(r.arg);
        out.push_back({r.arg, d < 0.0 ? -1.0 : 1.0, std::abs(d)});
    }
    return out;
}

// Minimax polish: linearize the largest peaks of the support difference in the map
// parameters and take trust-region steps from the resulting small LP.
std::vector<double> chebyshev_polish(const Target& target, const Family& fam, std::vector<double> x, double value, int& evals) {
    const std::size_t n = x.size();
    double radius = 1e-3;
    for (int round = 0; round < 80 && radius > 1e-13 && value > 0.0; ++round) {
        const Affine f = fam.to_affine(x);
        const std::vector<Peak> peaks = difference_peaks(target.a, f, target.b, 2048, 32);
        // per-peak gradients by central differences at fixed angles
        std::vector<std::vector<double>> grad(peaks.size(), std::vector<double>(n));
        const double h = 1e-7;
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const Shape ap = target.a.mapped(fam.to_affine(xp)), am = target.a.mapped(fam.to_affine(xm));
            for (std::size_t i = 0; i < peaks.size(); ++i) {
                const Vec2 u = unit_at(peaks[i].angle);
                grad[i][j] = peaks[i].sign * (ap.support(u) - am.support(u)) / (2.0 * h * target.diam_b);
            }
        }
        // d = y - radius, z = top - s; maximize s
        double top = 0.0;
        for (std::size_t i = 0; i < peaks.size(); ++i) {
            double l1 = 0.0;
            for (double g : grad[i]) l1 += std::abs(g);
            top = std::max(top, peaks[i].value / target.diam_b + l1 * radius);
        }
        std::vector<std::vector<double>> A;
        std::vector<double> b;
        for (std::size_t i = 0; i < peaks.size(); ++i) {
            std::vector<double> row(grad[i]);
            double shift = 0.0;
            for (double g : grad[i]) shift += g * radius;
            row.push_back(1.0);
            A.push_back(row);
            b.push_back(std::max(0.0, top + shift - peaks[i].value / target.diam_b));
        }
        for (std::size_t j = 0; j <= n; ++j) {
            std::vector<double> row(n + 1, 0.0);
            row[j] = 1.0;
            A.push_back(row);
            b.push_back(j < n ? 2.0 * radius : top);
        }
        std::vector<double> c(n + 1, 0.0);
        c[n] = 1.0;
        const std::vector<double> y = maximize_lp(A, b, c);
        std::vector<double> xn = x;
        for (std::size_t j = 0; j < n; ++j) xn[j] += y[j] - radius;
        const Affine g = fam.to_affine(xn);
        const double vn = fam.degenerate(g) ? kPenalty : target.fine(g);
        ++evals;
        if (vn < value) {
            x = std::move(xn);
            value = vn;
            radius = std::min(2.0 * radius, 0.1);
        } else {
            radius *= 0.25;
        }
    }
    return x;
}

// Coarse search from every seed, then a fine polish of the best one.
Seeded optimize(const Target& target, const Family& fam, const std::vector<std::vector<double>>& seeds, const FitConfig& cfg) {
    std::vector<Seeded> runs(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t s) {
        int evals = 0;
        auto f = [&](const std::vector<double>& x) {
            ++evals;
            const Affine g = fam.to_affine(x);
            return fam.degenerate(g) ? kPenalty : target.coarse(g);
        };
        const LocalResult r = minimize_nelder_mead(f, seeds[s], cfg.coarse);
        runs[s] = {r.x, r.value, evals, r.converged};
    });
    std::size_t best = 0;
    int total = 0;
    for (std::size_t s = 0; s < runs.size(); ++s) {
        total += runs[s].evaluations;
        if (runs[s].value < runs[best].value) best = s;
    }
    int evals = 0;
    auto f = [&](const std::vector<double>& x) {
        ++evals;
        const Affine g = fam.to_affine(x);
        return fam.degenerate(g) ? kPenalty : target.fine(g);
    };
    const LocalResult r = minimize_nelder_mead(f, runs[best].x, cfg.fine);
    std::vector<double> x = chebyshev_polish(target, fam, r.x, r.value, evals);
    const double value = f(x);
    return {std::move(x), value, total + evals, r.converged};
}

FitResult finish(const Target& target, const Family& fam, const Seeded& s, int restarts) {
    FitResult out;
    out.transform = fam.to_affine(s.x);
    out.similarity = fam.similarity;
    out.reflect = fam.reflect;
    if (fam.similarity) {
        out.scale = fam.ks * std::exp(s.x[0]);
        out.rotation = std::remainder(s.x[1], 2.0 * kPi);
    }
    out.residual = target.fine(out.transform);
    out.restarts = restarts;
    out.evaluations = s.evaluations;
    out.converged = s.converged;
    return out;
}

}  // namespace

double relative_residual(const Shape& a, const Affine& f, const Shape& b) {
    return fitted_distance(a, f, b) / diameter(b);
}

Shape reflected(const Shape& a) { return a.mapped({kMirror, {}}); }

FitResult fit_affine(const Shape& a, const Shape& b, const FitConfig& cfg) {
    if (cfg.seeds < 1) throw Error(ErrorKind::input, "fit needs at least one seed");
    const Target target(a, b, cfg.coarse_directions);
    const Family fam{false, false, target.diam_b / diameter(a), target.diam_b};
    const Moments ma = moments(a), mb = moments(b);
    const Mat2 root_b = sym_sqrt(mb.covariance), inv_root_a = sym_sqrt(ma.covariance).inverse();
    std::vector<std::vector<double>> seeds;
    for (bool mirror : {false, true})
        for (int k = 0; k < cfg.seeds; ++k) {
            Mat2 l = root_b * Mat2::rotation(2.0 * kPi * k / cfg.seeds);
            if (mirror) l = l * kMirror;
            l = l * inv_root_a;
            const Vec2 t = mb.centroid - l * ma.centroid;
            seeds.push_back({l.a / fam.ks, l.b / fam.ks, l.c / fam.ks, l.d / fam.ks, t.x / fam.diam_b, t.y / fam.diam_b});
        }
    return finish(target, fam, optimize(target, fam, seeds, cfg), static_cast<int>(seeds.size()));
}

FitResult fit_similarity(const Shape& a, const Shape& b, bool allow_reflection, const FitConfig& cfg) {
    if (cfg.seeds < 1) throw Error(ErrorKind::input, "fit needs at least one seed");
    const Target target(a, b, cfg.coarse_directions);
    const Moments ma = moments(a), mb = moments(b);
    const double ks = target.diam_b / diameter(a);
    const double s0 = std::pow(mb.covariance.det() / ma.covariance.det(), 0.25);
    FitResult best;
    best.residual = std::numeric_limits<double>::infinity();
    int restarts = 0;
    for (bool mirror : {false, true}) {
        if (mirror && !allow_reflection) break;
        const Family fam{true, mirror, ks, target.diam_b};
        const Mat2 cov_a = mirror ? kMirror * ma.covariance * kMirror : ma.covariance;
        const Vec2 ca = mirror ? kMirror * ma.centroid : ma.centroid;
        const double base = principal_angle(mb.covariance) - principal_angle(cov_a);
        std::vector<std::vector<double>> seeds;
        for (int k = 0; k < cfg.seeds; ++k) {
            const double th = base + 2.0 * kPi * k / cfg.seeds;
            const Vec2 t = mb.centroid - Mat2::rotation(th) * ca * s0;
            seeds.push_back({std::log(s0 / ks), th, t.x / fam.diam_b, t.y / fam.diam_b});
        }
        restarts += static_cast<int>(seeds.size());
        const FitResult r = finish(target, fam, optimize(target, fam, seeds, cfg), restarts);
        // ties keep the unreflected branch
        if (r.residual < best.residual) best = r;
    }
    best.restarts = restarts;
    return best;
}

StretchComparison stretch_compare(const Shape& a, const Shape& b, int n_max, const ChainConfig& cfg) {
    if (n_max < 2) throw Error(ErrorKind::input, "stretch comparison needs n_max >= 2");
    StretchComparison out;
    out.a = stretch_bounds(a, FamilyTag::sim, n_max, cfg);
    out.b = stretch_bounds(b, FamilyTag::sim, n_max, cfg);
    if (out.a.certified_lower > out.b.sigma1_upper) out.order = 1;
    else if (out.b.certified_lower > out.a.sigma1_upper) out.order = -1;
    auto line = [](const char* name, const StretchEstimate& e) {
        return std::string(name) + ": certified_lower=" + format_double(e.certified_lower) + " heuristic=" + format_double(e.heuristic) +
               " sigma1_upper=" + format_double(e.sigma1_upper);
    };
    out.summary = line("A", out.a) + "\n" + line("B", out.b) + "\n";
    out.summary += out.order > 0 ? "order: rho_A > rho_B" : out.order < 0 ? "order: rho_B > rho_A" : "order: inconclusive";
    out.summary += "\n";
    return out;
}

const char* mode_name(Mode m) { return m == Mode::hom ? "HOM" : "SIM"; }

Mode parse_mode(const std::string& s) {
    if (s == "hom" || s == "HOM") return Mode::hom;
    if (s == "sim" || s == "SIM") return Mode::sim;
    throw Error(ErrorKind::input, "unknown mode '" + s + "' (expected hom or sim)");
}

const char* relation_name(Relation r) {
    switch (r) {
        case Relation::affine_equivalent: return "affine-equivalent";
        case Relation::not_affine_equivalent: return "not-affine-equivalent";
        case Relation::similar: return "similar";
        case Relation::similar_to_reflection: return "similar-to-reflection";
        case Relation::not_similar: return "not-similar";
        case Relation::undecided: return "undecided";
    }
    return "undecided";
}

Verdict classify_pair(const Shape& a, const Shape& b, Mode mode, double tau, const FitConfig& cfg) {
    if (!(tau > 0.0)) throw Error(ErrorKind::input, "tau must be positive");
    Verdict v;
    v.mode = mode;
    v.tau = tau;
    if (mode == Mode::hom) {
        v.fit = fit_affine(a, b, cfg);
    } else {
        v.fit = fit_similarity(a, b, false, cfg);
        if (!(v.fit.residual < tau)) {
            const FitResult mirrored = fit_similarity(reflected(a), b, false, cfg);
            if (mirrored.residual < v.fit.residual) {
                v.fit = mirrored;
                // express the map on A itself
                v.fit.reflect = true;
                v.fit.transform = v.fit.transform.compose({kMirror, {}});
            }
        }
    }
    v.residual = v.fit.residual;
    if (v.residual < tau) {
        v.relation = mode == Mode::hom ? Relation::affine_equivalent : v.fit.reflect ? Relation::similar_to_reflection : Relation::similar;
        v.note = "same graph class";
    } else if (v.residual > 10.0 * tau) {
        v.relation = mode == Mode::hom ? Relation::not_affine_equivalent : Relation::not_similar;
        v.note = mode == Mode::hom ? "classes incomparable" : "classes distinct, possibly nested";
    } else {
        v.relation = Relation::undecided;
        v.note = "residual inside the undecided band";
    }
    return v;
}

std::string format_verdict(const Verdict& v) {
    const Affine& f = v.fit.transform;
    std::string s = std::string("verdict mode=") + mode_name(v.mode) + " relation=" + relation_name(v.relation) +
                    " residual=" + format_double(v.residual) + " tau=" + format_double(v.tau);
    if (v.fit.similarity)
        s += " scale=" + format_double(v.fit.scale) + " rotation=" + format_double(v.fit.rotation) + " reflect=" + (v.fit.reflect ? "1" : "0");
    s += " lin=(" + format_double(f.lin.a) + "," + format_double(f.lin.b) + "," + format_double(f.lin.c) + "," + format_double(f.lin.d) +
         ") off=" + format_vec(f.off) + " note=\"" + v.note + "\"\n";
    return s;
}

}  // namespace disklab
