#pragma once

// One-dimensional searches over angles shared by the support-function predicates.

#include <algorithm>
#include <cmath>
#include <vector>

namespace disklab::detail {

struct ArgMax {
    double value;
    double arg;
};

inline constexpr double kInvPhi = 0.6180339887498948482;

// Golden-section maximization of f on [lo, hi]; assumes f unimodal there.
template <class F>
ArgMax golden_max(F&& f, double lo, double hi, double tol = 1e-12) {
    double c = hi - kInvPhi * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    while (hi - lo > tol) {
        if (fc >= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - kInvPhi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + kInvPhi * (hi - lo);
            fd = f(d);
        }
    }
    return fc >= fd ? ArgMax{fc, c} : ArgMax{fd, d};
}

// Maximizes f over [lo, hi] by a uniform scan followed by golden refinement of the
// best `candidates` local maxima of the scan.
template <class F>
ArgMax scan_max(F&& f, double lo, double hi, int samples, int candidates, bool periodic) {
    const int n = std::max(samples, 3);
    const double step = periodic ? (hi - lo) / n : (hi - lo) / (n - 1);
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) vals[static_cast<std::size_t>(k)] = f(lo + step * k);

    std::vector<int> peaks;
    for (int k = 0; k < n; ++k) {
        double left, right;
        if (periodic) {
            left = vals[static_cast<std::size_t>((k + n - 1) % n)];
            right = vals[static_cast<std::size_t>((k + 1) % n)];
        } else {
            left = k > 0 ? vals[static_cast<std::size_t>(k - 1)] : -INFINITY;
            right = k + 1 < n ? vals[static_cast<std::size_t>(k + 1)] : -INFINITY;
        }
        const double v = vals[static_cast<std::size_t>(k)];
        if (v >= left && v >= right) peaks.push_back(k);
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) {
        return vals[static_cast<std::size_t>(a)] > vals[static_cast<std::size_t>(b)];
    });
    if (peaks.size() > static_cast<std::size_t>(candidates)) peaks.resize(static_cast<std::size_t>(candidates));

    ArgMax best{-INFINITY, lo};
    for (int k : peaks) {
        const double center = lo + step * k;
        double a = center - step;
        double b = center + step;
        if (!periodic) {
            a = std::max(a, lo);
            b = std::min(b, hi);
        }
        ArgMax r = golden_max(f, a, b);
        const double sampled = vals[static_cast<std::size_t>(k)];
        if (sampled > r.value) r = {sampled, center};
        if (r.value > best.value) best = r;
    }
    return best;
}

template <class F>
ArgMax maximize_angle(F&& f, int samples = 256, int candidates = 3) {
    return scan_max(f, 0.0, 2.0 * 3.14159265358979323846, samples, candidates, true);
}

}  // namespace disklab::detail
