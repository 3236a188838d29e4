#include "disklab/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace disklab {

namespace {

std::vector<double> fd_gradient(const Objective& f, std::vector<double>& x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        x[i] = xi + h;
        const double fp = f(x);
        x[i] = xi - h;
        const double fm = f(x);
        x[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

LocalResult minimize_bfgs(const Objective& f, std::vector<double> x, const BfgsOptions& opt) {
    const std::size_t n = x.size();
    LocalResult res;
    double fx = f(x);
    if (n == 0) return {x, fx, 0, true};

    // inverse Hessian approximation, row-major
    std::vector<double> H(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
    std::vector<double> g = fd_gradient(f, x, opt.fd_step);

    int it = 0;
    bool converged = false;
    for (; it < opt.max_iterations; ++it) {
        double gmax = 0.0;
        for (double gi : g) gmax = std::max(gmax, std::abs(gi));
        if (gmax < opt.gradient_tol) {
            converged = true;
            break;
        }
        std::vector<double> p(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) p[i] -= H[i * n + j] * g[j];
        double slope = dot(p, g);
        if (slope >= 0.0) {
            // not a descent direction: reset to steepest descent
            std::fill(H.begin(), H.end(), 0.0);
            for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0, p[i] = -g[i];
            slope = dot(p, g);
        }
        double step = 1.0;
        std::vector<double> xn(n);
        double fn = fx;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + step * p[i];
            fn = f(xn);
            if (fn <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            converged = true;  // no further decrease resolvable at this precision
            break;
        }
        std::vector<double> gn = fd_gradient(f, xn, opt.fd_step);
        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = xn[i] - x[i], y[i] = gn[i] - g[i];
        const double decrease = fx - fn;
        x = xn;
        g = gn;
        const double prev = fx;
        fx = fn;
        const double sy = dot(s, y);
        if (sy > 1e-16) {
            std::vector<double> Hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
            const double yHy = dot(y, Hy);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    H[i * n + j] += ((sy + yHy) * s[i] * s[j]) / (sy * sy) - (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
        }
        if (decrease <= opt.value_tol * std::max(1.0, std::abs(prev))) {
            converged = true;
            ++it;
            break;
        }
    }
    res.x = std::move(x);
    res.value = fx;
    res.iterations = it;
    res.converged = converged;
    return res;
}

LocalResult minimize_nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt) {
    const std::size_t n = x0.size();
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };
    std::vector<double> best = x0;
    double best_val = eval(x0);
    if (n == 0) return {best, best_val, 0, true};

    bool converged = false;
    double scale = opt.initial_step;
    for (int round = 0; round <= opt.restarts; ++round) {
        std::vector<std::vector<double>> simplex(n + 1, best);
        std::vector<double> vals(n + 1, best_val);
        for (std::size_t i = 0; i < n; ++i) {
            simplex[i + 1][i] += scale;
            vals[i + 1] = eval(simplex[i + 1]);
        }
        converged = false;
        while (evals < opt.max_evaluations) {
            std::vector<std::size_t> order(n + 1);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
            const std::size_t lo = order.front(), hi = order.back(), nh = order[n - 1];
            double spread = 0.0;
            for (std::size_t i = 0; i <= n; ++i)
                for (std::size_t j = 0; j < n; ++j) spread = std::max(spread, std::abs(simplex[i][j] - simplex[lo][j]));
            if (std::abs(vals[hi] - vals[lo]) <= opt.value_tol * (std::abs(vals[lo]) + 1e-300) + 1e-300 ||
                spread < opt.simplex_tol) {
                converged = true;
                break;
            }
            std::vector<double> centroid(n, 0.0);
            for (std::size_t i = 0; i <= n; ++i)
                if (i != hi)
                    for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
            auto along = [&](double t) {
                std::vector<double> p(n);
                for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (simplex[hi][j] - centroid[j]);
                return p;
            };
            std::vector<double> xr = along(-1.0);
            const double fr = eval(xr);
            if (fr < vals[lo]) {
                std::vector<double> xe = along(-2.0);
                const double fe = eval(xe);
                if (fe < fr) simplex[hi] = xe, vals[hi] = fe;
                else simplex[hi] = xr, vals[hi] = fr;
            } else if (fr < vals[nh]) {
                simplex[hi] = xr, vals[hi] = fr;
            } else {
                const bool outside = fr < vals[hi];
                std::vector<double> xc = along(outside ? -0.5 : 0.5);
                const double fc = eval(xc);
                if (fc < (outside ? fr : vals[hi])) {
                    simplex[hi] = xc, vals[hi] = fc;
                } else {
                    for (std::size_t i = 0; i <= n; ++i) {
                        if (i == lo) continue;
                        for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[lo][j] + 0.5 * (simplex[i][j] - simplex[lo][j]);
                        vals[i] = eval(simplex[i]);
                    }
                }
            }
        }
        const auto it = std::min_element(vals.begin(), vals.end());
        const std::size_t at = static_cast<std::size_t>(it - vals.begin());
        const bool improved = *it < best_val;
        if (improved) {
            best_val = *it;
            best = simplex[at];
        }
        if (evals >= opt.max_evaluations) break;
        scale *= 0.1;
    }
    return {best, best_val, evals, converged};
}

unsigned thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DISKLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min<long>(v, 1024));
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_budget(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace disklab
