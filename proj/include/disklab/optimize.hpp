#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace disklab {

using Objective = std::function<double(const std::vector<double>&)>;

struct LocalResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct BfgsOptions {
    int max_iterations = 100;
    double fd_step = 1e-5;       // central differences
    double gradient_tol = 1e-9;  // on the infinity norm
    double value_tol = 1e-13;    // relative decrease that counts as stalled
};

// Quasi-Newton minimization with central finite-difference gradients and an
// Armijo backtracking line search.
LocalResult minimize_bfgs(const Objective& f, std::vector<double> x0, const BfgsOptions& opt = {});

struct NelderMeadOptions {
    int max_evaluations = 4000;
    double initial_step = 0.1;
    double value_tol = 1e-15;
    double simplex_tol = 1e-13;
    int restarts = 2;  // re-inflate the simplex around the best vertex this many times
};

LocalResult minimize_nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt = {});

// Upper bound on worker threads: DISKLAB_THREADS when set and positive, otherwise
// the hardware concurrency (at least 1).
unsigned thread_budget();

// Runs body(i) for i in [0, n) over up to thread_budget() threads; each index
// writes only its own output slot, so results do not depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace disklab
