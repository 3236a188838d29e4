#pragma once

#include <string>

#include "disklab/chains.hpp"
#include "disklab/geometry.hpp"
#include "disklab/optimize.hpp"

namespace disklab {

struct FitConfig {
    int seeds = 8;                 // rotational seeds per orientation
    int coarse_directions = 720;   // directions in the first-stage residual
    NelderMeadOptions coarse{6000, 0.05, 1e-15, 1e-12, 2};
    NelderMeadOptions fine{3000, 0.002, 1e-16, 1e-13, 3};
};

struct FitResult {
    Affine transform;         // maps A onto (approximately) B
    bool similarity = false;  // fitted over similarities
    double scale = 1.0;       // similarity parameters
    double rotation = 0.0;
    bool reflect = false;
    double residual = 0.0;    // d_H(f(A), B) / diam(B)
    int restarts = 0;
    int evaluations = 0;
    bool converged = false;
};

// d_H(f(A), B) / diam(B).
double relative_residual(const Shape& a, const Affine& f, const Shape& b);

FitResult fit_affine(const Shape& a, const Shape& b, const FitConfig& cfg = {});
FitResult fit_similarity(const Shape& a, const Shape& b, bool allow_reflection, const FitConfig& cfg = {});

// The mirror image {(-x, y) : (x, y) in A}.
Shape reflected(const Shape& a);

struct StretchComparison {
    StretchEstimate a, b;
    int order = 0;  // +1: rho_A > rho_B certified, -1: rho_B > rho_A, 0: inconclusive
    std::string summary;
};

StretchComparison stretch_compare(const Shape& a, const Shape& b, int n_max, const ChainConfig& cfg = {});

enum class Mode { hom, sim };
enum class Relation { affine_equivalent, not_affine_equivalent, similar, similar_to_reflection, not_similar, undecided };

const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);
const char* relation_name(Relation r);

struct Verdict {
    Mode mode = Mode::hom;
    Relation relation = Relation::undecided;
    double residual = 0.0;
    double tau = 1e-3;
    FitResult fit;
    std::string note;
};

inline constexpr double kDefaultTau = 1e-3;

// Equivalent below tau, not equivalent above 10 tau, undecided in between.
Verdict classify_pair(const Shape& a, const Shape& b, Mode mode, double tau = kDefaultTau, const FitConfig& cfg = {});

// `verdict mode=<HOM|SIM> relation=<..> residual=<f> tau=<f>` followed by the transform.
std::string format_verdict(const Verdict& v);

}  // namespace disklab
