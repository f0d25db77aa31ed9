#pragma once

#include <string>
#include <vector>

#include "delaygrad/bounds.hpp"
#include "delaygrad/dynamics.hpp"
#include "delaygrad/quadratic.hpp"

namespace delaygrad {

enum class WorstCaseKind { StrongLan, ConvexNesterov };

/// A hard instance for span-respecting first-order methods. Both kinds have
/// a tridiagonal Hessian and a linear term supported on the first
/// coordinate, so information propagates one coordinate per gradient query.
struct WorstCaseInstance {
    WorstCaseKind kind{};
    int dim = 0;
    double mu = 0.0;
    double lambda = 0.0;   // 0 for ConvexNesterov
    double q = 0.0;        // StrongLan decay ratio (sqrt(kappa)-1)/(sqrt(kappa)+1)
    int k_target = 0;      // ConvexNesterov: the iteration the block is sized to
    int active_block = 0;  // ConvexNesterov: leading block size m
    QuadraticProblem problem;
};

// F(w) = (lambda (kappa-1) / 4) (1/2 <Tw, w> - w_1) + (lambda/2) ||w||^2
// with T tridiagonal (2 on the diagonal, -1 off, last entry
// (sqrt(kappa)+3)/(sqrt(kappa)+1)). The minimizer is exactly
// (q, q^2, ..., q^d); the Hessian spectrum sits inside [lambda, mu].
// Requires mu > lambda > 0 and d >= 4.
WorstCaseInstance build_strong_instance(double mu, double lambda, int d);

// F(w) = (mu/4) (1/2 <A_m w, w> - w_1) where A_m is the leading m x m
// tridiagonal block (zero elsewhere) and m = 2 floor(k/(tau+1)) + 1.
// Requires tau+1 <= k <= (d-1)(tau+1)/2.
WorstCaseInstance build_convex_instance(double mu, int d, int k, int tau);

// Smallest dimension for which the strong construction supports checking
// iterations up to K under delay tau.
int strong_min_dimension(double mu, double lambda, int K, int tau);

/// Largest nonzero coordinate index (1-based; 0 for the zero vector) per
/// iterate, against the allowance floor(k/(tau+1)). Zero checks are bitwise:
/// the algorithms only ever form linear combinations of exact zeros outside
/// the reachable span.
struct SpanProfile {
    std::vector<int> max_nonzero_index;
    bool pass = true;
};

SpanProfile span_profile(const std::vector<Eigen::VectorXd>& iterates,
                         int tau);

enum class SpanAlgorithm { Dgd, IdleGd, IdleAgd };

std::string span_algorithm_name(SpanAlgorithm a);

// Runs the given span-respecting algorithm from w0 = 0 with iterates stored.
// DGD uses eta = 1/(20 mu (tau+1)); idle-GD steps with 1/(20 mu); idle-AGD
// picks its schedule from the instance kind.
Trajectory run_span_algorithm(const WorstCaseInstance& inst, SpanAlgorithm a,
                              int tau, int iterations);

/// Observed suboptimality against the matching lower-bound curve.
struct LowerBoundRow {
    int k = 0;
    double lower = 0.0;
    double observed = 0.0;
    double margin = 0.0;  // observed - lower
};

struct LowerBoundReport {
    WorstCaseKind kind{};
    SpanAlgorithm algorithm{};
    int tau = 0;
    std::vector<LowerBoundRow> rows;
    bool bound_pass = true;  // every margin >= 0
    bool span_pass = true;
};

// StrongLan: checks every k in [tau+1, K] on the one instance (the dimension
// must satisfy strong_min_dimension). ConvexNesterov: the construction is
// sized to a single iteration, so only k = k_target is checked; sweeps
// rebuild the instance per k.
LowerBoundReport verify_thm3(const WorstCaseInstance& inst, SpanAlgorithm a,
                             int tau, int iterations);

std::string lower_bound_report_to_json(const LowerBoundReport& r);

}  // namespace delaygrad
