#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace delaygrad {

/// A positive semi-definite quadratic objective
///     F(w) = 1/2 w' A w + b' w + c,
/// stored either in spectral form (A diagonal in the working basis) or as a
/// dense symmetric matrix. The minimizer and minimum value are resolved at
/// construction time; problems whose linear term leaves them unbounded below
/// are rejected.
struct QuadraticProblem {
    // Spectral form: `eigenvalues` holds the diagonal of A and `dense_a` is
    // empty. Dense form: `dense_a` is the full matrix and `eigenvalues` holds
    // its numerically computed spectrum (ascending).
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd dense_a;
    Eigen::VectorXd linear;   // b
    double offset = 0.0;      // c
    double mu = 0.0;          // smoothness (largest eigenvalue bound)
    double lambda = 0.0;      // strong convexity (smallest eigenvalue bound)
    Eigen::VectorXd w_star;   // minimum-norm minimizer
    double f_star = 0.0;

    bool spectral() const { return dense_a.size() == 0; }
    int dim() const { return static_cast<int>(linear.size()); }
};

// e = w - w_star. Kept as a named type because several routines traffic in
// error-space rather than iterate-space sequences.
struct ErrorVector {
    Eigen::VectorXd e;
};

double evaluate(const QuadraticProblem& p, const Eigen::VectorXd& w);
Eigen::VectorXd gradient(const QuadraticProblem& p, const Eigen::VectorXd& w);

// F(w) - f_star, guarded against tiny negative rounding residue.
double suboptimality(const QuadraticProblem& p, const Eigen::VectorXd& w);

// Minimum-norm solution of A w = -b for diagonal A, or nullopt when b has a
// component in ker(A) above 1e-9 * ||b|| (the objective is then unbounded
// below). Eigenvalues at or below `kernel_eig_tol * max(a)` count as zero.
std::optional<Eigen::VectorXd> minimizer_spectral(const Eigen::VectorXd& a,
                                                  const Eigen::VectorXd& b);

// Same contract for a dense symmetric PSD matrix.
std::optional<Eigen::VectorXd> minimizer_dense(const Eigen::MatrixXd& a,
                                               const Eigen::VectorXd& b);

// Constructors. Throw UnboundedBelow when no minimizer exists and
// InvalidArgument on malformed input (negative eigenvalues, asymmetry, ...).
QuadraticProblem make_spectral_problem(Eigen::VectorXd eigenvalues,
                                       Eigen::VectorXd b, double c);
QuadraticProblem make_dense_problem(Eigen::MatrixXd a, Eigen::VectorXd b,
                                    double c);
// Dense constructor with caller-supplied (mu, lambda) envelope; the computed
// spectrum must lie in [lambda - 1e-8, mu + 1e-8].
QuadraticProblem make_dense_problem(Eigen::MatrixXd a, Eigen::VectorXd b,
                                    double c, double mu_bound,
                                    double lambda_bound);

/// Random spectral instance with eigenvalues uniform in [lambda, mu] (the
/// endpoints are always forced so the advertised mu/lambda are attained),
/// w_star on the unit sphere, and ||w0 - w_star|| = e0_norm. Deterministic in
/// `seed`.
std::pair<QuadraticProblem, Eigen::VectorXd> random_instance(
    int d, double lambda, double mu, double e0_norm, std::uint64_t seed);

std::string problem_to_json(const QuadraticProblem& p);
QuadraticProblem problem_from_json(const std::string& text);

}  // namespace delaygrad
