#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "delaygrad/quadratic.hpp"

namespace delaygrad {

enum class SeriesMethod { Recurrence, PartialFractions };

/// The scalar contraction sequence b_0, b_1, ... driven by
///     b_0 = ... = b_tau = 1,   b_{k+1} = b_k - alpha * b_{k-tau},
/// i.e. the power-series coefficients of 1 / (1 - z + alpha z^(tau+1)).
struct CoefficientSeries {
    double alpha = 0.0;
    int tau = 0;
    std::vector<double> coeffs;  // b_0 .. b_K
    SeriesMethod method = SeriesMethod::Recurrence;
};

// The literal recurrence. This is the ground-truth path: exact by
// construction, and the oracle every closed-form route is tested against.
CoefficientSeries coeffs_recurrence(double alpha, int tau, int count_k);

// Closed form from the roots of the characteristic polynomial,
//     b_k = sum_i -1 / (pi'(zeta_i) * zeta_i^(k+1)),
// summed as real parts of conjugate pairs. Throws NearlyRepeatedRoots when
// the minimum pairwise root separation drops below 1e-8 * max|zeta| (the
// residue formula is then too ill-conditioned to trust); callers fall back
// to coeffs_recurrence.
CoefficientSeries coeffs_partial_fractions(double alpha, int tau, int count_k);

// Error trajectory of delayed gradient descent on a spectral problem,
// obtained coordinate-wise from the coefficient series: coordinate j of e_k
// is b_k(eta * a_j) * e0_j. Serves as the independent oracle for the
// simulation path.
std::vector<ErrorVector> dgd_closed_form_error(const QuadraticProblem& p,
                                               const Eigen::VectorXd& e0,
                                               double eta, int tau,
                                               int count_k);

/// Per-index results of the two-regime coefficient bound
///     |b_k| <= 1                    for k <  k0,
///     |b_k| <= 3 (1-alpha)^(k+1)    for k >= k0,
/// with k0 = geometric_regime_start(tau), plus the flat |b_k| <= 1 bound
/// that holds whenever alpha * tau <= 1.
struct CoefficientBoundCertificate {
    double alpha = 0.0;
    int tau = 0;
    int k0 = 0;
    bool flat_bound_applicable = false;  // alpha <= 1/tau (always for tau = 0)
    std::vector<bool> flat_ok;           // |b_k| <= 1, all k
    std::vector<bool> early_ok;          // |b_k| <= 1, k < k0
    std::vector<bool> geometric_ok;      // indexed from k0
    bool flat_pass = true;
    bool early_pass = true;
    bool geometric_pass = true;

    bool two_regime_pass() const { return early_pass && geometric_pass; }
};

// Scans the recurrence up to count_k (which must reach k0).
CoefficientBoundCertificate verify_coefficient_bounds(double alpha, int tau,
                                                      int count_k);

// CSV with columns k, b_k, bound_regime, bound_value.
std::string series_to_csv(const CoefficientSeries& s);

}  // namespace delaygrad
