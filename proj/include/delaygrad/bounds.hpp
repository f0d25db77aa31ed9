#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "delaygrad/quadratic.hpp"

namespace delaygrad {

enum class Curvature { Strong, Convex };

enum class BoundKind {
    Thm1Upper,
    Thm2Upper,
    Thm3LowerStrong,
    Thm3LowerConvex,
    Thm4StrongUpper,
    Thm4ConvexUpper,
};

// Deterministic upper bounds for delayed gradient descent, valid for
// eta in (0, 1/(20 mu (tau+1))] and k >= geometric_regime_start(tau).
//   thm1: 5 mu (1 - eta lambda)^(2(k+1)) ||e0||^2        (lambda >= 0)
//   thm2: 9 ||e0||^2 / (4 e eta (k+1))                   (smooth convex)
// Throw PreconditionViolated naming the violated clause.
double thm1_upper(double mu, double lambda, double eta, int tau, double e0_sq,
                  int k);
double thm2_upper(double mu, double eta, int tau, double e0_sq, int k);

// Lower bounds for any span-respecting method, valid for k >= tau + 1:
//   Strong: (lambda/4) exp(-5k / ((sqrt(kappa)-1)(tau+1))) ||e0||^2
//   Convex: mu (tau+1)^2 ||e0||^2 / (45 k^2)
double thm3_lower(Curvature kind, double mu, double lambda, int tau, int k,
                  double e0_sq);

// Stochastic upper bounds (noise second moment sigma2), same eta and k
// validity region as thm1/thm2:
//   Strong: 5 mu exp(-2 eta lambda (k+1)) ||e0||^2
//           + (eta^2 sigma2 / 2) (mu (tau+1) ln(2(tau+1))
//                                 + (1 + e + ln(1/(eta lambda))) / (e eta))
//   Convex: 9 ||e0||^2 / (4 e eta (k+1))
//           + eta^2 sigma2 (mu (tau+1) ln(2(tau+1))
//                           + 9 (1 + ln(k+1)) / (2 e eta))
double thm4_upper(Curvature kind, double mu, double lambda, double eta,
                  int tau, double sigma2, double e0_sq, int k);

// Horizon-aware step-size choices. Both cap at 1/(20 mu tau) and need
// tau >= 1, k >= 1.
//   Strong: eta = clamp(ln(lambda mu ||e0||^2 k / sigma2) / (2 lambda k))
//           into [0, cap]; sigma2 = 0 maps to the cap.
//   Convex: eta = min(||e0|| / (sigma sqrt(k)), cap); sigma = 0 maps to cap.
double tune_eta_strong(double mu, double lambda, int tau, double sigma2,
                       double e0_sq, int k);
double tune_eta_convex(double mu, int tau, double sigma, double e0_norm,
                       int k);

// Exact E[F(w_k) - F*] for the delayed stochastic recursion under isotropic
// Gaussian noise on a spectral problem:
//   1/2 sum_j a_j (c_k^j e0_j)^2
//   + (eta^2 sigma2 / (2d)) sum_{i=0}^{k-tau-1} sum_j a_j (c_i^j)^2,
// where c_i^j are the coefficient-series values at alpha = eta a_j. The
// noise sum starts empty at k = tau: the first perturbed iterate is
// w_{tau+1}. Returned for k = 0..count_k.
std::vector<double> exact_expected_suboptimality(const QuadraticProblem& p,
                                                 const Eigen::VectorXd& e0,
                                                 double eta, int tau,
                                                 double sigma2, int count_k);

/// Golden-section verification of the power-function maxima used by the
/// stochastic bounds:
///   max_{0<a<1/eta} a(1-eta a)^k <= 1/(e eta k)              per k,
///   sum_i max a(1-eta a)^(2(i+1)) <= (1+ln(k+1))/(2 e eta)   per k,
///   the same sum over a > lambda   <= (1+e+ln(1/(eta lambda)))/(e eta).
struct PowerBoundCertificate {
    double eta = 0.0;
    int k_max = 0;
    double lambda = 0.0;  // 0: restricted variant not checked
    bool per_k_pass = true;
    bool harmonic_pass = true;
    bool restricted_pass = true;
    double worst_per_k_ratio = 0.0;  // max over k of observed/allowed
    double worst_harmonic_ratio = 0.0;
    double worst_restricted_ratio = 0.0;

    bool all_pass() const {
        return per_k_pass && harmonic_pass && restricted_pass;
    }
};

PowerBoundCertificate convex_power_bound_check(double eta, int k_max,
                                               double lambda = 0.0);

struct BoundParams {
    double mu = 1.0;
    double lambda = 0.0;
    double eta = 0.0;
    int tau = 0;
    double sigma2 = 0.0;
    double e0_sq = 1.0;
};

/// A bound curve with its validity region. Rows below valid_from_k (or with
/// an uncertified eta) are only produced under force=true and are flagged.
struct BoundReport {
    BoundKind kind{};
    BoundParams params{};
    int first_k = 0;  // index of values[0]
    std::vector<double> values;
    std::vector<bool> valid;
    int valid_from_k = 0;
    bool eta_valid = true;
    bool forced = false;
};

BoundReport evaluate_bound(BoundKind kind, const BoundParams& params,
                           int k_max, bool force = false);

std::string bound_kind_name(BoundKind kind);
std::string bound_report_to_csv(const BoundReport& r);
std::string bound_report_to_json(const BoundReport& r);

}  // namespace delaygrad
