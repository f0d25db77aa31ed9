#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace delaygrad {

// The characteristic polynomial of the delayed error recursion,
//     pi_alpha(z) = 1 - z + alpha z^(tau+1),
// and its reciprocal-root companion p_alpha(y) = y^(tau+1) - y^tau + alpha.
std::complex<double> char_poly(std::complex<double> z, double alpha, int tau);
std::complex<double> char_poly_deriv(std::complex<double> z, double alpha,
                                     int tau);
std::complex<double> reciprocal_poly(std::complex<double> y, double alpha,
                                     int tau);

/// All tau+1 complex roots of pi_alpha, sorted by ascending modulus.
struct RootSet {
    double alpha = 0.0;
    int tau = 0;
    std::vector<std::complex<double>> roots;
    double residual = 0.0;  // max |pi_alpha(root)| over the set

    const std::complex<double>& dominant() const { return roots.front(); }
};

/// Numeric check of the root-geometry lemma clauses for a RootSet:
///  - the minimum-modulus root is real,
///  - its reciprocal is at most 1 - alpha,
///  - every other reciprocal has modulus at most 1 - 3/(2(tau+1)),
///  - |pi'_alpha| exceeds 1/2 at every root.
struct RootCertificate {
    RootSet root_set;
    bool dominant_real = false;
    bool dominant_bound = false;
    bool nondominant_bound = false;
    bool derivative_bound = false;

    double dominant_reciprocal = 0.0;
    double max_nondominant_reciprocal = 0.0;  // 0 when tau == 0
    double min_derivative_magnitude = 0.0;

    bool all_pass() const {
        return dominant_real && dominant_bound && nondominant_bound &&
               derivative_bound;
    }
};

// Roots via companion-matrix eigenvalues of the reciprocal polynomial (whose
// roots stay near the unit disk even when pi_alpha's are huge), inverted and
// then polished with three Newton steps on pi_alpha itself. Requires
// alpha > 0, 0 <= tau, tau + 1 <= 128. Throws NoConvergence when the final
// residual exceeds 1e-9 * (1 + alpha).
RootSet find_roots(double alpha, int tau);

// Evaluates all four clauses. Intended for alpha in (0, alpha_certified_limit],
// but runs (and simply records failures) outside that range.
RootCertificate certify_lemma1(double alpha, int tau);

// The analytic bracket (1 - 1/(2(tau+1)), 1 - alpha] for the dominant
// reciprocal root. Asserts that the computed 1/zeta_1 lies inside it and
// throws BracketViolation otherwise.
std::pair<double, double> dominant_root_bracket(double alpha, int tau);

std::string root_set_to_json(const RootSet& rs);
std::string certificate_to_json(const RootCertificate& cert);

}  // namespace delaygrad
