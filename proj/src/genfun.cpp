#include "delaygrad/genfun.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "delaygrad/errors.hpp"
#include "delaygrad/io.hpp"
#include "delaygrad/roots.hpp"
#include "delaygrad/thresholds.hpp"

namespace delaygrad {

CoefficientSeries coeffs_recurrence(double alpha, int tau, int count_k) {
    if (alpha < 0.0 || tau < 0 || count_k < 0) {
        throw InvalidArgument("coeffs_recurrence needs alpha, tau, K >= 0");
    }
    CoefficientSeries s;
    s.alpha = alpha;
    s.tau = tau;
    s.method = SeriesMethod::Recurrence;
    s.coeffs.resize(count_k + 1);
    for (int k = 0; k <= std::min(tau, count_k); ++k) s.coeffs[k] = 1.0;
    for (int k = tau; k < count_k; ++k) {
        s.coeffs[k + 1] = s.coeffs[k] - alpha * s.coeffs[k - tau];
    }
    return s;
}

CoefficientSeries coeffs_partial_fractions(double alpha, int tau, int count_k) {
    if (!(alpha > 0.0)) {
        throw InvalidArgument("coeffs_partial_fractions needs alpha > 0");
    }
    const RootSet rs = find_roots(alpha, tau);
    const int n = tau + 1;

    double max_mod = 0.0;
    for (const auto& z : rs.roots) max_mod = std::max(max_mod, std::abs(z));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(rs.roots[i] - rs.roots[j]) <= 1e-8 * max_mod) {
                throw NearlyRepeatedRoots(
                    "root separation below 1e-8 of the largest modulus");
            }
        }
    }

    // b_k = Re sum_i w_i * r_i^(k+1) with r_i = 1/zeta_i and
    // w_i = -1/pi'(zeta_i). Working with reciprocals keeps every power
    // bounded while the series converges.
    std::vector<std::complex<double>> weight(n), recip(n), pw(n);
    for (int i = 0; i < n; ++i) {
        weight[i] = -1.0 / char_poly_deriv(rs.roots[i], alpha, tau);
        recip[i] = 1.0 / rs.roots[i];
        pw[i] = recip[i];
    }

    CoefficientSeries s;
    s.alpha = alpha;
    s.tau = tau;
    s.method = SeriesMethod::PartialFractions;
    s.coeffs.resize(count_k + 1);
    for (int k = 0; k <= count_k; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (int i = 0; i < n; ++i) {
            acc += weight[i] * pw[i];
            pw[i] *= recip[i];
        }
        s.coeffs[k] = acc.real();
        if (std::abs(acc.imag()) > 1e-8 * (1.0 + std::abs(acc.real()))) {
            throw NoConvergence("partial-fraction sum left an imaginary residue");
        }
    }
    return s;
}

std::vector<ErrorVector> dgd_closed_form_error(const QuadraticProblem& p,
                                               const Eigen::VectorXd& e0,
                                               double eta, int tau,
                                               int count_k) {
    if (!p.spectral()) {
        throw InvalidArgument("closed-form trajectory needs a spectral problem");
    }
    if (e0.size() != p.dim()) throw DimensionMismatch("e0 has wrong dimension");
    if (!(eta > 0.0)) throw InvalidArgument("eta must be > 0");

    const int d = p.dim();
    std::vector<CoefficientSeries> per_coord(d);
    for (int j = 0; j < d; ++j) {
        per_coord[j] = coeffs_recurrence(eta * p.eigenvalues[j], tau, count_k);
    }
    std::vector<ErrorVector> out(count_k + 1);
    for (int k = 0; k <= count_k; ++k) {
        out[k].e.resize(d);
        for (int j = 0; j < d; ++j) {
            out[k].e[j] = per_coord[j].coeffs[k] * e0[j];
        }
    }
    return out;
}

CoefficientBoundCertificate verify_coefficient_bounds(double alpha, int tau,
                                                      int count_k) {
    const int k0 = geometric_regime_start(tau);
    if (count_k < k0) {
        throw InvalidArgument("verify_coefficient_bounds needs K >= k0");
    }
    const CoefficientSeries s = coeffs_recurrence(alpha, tau, count_k);

    CoefficientBoundCertificate cert;
    cert.alpha = alpha;
    cert.tau = tau;
    cert.k0 = k0;
    cert.flat_bound_applicable = tau == 0 ? alpha <= 1.0 : alpha * tau <= 1.0;

    // Rounding allowance: the recurrence accumulates O(K * eps) absolute
    // error on O(1) values.
    const double flat_cap = 1.0 + 1e-11;

    cert.flat_ok.resize(count_k + 1);
    cert.early_ok.resize(std::min(k0, count_k + 1));
    cert.geometric_ok.resize(count_k + 1 - k0);
    const double decay = 1.0 - alpha;
    double decay_pow = std::pow(decay, k0 + 1);
    for (int k = 0; k <= count_k; ++k) {
        const double mag = std::abs(s.coeffs[k]);
        const bool flat = mag <= flat_cap;
        cert.flat_ok[k] = flat;
        cert.flat_pass = cert.flat_pass && flat;
        if (k < k0) {
            cert.early_ok[k] = flat;
            cert.early_pass = cert.early_pass && flat;
        } else {
            const bool geo = mag <= 3.0 * decay_pow;
            cert.geometric_ok[k - k0] = geo;
            cert.geometric_pass = cert.geometric_pass && geo;
            decay_pow *= decay;
        }
    }
    return cert;
}

std::string series_to_csv(const CoefficientSeries& s) {
    const int k0 = geometric_regime_start(s.tau);
    std::ostringstream os;
    os << "k,b_k,bound_regime,bound_value\n";
    for (size_t k = 0; k < s.coeffs.size(); ++k) {
        const bool early = static_cast<int>(k) < k0;
        const double bound =
            early ? 1.0 : 3.0 * std::pow(1.0 - s.alpha, static_cast<double>(k + 1));
        os << k << ',' << fmt_g17(s.coeffs[k]) << ',' << (early ? 1 : 2) << ','
           << fmt_g17(bound) << '\n';
    }
    return os.str();
}

}  // namespace delaygrad
