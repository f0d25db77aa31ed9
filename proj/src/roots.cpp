#include "delaygrad/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "delaygrad/errors.hpp"
#include "delaygrad/thresholds.hpp"

namespace delaygrad {

namespace {

constexpr int kMaxDegree = 128;
constexpr int kNewtonSteps = 3;
constexpr double kRealPartTol = 1e-9;   // relative, imaginary part of a real root
constexpr double kClauseTol = 1e-12;    // relative slack on clause boundaries

template <typename T>
std::complex<T> powi(std::complex<T> base, int n) {
    std::complex<T> acc(T(1), T(0));
    while (n > 0) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

// Residuals are measured in extended precision so they reflect the accuracy
// of the root, not the rounding noise of a double evaluation at |z| ~ 1e6.
double residual_at(std::complex<double> z, double alpha, int tau) {
    const std::complex<long double> zl(z.real(), z.imag());
    const std::complex<long double> v =
        1.0L - zl + static_cast<long double>(alpha) * powi(zl, tau + 1);
    return static_cast<double>(std::abs(v));
}

bool leq_tol(double x, double y) { return x <= y + kClauseTol * (1.0 + std::abs(y)); }

}  // namespace

std::complex<double> char_poly(std::complex<double> z, double alpha, int tau) {
    return 1.0 - z + alpha * powi(z, tau + 1);
}

std::complex<double> char_poly_deriv(std::complex<double> z, double alpha,
                                     int tau) {
    return -1.0 + alpha * static_cast<double>(tau + 1) * powi(z, tau);
}

std::complex<double> reciprocal_poly(std::complex<double> y, double alpha,
                                     int tau) {
    return powi(y, tau + 1) - powi(y, tau) + alpha;
}

RootSet find_roots(double alpha, int tau) {
    if (!(alpha > 0.0)) throw InvalidArgument("find_roots needs alpha > 0");
    if (tau < 0 || tau + 1 > kMaxDegree) {
        throw InvalidArgument("find_roots needs 0 <= tau, tau + 1 <= 128");
    }
    const int n = tau + 1;

    // Companion matrix of y^n - y^(n-1) + alpha: subdiagonal ones, last
    // column (-alpha, 0, ..., 0, 1).
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    companion(0, n - 1) = -alpha;
    if (n >= 2) companion(n - 1, n - 1) = 1.0;
    if (n == 1) companion(0, 0) = 1.0 - alpha;

    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw NoConvergence("companion eigensolver failed");
    }

    RootSet rs;
    rs.alpha = alpha;
    rs.tau = tau;
    rs.roots.resize(n);
    for (int i = 0; i < n; ++i) {
        std::complex<double> z = 1.0 / es.eigenvalues()[i];
        for (int step = 0; step < kNewtonSteps; ++step) {
            const std::complex<double> d = char_poly_deriv(z, alpha, tau);
            if (std::abs(d) < 1e-12 * (1.0 + std::abs(z))) break;
            z -= char_poly(z, alpha, tau) / d;
        }
        rs.roots[i] = z;
    }

    std::sort(rs.roots.begin(), rs.roots.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  const double ma = std::abs(a), mb = std::abs(b);
                  if (ma != mb) return ma < mb;
                  if (a.real() != b.real()) return a.real() < b.real();
                  return a.imag() < b.imag();
              });

    rs.residual = 0.0;
    for (const auto& z : rs.roots) {
        rs.residual = std::max(rs.residual, residual_at(z, alpha, tau));
    }
    if (rs.residual >= 1e-9 * (1.0 + alpha)) {
        throw NoConvergence("root residual " + std::to_string(rs.residual) +
                            " above tolerance");
    }
    return rs;
}

RootCertificate certify_lemma1(double alpha, int tau) {
    RootCertificate cert;
    cert.root_set = find_roots(alpha, tau);
    const auto& roots = cert.root_set.roots;

    const std::complex<double> z1 = roots.front();
    cert.dominant_real = std::abs(z1.imag()) < kRealPartTol * std::abs(z1);
    cert.dominant_reciprocal = (1.0 / z1).real();
    cert.dominant_bound = leq_tol(cert.dominant_reciprocal, 1.0 - alpha);

    const double nondominant_cap = 1.0 - 3.0 / (2.0 * (tau + 1));
    cert.max_nondominant_reciprocal = 0.0;
    for (size_t i = 1; i < roots.size(); ++i) {
        cert.max_nondominant_reciprocal = std::max(
            cert.max_nondominant_reciprocal, std::abs(1.0 / roots[i]));
    }
    cert.nondominant_bound =
        roots.size() == 1 ||
        leq_tol(cert.max_nondominant_reciprocal, nondominant_cap);

    cert.min_derivative_magnitude = std::numeric_limits<double>::infinity();
    for (const auto& z : roots) {
        cert.min_derivative_magnitude = std::min(
            cert.min_derivative_magnitude, std::abs(char_poly_deriv(z, alpha, tau)));
    }
    cert.derivative_bound = cert.min_derivative_magnitude > 0.5 * (1.0 - kClauseTol);
    return cert;
}

std::pair<double, double> dominant_root_bracket(double alpha, int tau) {
    const double lo = 1.0 - 1.0 / (2.0 * (tau + 1));
    const double hi = 1.0 - alpha;
    const RootSet rs = find_roots(alpha, tau);
    const double r = (1.0 / rs.dominant()).real();
    const double slack = kClauseTol * (1.0 + std::abs(hi));
    if (!(r > lo - slack) || !(r <= hi + slack)) {
        throw BracketViolation("dominant reciprocal " + std::to_string(r) +
                               " outside (" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
    }
    return {lo, hi};
}

namespace {

nlohmann::json root_set_json(const RootSet& rs) {
    nlohmann::json j;
    j["alpha"] = rs.alpha;
    j["tau"] = rs.tau;
    j["residual"] = rs.residual;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& z : rs.roots) {
        arr.push_back({{"re", z.real()}, {"im", z.imag()}});
    }
    j["roots"] = arr;
    return j;
}

}  // namespace

std::string root_set_to_json(const RootSet& rs) {
    return root_set_json(rs).dump(2);
}

std::string certificate_to_json(const RootCertificate& cert) {
    nlohmann::json j;
    j["root_set"] = root_set_json(cert.root_set);
    j["clauses"] = {{"dominant_real", cert.dominant_real},
                    {"dominant_bound", cert.dominant_bound},
                    {"nondominant_bound", cert.nondominant_bound},
                    {"derivative_bound", cert.derivative_bound}};
    j["dominant_reciprocal"] = cert.dominant_reciprocal;
    j["max_nondominant_reciprocal"] = cert.max_nondominant_reciprocal;
    j["min_derivative_magnitude"] = cert.min_derivative_magnitude;
    j["all_pass"] = cert.all_pass();
    return j.dump(2);
}

}  // namespace delaygrad
