#include "delaygrad/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "delaygrad/errors.hpp"
#include "delaygrad/genfun.hpp"
#include "delaygrad/io.hpp"
#include "delaygrad/thresholds.hpp"

namespace delaygrad {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw PreconditionViolated(what);
}

void check_step_window(double mu, double eta, int tau, int k) {
    require(mu > 0.0, "mu must be > 0");
    require(eta > 0.0, "eta must be > 0");
    require(eta <= max_certified_step(mu, tau) * (1.0 + 1e-12),
            "eta above 1/(20 mu (tau+1))");
    require(k >= geometric_regime_start(tau),
            "k below (tau+1) ln(2(tau+1))");
}

double burn_in_mass(double mu, int tau) {
    return mu * (tau + 1) * std::log(2.0 * (tau + 1));
}

}  // namespace

double thm1_upper(double mu, double lambda, double eta, int tau, double e0_sq,
                  int k) {
    check_step_window(mu, eta, tau, k);
    require(lambda >= 0.0 && lambda <= mu, "lambda must lie in [0, mu]");
    return 5.0 * mu * std::pow(1.0 - eta * lambda, 2.0 * (k + 1)) * e0_sq;
}

double thm2_upper(double mu, double eta, int tau, double e0_sq, int k) {
    check_step_window(mu, eta, tau, k);
    return 9.0 * e0_sq / (4.0 * M_E * eta * (k + 1));
}

double thm3_lower(Curvature kind, double mu, double lambda, int tau, int k,
                  double e0_sq) {
    require(k >= tau + 1, "k must be at least tau + 1");
    require(mu > 0.0, "mu must be > 0");
    if (kind == Curvature::Strong) {
        require(lambda > 0.0 && mu > lambda, "Strong needs mu > lambda > 0");
        const double root_kappa = std::sqrt(mu / lambda);
        return 0.25 * lambda *
               std::exp(-5.0 * k / ((root_kappa - 1.0) * (tau + 1))) * e0_sq;
    }
    return mu * (tau + 1.0) * (tau + 1.0) * e0_sq /
           (45.0 * static_cast<double>(k) * k);
}

double thm4_upper(Curvature kind, double mu, double lambda, double eta,
                  int tau, double sigma2, double e0_sq, int k) {
    check_step_window(mu, eta, tau, k);
    require(sigma2 >= 0.0, "sigma2 must be >= 0");
    if (kind == Curvature::Strong) {
        require(lambda > 0.0, "Strong needs lambda > 0");
        const double head =
            5.0 * mu * std::exp(-2.0 * eta * lambda * (k + 1)) * e0_sq;
        if (sigma2 == 0.0) return head;
        const double tail = burn_in_mass(mu, tau) +
                            (1.0 + M_E + std::log(1.0 / (eta * lambda))) /
                                (M_E * eta);
        return head + 0.5 * eta * eta * sigma2 * tail;
    }
    const double head = 9.0 * e0_sq / (4.0 * M_E * eta * (k + 1));
    if (sigma2 == 0.0) return head;
    const double tail =
        burn_in_mass(mu, tau) +
        9.0 * (1.0 + std::log(k + 1.0)) / (2.0 * M_E * eta);
    return head + eta * eta * sigma2 * tail;
}

double tune_eta_strong(double mu, double lambda, int tau, double sigma2,
                       double e0_sq, int k) {
    if (!(lambda > 0.0) || k < 1 || tau < 1) {
        throw InvalidArgument("tune_eta_strong needs lambda > 0, k, tau >= 1");
    }
    const double cap = 1.0 / (20.0 * mu * tau);
    if (sigma2 == 0.0) return cap;
    const double arg = lambda * mu * e0_sq * k / sigma2;
    if (!(arg > 0.0)) return 0.0;
    const double t = std::log(arg) / (2.0 * lambda * k);
    if (t < 0.0) return 0.0;
    return std::min(t, cap);
}

double tune_eta_convex(double mu, int tau, double sigma, double e0_norm,
                       int k) {
    if (k < 1 || tau < 1 || sigma < 0.0) {
        throw InvalidArgument("tune_eta_convex needs sigma >= 0, k, tau >= 1");
    }
    const double cap = 1.0 / (20.0 * mu * tau);
    if (sigma == 0.0) return cap;
    return std::min(e0_norm / (sigma * std::sqrt(static_cast<double>(k))),
                    cap);
}

std::vector<double> exact_expected_suboptimality(const QuadraticProblem& p,
                                                 const Eigen::VectorXd& e0,
                                                 double eta, int tau,
                                                 double sigma2, int count_k) {
    if (!p.spectral()) {
        throw InvalidArgument("the expectation oracle needs a spectral problem");
    }
    if (e0.size() != p.dim()) throw DimensionMismatch("e0 has wrong dimension");
    if (!(eta > 0.0) || tau < 0 || count_k < 0 || sigma2 < 0.0) {
        throw InvalidArgument("need eta > 0, tau >= 0, K >= 0, sigma2 >= 0");
    }
    const int d = p.dim();
    std::vector<CoefficientSeries> series(d);
    for (int j = 0; j < d; ++j) {
        series[j] = coeffs_recurrence(eta * p.eigenvalues[j], tau, count_k);
    }

    // noise_mass[m] = sum_{i<=m} sum_j a_j c_i^2; the expectation at k uses
    // the prefix ending at k - tau - 1 (noise first enters at iterate tau+1).
    std::vector<double> noise_mass(count_k + 1, 0.0);
    double acc = 0.0;
    for (int i = 0; i <= count_k; ++i) {
        for (int j = 0; j < d; ++j) {
            const double c = series[j].coeffs[i];
            acc += p.eigenvalues[j] * c * c;
        }
        noise_mass[i] = acc;
    }

    const double noise_scale = eta * eta * sigma2 / (2.0 * d);
    std::vector<double> out(count_k + 1);
    for (int k = 0; k <= count_k; ++k) {
        double det = 0.0;
        for (int j = 0; j < d; ++j) {
            const double ce = series[j].coeffs[k] * e0[j];
            det += p.eigenvalues[j] * ce * ce;
        }
        out[k] = 0.5 * det;
        if (k >= tau + 1) out[k] += noise_scale * noise_mass[k - tau - 1];
    }
    return out;
}

namespace {

// Golden-section maximization of a unimodal function on [lo, hi].
template <typename F>
double golden_max(F f, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(b)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return std::max({f(a), f(b), f1, f2});
}

}  // namespace

PowerBoundCertificate convex_power_bound_check(double eta, int k_max,
                                               double lambda) {
    if (!(eta > 0.0) || k_max < 1) {
        throw InvalidArgument("convex_power_bound_check needs eta > 0, k >= 1");
    }
    if (lambda > 0.0 && lambda >= 1.0 / eta) {
        throw InvalidArgument("restricted check needs lambda < 1/eta");
    }
    PowerBoundCertificate cert;
    cert.eta = eta;
    cert.k_max = k_max;
    cert.lambda = lambda;

    const double hi = 1.0 / eta;
    auto power = [eta](double a, double expo) {
        return a * std::pow(1.0 - eta * a, expo);
    };

    for (int k = 1; k <= k_max; ++k) {
        const double observed =
            golden_max([&](double a) { return power(a, k); }, 0.0, hi);
        const double allowed = 1.0 / (M_E * eta * k);
        cert.worst_per_k_ratio =
            std::max(cert.worst_per_k_ratio, observed / allowed);
        if (observed > allowed * (1.0 + 1e-9)) cert.per_k_pass = false;
    }

    // The corollaries sum the even-power maxima with exponents 2(i+1); the
    // prefix ending at i is capped by (1+ln(i+1))/(2 e eta) and, over the
    // lambda-restricted domain, by the k-free (1+e+ln(1/(eta lambda)))/(e eta).
    double harmonic_sum = 0.0;
    double restricted_sum = 0.0;
    const double restricted_cap =
        lambda > 0.0
            ? (1.0 + M_E + std::log(1.0 / (eta * lambda))) / (M_E * eta)
            : 0.0;
    for (int i = 0; i <= k_max; ++i) {
        const double expo = 2.0 * (i + 1);
        harmonic_sum +=
            golden_max([&](double a) { return power(a, expo); }, 0.0, hi);
        const double harmonic_cap =
            (1.0 + std::log(i + 1.0)) / (2.0 * M_E * eta);
        cert.worst_harmonic_ratio =
            std::max(cert.worst_harmonic_ratio, harmonic_sum / harmonic_cap);
        if (harmonic_sum > harmonic_cap * (1.0 + 1e-9)) {
            cert.harmonic_pass = false;
        }

        if (lambda > 0.0) {
            restricted_sum += golden_max(
                [&](double a) { return power(a, expo); }, lambda, hi);
            cert.worst_restricted_ratio = std::max(
                cert.worst_restricted_ratio, restricted_sum / restricted_cap);
            if (restricted_sum > restricted_cap * (1.0 + 1e-9)) {
                cert.restricted_pass = false;
            }
        }
    }
    return cert;
}

namespace {

double bound_value(BoundKind kind, const BoundParams& q, int k) {
    switch (kind) {
        case BoundKind::Thm1Upper:
            return thm1_upper(q.mu, q.lambda, q.eta, q.tau, q.e0_sq, k);
        case BoundKind::Thm2Upper:
            return thm2_upper(q.mu, q.eta, q.tau, q.e0_sq, k);
        case BoundKind::Thm3LowerStrong:
            return thm3_lower(Curvature::Strong, q.mu, q.lambda, q.tau, k,
                              q.e0_sq);
        case BoundKind::Thm3LowerConvex:
            return thm3_lower(Curvature::Convex, q.mu, q.lambda, q.tau, k,
                              q.e0_sq);
        case BoundKind::Thm4StrongUpper:
            return thm4_upper(Curvature::Strong, q.mu, q.lambda, q.eta, q.tau,
                              q.sigma2, q.e0_sq, k);
        case BoundKind::Thm4ConvexUpper:
            return thm4_upper(Curvature::Convex, q.mu, q.lambda, q.eta, q.tau,
                              q.sigma2, q.e0_sq, k);
    }
    throw InvalidArgument("unknown bound kind");
}

// The raw formula with no precondition checks, for forced evaluation.
double bound_value_unchecked(BoundKind kind, const BoundParams& q, int k) {
    switch (kind) {
        case BoundKind::Thm1Upper:
            return 5.0 * q.mu *
                   std::pow(1.0 - q.eta * q.lambda, 2.0 * (k + 1)) * q.e0_sq;
        case BoundKind::Thm2Upper:
            return 9.0 * q.e0_sq / (4.0 * M_E * q.eta * (k + 1));
        case BoundKind::Thm3LowerStrong: {
            const double rk = std::sqrt(q.mu / q.lambda);
            return 0.25 * q.lambda *
                   std::exp(-5.0 * k / ((rk - 1.0) * (q.tau + 1))) * q.e0_sq;
        }
        case BoundKind::Thm3LowerConvex:
            return k == 0 ? std::numeric_limits<double>::infinity()
                          : q.mu * (q.tau + 1.0) * (q.tau + 1.0) * q.e0_sq /
                                (45.0 * static_cast<double>(k) * k);
        case BoundKind::Thm4StrongUpper: {
            const double head = 5.0 * q.mu *
                                std::exp(-2.0 * q.eta * q.lambda * (k + 1)) *
                                q.e0_sq;
            if (q.sigma2 == 0.0) return head;
            return head + 0.5 * q.eta * q.eta * q.sigma2 *
                              (burn_in_mass(q.mu, q.tau) +
                               (1.0 + M_E + std::log(1.0 / (q.eta * q.lambda))) /
                                   (M_E * q.eta));
        }
        case BoundKind::Thm4ConvexUpper: {
            const double head = 9.0 * q.e0_sq / (4.0 * M_E * q.eta * (k + 1));
            if (q.sigma2 == 0.0) return head;
            return head + q.eta * q.eta * q.sigma2 *
                              (burn_in_mass(q.mu, q.tau) +
                               9.0 * (1.0 + std::log(k + 1.0)) /
                                   (2.0 * M_E * q.eta));
        }
    }
    throw InvalidArgument("unknown bound kind");
}

bool is_lower(BoundKind kind) {
    return kind == BoundKind::Thm3LowerStrong ||
           kind == BoundKind::Thm3LowerConvex;
}

}  // namespace

BoundReport evaluate_bound(BoundKind kind, const BoundParams& params,
                           int k_max, bool force) {
    BoundReport r;
    r.kind = kind;
    r.params = params;
    r.forced = force;
    r.valid_from_k = is_lower(kind) ? params.tau + 1
                                    : geometric_regime_start(params.tau);
    r.eta_valid =
        is_lower(kind) ||
        (params.eta > 0.0 &&
         params.eta <= max_certified_step(params.mu, params.tau) *
                           (1.0 + 1e-12));
    if (!force) {
        if (!r.eta_valid) {
            throw PreconditionViolated("eta above 1/(20 mu (tau+1))");
        }
        if (k_max < r.valid_from_k) {
            throw PreconditionViolated("k_max below the bound's first valid k");
        }
        // Surface parameter problems (bad lambda etc.) immediately.
        (void)bound_value(kind, params, r.valid_from_k);
    }
    r.first_k = force ? 0 : r.valid_from_k;
    for (int k = r.first_k; k <= k_max; ++k) {
        r.values.push_back(bound_value_unchecked(kind, params, k));
        r.valid.push_back(r.eta_valid && k >= r.valid_from_k);
    }
    return r;
}

std::string bound_kind_name(BoundKind kind) {
    switch (kind) {
        case BoundKind::Thm1Upper: return "thm1_upper";
        case BoundKind::Thm2Upper: return "thm2_upper";
        case BoundKind::Thm3LowerStrong: return "thm3_lower_strong";
        case BoundKind::Thm3LowerConvex: return "thm3_lower_convex";
        case BoundKind::Thm4StrongUpper: return "thm4_upper_strong";
        case BoundKind::Thm4ConvexUpper: return "thm4_upper_convex";
    }
    return "unknown";
}

std::string bound_report_to_csv(const BoundReport& r) {
    std::ostringstream os;
    os << "k,value,valid,kind\n";
    const std::string name = bound_kind_name(r.kind);
    for (size_t i = 0; i < r.values.size(); ++i) {
        os << csv_line({static_cast<long long>(r.first_k + i), r.values[i],
                        r.valid[i] ? 1 : 0, name});
    }
    return os.str();
}

std::string bound_report_to_json(const BoundReport& r) {
    nlohmann::json j;
    j["kind"] = bound_kind_name(r.kind);
    j["params"] = {{"mu", r.params.mu},         {"lambda", r.params.lambda},
                   {"eta", r.params.eta},       {"tau", r.params.tau},
                   {"sigma2", r.params.sigma2}, {"e0_sq", r.params.e0_sq}};
    j["first_k"] = r.first_k;
    j["valid_from_k"] = r.valid_from_k;
    j["eta_valid"] = r.eta_valid;
    j["forced"] = r.forced;
    j["values"] = r.values;
    std::vector<int> valid(r.valid.begin(), r.valid.end());
    j["valid"] = valid;
    return j.dump(2);
}

}  // namespace delaygrad
