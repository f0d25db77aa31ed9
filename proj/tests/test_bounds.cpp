#include <doctest.h>

#include <cmath>

#include "delaygrad/bounds.hpp"
#include "delaygrad/dynamics.hpp"
#include "delaygrad/errors.hpp"
#include "delaygrad/quadratic.hpp"
#include "delaygrad/thresholds.hpp"

using namespace delaygrad;

TEST_CASE("thm1 value and preconditions") {
    CHECK(thm1_upper(1.0, 0.1, 0.025, 1, 1.0, 10) ==
          doctest::Approx(5.0 * std::pow(0.9975, 22.0)).epsilon(1e-14));
    // lambda = 0 gives the constant formula limit.
    CHECK(thm1_upper(1.0, 0.0, 0.025, 1, 2.0, 10) == doctest::Approx(10.0));
    CHECK_THROWS_AS(thm1_upper(1.0, 0.1, 0.025, 1, 1.0, 2),
                    PreconditionViolated);  // 2 < 2 ln 4
    CHECK_THROWS_AS(thm1_upper(1.0, 0.1, 0.03, 1, 1.0, 10),
                    PreconditionViolated);  // eta above the cap
    // Decreasing in k.
    CHECK(thm1_upper(1.0, 0.1, 0.025, 1, 1.0, 11) <
          thm1_upper(1.0, 0.1, 0.025, 1, 1.0, 10));
}

TEST_CASE("thm2 value and scalings") {
    const double v = thm2_upper(1.0, 0.025, 1, 1.0, 10);
    CHECK(v == doctest::Approx(9.0 / (4.0 * M_E * 0.025 * 11)).epsilon(1e-14));
    CHECK(thm2_upper(1.0, 0.025, 1, 2.0, 10) == doctest::Approx(2.0 * v));
    CHECK(thm2_upper(1.0, 0.025, 1, 1.0, 21) == doctest::Approx(0.5 * v));
}

TEST_CASE("thm3 values and scalings") {
    CHECK(thm3_lower(Curvature::Strong, 100.0, 1.0, 1, 9, 1.0) ==
          doctest::Approx(0.25 * std::exp(-45.0 / 18.0)).epsilon(1e-14));
    CHECK(thm3_lower(Curvature::Convex, 1.0, 0.0, 1, 10, 1.0) ==
          doctest::Approx(4.0 / 4500.0).epsilon(1e-14));
    // tau -> 2 tau + 1 quadruples the convex bound at fixed k.
    CHECK(thm3_lower(Curvature::Convex, 1.0, 0.0, 3, 10, 1.0) ==
          doctest::Approx(4.0 *
                          thm3_lower(Curvature::Convex, 1.0, 0.0, 1, 10, 1.0)));
    // Decreasing in k.
    CHECK(thm3_lower(Curvature::Convex, 1.0, 0.0, 1, 11, 1.0) <
          thm3_lower(Curvature::Convex, 1.0, 0.0, 1, 10, 1.0));
    CHECK_THROWS_AS(thm3_lower(Curvature::Convex, 1.0, 0.0, 3, 2, 1.0),
                    PreconditionViolated);
    CHECK_THROWS_AS(thm3_lower(Curvature::Strong, 1.0, 1.0, 1, 9, 1.0),
                    PreconditionViolated);  // kappa = 1
}

TEST_CASE("thm4 values") {
    SUBCASE("sigma2 = 0 collapses to the deterministic head") {
        CHECK(thm4_upper(Curvature::Strong, 1.0, 0.1, 0.025, 1, 0.0, 1.0, 10) ==
              doctest::Approx(5.0 * std::exp(-2.0 * 0.025 * 0.1 * 11)));
    }
    SUBCASE("strong case, independently recomputed") {
        const double head = 5.0 * std::exp(-0.055);
        const double bracket =
            2.0 * std::log(4.0) +
            (1.0 + M_E + std::log(1.0 / 0.0025)) / (M_E * 0.025);
        const double expect = head + 0.5 * 0.025 * 0.025 * bracket;
        CHECK(thm4_upper(Curvature::Strong, 1.0, 0.1, 0.025, 1, 1.0, 1.0, 10) ==
              doctest::Approx(expect).epsilon(1e-14));
        CHECK(expect == doctest::Approx(4.77795).epsilon(1e-5));
    }
    SUBCASE("convex case, independently recomputed") {
        const double head = 9.0 / (4.0 * M_E * 0.025 * 11);
        const double bracket =
            2.0 * std::log(4.0) +
            9.0 * (1.0 + std::log(11.0)) / (2.0 * M_E * 0.025);
        const double expect = head + 0.025 * 0.025 * bracket;
        CHECK(thm4_upper(Curvature::Convex, 1.0, 0.0, 0.025, 1, 1.0, 1.0, 10) ==
              doctest::Approx(expect).epsilon(1e-14));
    }
    CHECK_THROWS_AS(
        thm4_upper(Curvature::Strong, 1.0, 0.0, 0.025, 1, 1.0, 1.0, 10),
        PreconditionViolated);
}

TEST_CASE("step-size tuning cases") {
    SUBCASE("strong") {
        CHECK(tune_eta_strong(1.0, 1.0, 1, 100.0, 1.0, 10) == 0.0);
        CHECK(tune_eta_strong(1.0, 0.1, 1, 1.0, 1.0, 10000) ==
              doctest::Approx(std::log(1000.0) / 2000.0).epsilon(1e-14));
        CHECK(tune_eta_strong(1.0, 0.1, 1, 1e-12, 1.0, 10) ==
              doctest::Approx(0.05));
        CHECK(tune_eta_strong(1.0, 0.1, 1, 0.0, 1.0, 10) ==
              doctest::Approx(0.05));
        CHECK_THROWS_AS(tune_eta_strong(1.0, 0.0, 1, 1.0, 1.0, 10),
                        InvalidArgument);
        CHECK_THROWS_AS(tune_eta_strong(1.0, 0.1, 0, 1.0, 1.0, 10),
                        InvalidArgument);
    }
    SUBCASE("convex") {
        CHECK(tune_eta_convex(1.0, 1, 1.0, 1.0, 400) == doctest::Approx(0.05));
        CHECK(tune_eta_convex(1.0, 1, 1e9, 1.0, 400) ==
              doctest::Approx(1.0 / (1e9 * 20.0)));
        CHECK(tune_eta_convex(1.0, 1, 0.0, 1.0, 400) == doctest::Approx(0.05));
    }
}

TEST_CASE("exact expectation: head, noise onset, and noiseless collapse") {
    const auto [p, w0] = random_instance(4, 0.1, 1.0, 1.0, 61);
    const Eigen::VectorXd e0 = w0 - p.w_star;
    const int tau = 2;
    const double eta = max_certified_step(p.mu, tau);

    SUBCASE("sigma2 = 0 equals the deterministic trajectory") {
        const auto exact = exact_expected_suboptimality(p, e0, eta, tau, 0.0, 80);
        DelayedRunConfig cfg;
        cfg.tau = tau;
        cfg.eta = eta;
        cfg.iterations = 80;
        const Trajectory t = run_dgd(p, w0, cfg);
        for (int k = 0; k <= 80; ++k) {
            CHECK(exact[k] ==
                  doctest::Approx(t.subopt[k]).epsilon(1e-12).scale(1.0));
        }
    }
    SUBCASE("no noise contribution before the first update") {
        const auto exact =
            exact_expected_suboptimality(p, e0, eta, tau, 5.0, 10);
        const double head = suboptimality(p, w0);
        for (int k = 0; k <= tau; ++k) {
            CHECK(exact[k] == doctest::Approx(head).epsilon(1e-12));
        }
        // First perturbed iterate carries exactly one noise draw.
        const double single =
            eta * eta * 5.0 / (2.0 * p.dim()) * p.eigenvalues.sum();
        CHECK(exact[tau + 1] - exact_expected_suboptimality(
                                   p, e0, eta, tau, 0.0, tau + 1)[tau + 1] ==
              doctest::Approx(single).epsilon(1e-12));
    }
}

TEST_CASE("exact expectation matches Monte Carlo at the noise onset") {
    // Pure-noise setup (w0 = w*) at k = tau+1 pins the sum's index range:
    // exactly one draw must have entered.
    const auto [p, w0_unused] = random_instance(3, 0.2, 1.0, 1.0, 67);
    const int tau = 2, k = tau + 1;
    const double eta = max_certified_step(p.mu, tau);
    const double sigma2 = 100.0;
    const auto exact = exact_expected_suboptimality(
        p, Eigen::VectorXd::Zero(3), eta, tau, sigma2, k);

    const int trials = 4000;
    double sum = 0.0, sumsq = 0.0;
    for (int t = 0; t < trials; ++t) {
        DelayedRunConfig cfg;
        cfg.tau = tau;
        cfg.eta = eta;
        cfg.iterations = k;
        cfg.seed = 4321;
        cfg.trial = t;
        cfg.noise = NoiseModel::isotropic_gaussian(sigma2);
        cfg.store_iterates = false;
        const double v = run_sdgd(p, p.w_star, cfg).subopt[k];
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sumsq / trials - mean * mean) / (trials - 1));
    CHECK(std::abs(mean - exact[k]) <= 3.0 * se);
    // A two-draw convention would sit far outside the band.
    CHECK(std::abs(mean - 2.0 * exact[k]) > 10.0 * se);
}

TEST_CASE("exact expectation stays below thm4 on a small grid") {
    for (std::uint64_t seed : {71u, 72u}) {
        const auto [p, w0] = random_instance(5, 0.1, 1.0, 1.0, seed);
        const Eigen::VectorXd e0 = w0 - p.w_star;
        const double e0_sq = e0.squaredNorm();
        for (int tau : {0, 2, 5}) {
            const double eta = max_certified_step(p.mu, tau);
            for (double sigma2 : {0.01, 1.0, 100.0}) {
                const auto exact = exact_expected_suboptimality(
                    p, e0, eta, tau, sigma2, 200);
                for (int k = geometric_regime_start(tau); k <= 200; ++k) {
                    CHECK(exact[k] <=
                          thm4_upper(Curvature::Strong, p.mu, p.lambda, eta,
                                     tau, sigma2, e0_sq, k));
                }
            }
        }
    }
}

TEST_CASE("power-function maxima certificates") {
    // Closed-form check of the k = 10 case: maximizer 1/(eta (k+1)).
    const double eta = 0.1;
    const double direct = (1.0 / (eta * 11.0)) * std::pow(10.0 / 11.0, 10.0);
    CHECK(direct == doctest::Approx(0.350494).epsilon(1e-5));
    CHECK(direct <= 1.0 / (M_E * eta * 10.0));

    const auto cert = convex_power_bound_check(0.1, 200, 0.5);
    CHECK(cert.all_pass());
    CHECK(cert.worst_per_k_ratio <= 1.0 + 1e-9);
    CHECK(cert.worst_per_k_ratio > 0.8);  // the bound is tight for large k

    CHECK(convex_power_bound_check(0.001, 100).all_pass());
    CHECK_THROWS_AS(convex_power_bound_check(0.1, 100, 11.0),
                    InvalidArgument);
}

TEST_CASE("tuned-step delay insensitivity at long horizons") {
    const double mu = 1.0, lambda = 0.1, sigma2 = 1.0, e0_sq = 1.0;
    const int k = 12000;  // past 20 kappa tau ln(2(tau+1)) for every tau here
    const double base = thm4_upper(
        Curvature::Strong, mu, lambda,
        tune_eta_strong(mu, lambda, 1, sigma2, e0_sq, k), 1, sigma2, e0_sq, k);
    for (int tau = 1; tau <= 16; ++tau) {
        const double eta = tune_eta_strong(mu, lambda, tau, sigma2, e0_sq, k);
        const double v =
            thm4_upper(Curvature::Strong, mu, lambda, eta, tau, sigma2, e0_sq, k);
        CHECK(v / base <= 2.0);
    }
}

TEST_CASE("bound reports carry validity flags") {
    BoundParams params;
    params.mu = 1.0;
    params.lambda = 0.1;
    params.eta = 0.025;
    params.tau = 1;
    const BoundReport r = evaluate_bound(BoundKind::Thm1Upper, params, 20);
    CHECK(r.first_k == geometric_regime_start(1));
    CHECK(r.valid.front());
    CHECK(r.values.size() == static_cast<size_t>(20 - r.first_k + 1));

    const BoundReport forced =
        evaluate_bound(BoundKind::Thm1Upper, params, 20, true);
    CHECK(forced.first_k == 0);
    CHECK_FALSE(forced.valid.front());
    CHECK(forced.valid.back());

    BoundParams hot = params;
    hot.eta = 0.5;
    CHECK_THROWS_AS(evaluate_bound(BoundKind::Thm1Upper, hot, 20),
                    PreconditionViolated);
    const BoundReport hot_forced =
        evaluate_bound(BoundKind::Thm1Upper, hot, 20, true);
    CHECK_FALSE(hot_forced.eta_valid);
    CHECK_FALSE(hot_forced.valid.back());

    const std::string csv = bound_report_to_csv(r);
    CHECK(csv.rfind("k,value,valid,kind\n", 0) == 0);
    CHECK(csv.find("thm1_upper") != std::string::npos);
}
