#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "delaygrad/errors.hpp"
#include "delaygrad/worstcase.hpp"

using namespace delaygrad;

TEST_CASE("strong instance: decay ratio, minimizer, and corner entry") {
    const auto inst = build_strong_instance(1.0, 0.25, 20);  // kappa = 4
    CHECK(inst.q == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    double qp = 1.0;
    for (int i = 0; i < inst.dim; ++i) {
        qp /= 3.0;
        CHECK(inst.problem.w_star[i] == doctest::Approx(qp).epsilon(1e-8));
    }
    // Hessian corner: scale * corner + lambda with scale = lambda(kappa-1)/4.
    const double scale = 0.25 * 3.0 / 4.0;
    CHECK(inst.problem.dense_a(19, 19) ==
          doctest::Approx(scale * (5.0 / 3.0) + 0.25).epsilon(1e-14));
    CHECK(inst.problem.dense_a(0, 0) ==
          doctest::Approx(scale * 2.0 + 0.25).epsilon(1e-14));
    CHECK(inst.problem.dense_a(0, 1) == doctest::Approx(-scale));

    CHECK_THROWS_AS(build_strong_instance(1.0, 1.0, 20), InvalidArgument);
    CHECK_THROWS_AS(build_strong_instance(1.0, 0.25, 3), InvalidArgument);
}

TEST_CASE("strong instance spectrum containment across kappa and d") {
    for (double kappa : {2.0, 4.0, 25.0, 100.0}) {
        for (int d : {20, 50, 200}) {
            const double mu = 1.0, lambda = mu / kappa;
            const auto inst = build_strong_instance(mu, lambda, d);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                inst.problem.dense_a);
            CHECK(es.eigenvalues().minCoeff() >= lambda - 1e-8);
            CHECK(es.eigenvalues().maxCoeff() <= mu + 1e-8);
        }
    }
}

TEST_CASE("convex instance: block size, spectrum, and gradient at zero") {
    const auto inst = build_convex_instance(1.0, 40, 10, 1);
    CHECK(inst.active_block == 11);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inst.problem.dense_a);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-12);

    const Eigen::VectorXd g =
        gradient(inst.problem, Eigen::VectorXd::Zero(40));
    CHECK(g[0] == doctest::Approx(-0.25));
    for (int i = 1; i < 40; ++i) CHECK(g[i] == 0.0);

    CHECK_THROWS_AS(build_convex_instance(1.0, 10, 40, 1), InvalidArgument);
    CHECK_THROWS_AS(build_convex_instance(1.0, 40, 1, 1), InvalidArgument);
}

TEST_CASE("span profile counts reachable coordinates") {
    const auto inst = build_strong_instance(1.0, 0.25, 50);
    const int tau = 1;
    const Trajectory t =
        run_span_algorithm(inst, SpanAlgorithm::Dgd, tau, 60);
    const SpanProfile prof = span_profile(t.iterates, tau);
    CHECK(prof.pass);
    // Nothing moves before the first delayed gradient lands.
    CHECK(prof.max_nonzero_index[0] == 0);
    CHECK(prof.max_nonzero_index[1] == 0);
    CHECK(prof.max_nonzero_index[5] <= 2);
    // The frontier actually advances.
    CHECK(prof.max_nonzero_index[60] >= 10);
}

TEST_CASE("span holds bitwise for every algorithm on both constructions") {
    for (int tau : {0, 1, 3}) {
        const auto strong = build_strong_instance(1.0, 0.25, 60);
        const auto convex = build_convex_instance(1.0, 120, 40, tau);
        for (auto alg : {SpanAlgorithm::Dgd, SpanAlgorithm::IdleGd,
                         SpanAlgorithm::IdleAgd}) {
            const Trajectory ts = run_span_algorithm(strong, alg, tau, 80);
            CHECK(span_profile(ts.iterates, tau).pass);
            const Trajectory tc = run_span_algorithm(convex, alg, tau, 40);
            CHECK(span_profile(tc.iterates, tau).pass);
        }
    }
}

TEST_CASE("lower-bound domination on the strong construction") {
    const auto inst = build_strong_instance(1.0, 0.01, 200);  // kappa = 100
    for (auto alg : {SpanAlgorithm::Dgd, SpanAlgorithm::IdleGd,
                     SpanAlgorithm::IdleAgd}) {
        const auto rep = verify_thm3(inst, alg, 1, 100);
        CHECK(rep.bound_pass);
        CHECK(rep.span_pass);
        for (const auto& row : rep.rows) CHECK(row.margin >= 0.0);
    }
    CHECK_THROWS_AS(verify_thm3(build_strong_instance(1.0, 0.01, 20),
                                SpanAlgorithm::Dgd, 1, 100),
                    InvalidArgument);  // dimension too small for K
}

TEST_CASE("lower-bound domination on the convex construction") {
    const auto inst = build_convex_instance(1.0, 100, 20, 1);
    for (auto alg : {SpanAlgorithm::Dgd, SpanAlgorithm::IdleGd,
                     SpanAlgorithm::IdleAgd}) {
        const auto rep = verify_thm3(inst, alg, 1, 20);
        CHECK(rep.bound_pass);
        CHECK(rep.span_pass);
        REQUIRE(rep.rows.size() == 1);  // sized to a single target iteration
        CHECK(rep.rows[0].k == 20);
        CHECK(rep.rows[0].margin >= 0.0);
    }
}

TEST_CASE("report serialization carries margins") {
    const auto inst = build_strong_instance(1.0, 0.25, 60);
    const auto rep = verify_thm3(inst, SpanAlgorithm::Dgd, 1, 30);
    const std::string j = lower_bound_report_to_json(rep);
    CHECK(j.find("\"margin\"") != std::string::npos);
    CHECK(j.find("strong_lan") != std::string::npos);
}
