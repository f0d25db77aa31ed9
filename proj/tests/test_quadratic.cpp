#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "delaygrad/errors.hpp"
#include "delaygrad/quadratic.hpp"
#include "delaygrad/rng.hpp"

using namespace delaygrad;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("evaluate matches hand-expanded values") {
    const auto p1 = make_spectral_problem(vec({1, 1}), vec({0, 0}), 0.0);
    CHECK(evaluate(p1, vec({1, 1})) == doctest::Approx(1.0));

    const auto p2 = make_spectral_problem(vec({2}), vec({-2}), 1.0);
    CHECK(evaluate(p2, vec({1})) == doctest::Approx(0.0));

    const auto p3 = make_spectral_problem(vec({1, 4}), vec({1, 0}), 0.0);
    CHECK(evaluate(p3, vec({1, 1})) == doctest::Approx(3.5));

    CHECK_THROWS_AS(evaluate(p3, vec({1, 1, 1})), DimensionMismatch);
}

TEST_CASE("gradient matches hand products and vanishes at the minimizer") {
    const auto p = make_spectral_problem(vec({1, 4}), vec({1, 0}), 0.0);
    const Eigen::VectorXd g = gradient(p, vec({1, 1}));
    CHECK(g[0] == doctest::Approx(2.0));
    CHECK(g[1] == doctest::Approx(4.0));

    const auto id = make_spectral_problem(vec({1, 1}), vec({0, 0}), 0.0);
    CHECK(gradient(id, vec({0, 0})).norm() == 0.0);

    CHECK(gradient(p, p.w_star).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("minimizer picks the minimum-norm solution") {
    const auto w1 = minimizer_spectral(vec({1, 1}), vec({-1, -1}));
    REQUIRE(w1.has_value());
    CHECK((*w1 - vec({1, 1})).norm() == doctest::Approx(0.0));

    const auto w2 = minimizer_spectral(vec({1, 0}), vec({1, 0}));
    REQUIRE(w2.has_value());
    CHECK((*w2 - vec({-1, 0})).norm() == doctest::Approx(0.0));

    CHECK_FALSE(minimizer_spectral(vec({1, 0}), vec({0, 1})).has_value());
    CHECK_THROWS_AS(make_spectral_problem(vec({1, 0}), vec({0, 1}), 0.0),
                    UnboundedBelow);
}

TEST_CASE("dense minimizer detects kernel components of b") {
    // Rotate a singular diagonal so the kernel is not axis-aligned.
    Eigen::MatrixXd rot(2, 2);
    const double c = std::cos(0.3), s = std::sin(0.3);
    rot << c, -s, s, c;
    const Eigen::MatrixXd a =
        rot * vec({1, 0}).asDiagonal() * rot.transpose();
    const Eigen::VectorXd kernel_dir = rot * vec({0, 1});

    CHECK_FALSE(minimizer_dense(a, kernel_dir).has_value());

    const Eigen::VectorXd image_dir = rot * vec({1, 0});
    const auto w = minimizer_dense(a, image_dir);
    REQUIRE(w.has_value());
    CHECK((a * (*w) + image_dir).norm() < 1e-12);
}

TEST_CASE("random_instance forces endpoints and is seed-deterministic") {
    const auto [p_flat, w0_flat] = random_instance(2, 1.0, 1.0, 0.5, 3);
    CHECK(p_flat.eigenvalues[0] == 1.0);
    CHECK(p_flat.eigenvalues[1] == 1.0);
    CHECK((w0_flat - p_flat.w_star).norm() == doctest::Approx(0.5));

    const auto [pa, wa] = random_instance(5, 0.1, 1.0, 1.0, 7);
    const auto [pb, wb] = random_instance(5, 0.1, 1.0, 1.0, 7);
    CHECK((pa.eigenvalues - pb.eigenvalues).norm() == 0.0);
    CHECK((pa.w_star - pb.w_star).norm() == 0.0);
    CHECK((wa - wb).norm() == 0.0);

    CHECK(pa.eigenvalues[0] == 0.1);
    CHECK(pa.eigenvalues[4] == 1.0);
    for (int i = 0; i + 1 < 5; ++i) {
        CHECK(pa.eigenvalues[i] <= pa.eigenvalues[i + 1]);
        CHECK(pa.eigenvalues[i] >= 0.1);
        CHECK(pa.eigenvalues[i] <= 1.0);
    }
    // Gradient cancels exactly for generated instances.
    CHECK(gradient(pa, pa.w_star).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(random_instance(1, 0.1, 1.0, 1.0, 0), InvalidArgument);
    CHECK_THROWS_AS(random_instance(4, 2.0, 1.0, 1.0, 0), InvalidArgument);
}

TEST_CASE("suboptimality equals the error-space quadratic form") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const auto [p, w0] = random_instance(6, 0.05, 2.0, 1.0, seed);
        rng::Stream probe(seed, 9, 9);
        for (int i = 0; i < 100; ++i) {
            const Eigen::VectorXd w = p.w_star + probe.gaussian_vector(6);
            const Eigen::VectorXd e = w - p.w_star;
            const double form =
                0.5 * e.cwiseProduct(p.eigenvalues).dot(e);
            const double sub = evaluate(p, w) - p.f_star;
            CHECK(sub ==
                  doctest::Approx(form).epsilon(1e-9).scale(1.0 + form));
            CHECK(evaluate(p, p.w_star) <= evaluate(p, w) + 1e-12);
        }
    }
}

TEST_CASE("problem JSON round-trips both forms") {
    const auto [p, w0] = random_instance(4, 0.2, 1.5, 1.0, 21);
    const auto back = problem_from_json(problem_to_json(p));
    CHECK(back.spectral());
    CHECK((back.eigenvalues - p.eigenvalues).norm() == 0.0);
    CHECK((back.w_star - p.w_star).cwiseAbs().maxCoeff() < 1e-12);

    Eigen::MatrixXd a(2, 2);
    a << 2.0, -1.0, -1.0, 2.0;
    const auto dense = make_dense_problem(a, vec({1, 0}), 0.5);
    const auto dense_back = problem_from_json(problem_to_json(dense));
    CHECK_FALSE(dense_back.spectral());
    CHECK((dense_back.dense_a - dense.dense_a).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dense_back.f_star == doctest::Approx(dense.f_star));
}
