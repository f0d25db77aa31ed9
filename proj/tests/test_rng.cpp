#include <doctest.h>

#include <cmath>

#include "delaygrad/rng.hpp"

using namespace delaygrad;

TEST_CASE("streams are deterministic and cell-independent") {
    rng::Stream a(42, 3, 17);
    rng::Stream b(42, 3, 17);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    // A neighbouring cell must not collide.
    rng::Stream c(42, 3, 18);
    rng::Stream d(42, 4, 17);
    CHECK(rng::Stream(42, 3, 17).next_u64() != c.next_u64());
    CHECK(rng::Stream(42, 3, 17).next_u64() != d.next_u64());
}

TEST_CASE("uniform01 stays in (0, 1]") {
    rng::Stream s(7, 0, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = s.next_uniform01();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("gaussian moments are sane") {
    rng::Stream s(123, 0, 0);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = s.next_gaussian();
        sum += g;
        sumsq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("unit vectors have unit norm") {
    rng::Stream s(5, 1, 2);
    for (int i = 0; i < 10; ++i) {
        CHECK(s.unit_vector(7).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}
