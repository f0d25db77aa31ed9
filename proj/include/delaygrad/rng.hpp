#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace delaygrad {

// Counter-based random streams. A stream is keyed by (seed, trial, step), so
// any (trial, step) cell can be generated independently of every other cell.
// This is what makes parallel Monte Carlo runs reproducible under any worker
// schedule: workers never share generator state.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Stream {
  public:
    Stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t step)
        : state_(mix64(mix64(mix64(seed) ^ (0x7f4a7c15ULL + trial)) ^
                       (0x9e3779b9ULL + step))),
          has_cached_(false),
          cached_(0.0) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in (0, 1]; never returns 0 so it is safe under log().
    double next_uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; second deviate is cached.
    double next_gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = next_uniform01();
        const double u2 = next_uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        cached_ = r * std::sin(t);
        has_cached_ = true;
        return r * std::cos(t);
    }

    Eigen::VectorXd gaussian_vector(int dim) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v[i] = next_gaussian();
        return v;
    }

    // Uniform point on the unit sphere in R^dim.
    Eigen::VectorXd unit_vector(int dim) {
        Eigen::VectorXd v = gaussian_vector(dim);
        double n = v.norm();
        while (n == 0.0) {  // probability ~0, but keeps the contract total
            v = gaussian_vector(dim);
            n = v.norm();
        }
        return v / n;
    }

  private:
    std::uint64_t state_;
    bool has_cached_;
    double cached_;
};

}  // namespace rng
}  // namespace delaygrad
