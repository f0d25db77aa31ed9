#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "delaygrad/quadratic.hpp"
#include "delaygrad/rng.hpp"

namespace delaygrad {

enum class NoiseKind { None, IsotropicGaussian, SphericalFixedNorm };

/// Zero-mean gradient noise with E||xi||^2 <= sigma2.
///  - IsotropicGaussian: per-coordinate variance sigma2/d, so E||xi||^2 is
///    exactly sigma2. Admits a closed-form expected-suboptimality oracle.
///  - SphericalFixedNorm: uniform direction with ||xi|| = sigma exactly.
///    Exercises the bounds away from the Gaussian special case.
struct NoiseModel {
    NoiseKind kind = NoiseKind::None;
    double sigma2 = 0.0;

    static NoiseModel none() { return {}; }
    static NoiseModel isotropic_gaussian(double sigma2);
    static NoiseModel spherical_fixed_norm(double sigma);

    bool active() const { return kind != NoiseKind::None && sigma2 > 0.0; }
    Eigen::VectorXd draw(rng::Stream& stream, int dim) const;
};

struct DelayedRunConfig {
    int tau = 0;
    double eta = 0.0;
    int iterations = 0;  // K; the trajectory records subopt[0..K]
    NoiseModel noise{};
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    // When set, reject steps above max_certified_step(mu, tau) instead of
    // merely flagging them in the trajectory.
    bool require_certified_step = false;
    // nullopt: store iterates only while d*(K+1) stays under 1e6.
    std::optional<bool> store_iterates{};
};

struct Trajectory {
    std::string algorithm;
    int tau = 0;
    double eta = 0.0;
    double sigma2 = 0.0;
    std::uint64_t seed = 0;
    bool eta_certified = false;
    std::vector<double> subopt;            // F(w_k) - F*, k = 0..K
    std::vector<Eigen::VectorXd> iterates; // empty unless stored
    double wall_seconds = 0.0;
};

// w_{k+1} = w_k - eta * grad F(w_{k-tau}), frozen for the first tau rounds.
Trajectory run_dgd(const QuadraticProblem& p, const Eigen::VectorXd& w0,
                   const DelayedRunConfig& cfg);

// Same recursion with a fresh noise draw added to each delayed gradient.
// Noise for the update made at round k comes from stream (seed, trial, k);
// rounds before tau make no update and consume no noise. sigma2 = 0 is
// bit-identical to run_dgd.
Trajectory run_sdgd(const QuadraticProblem& p, const Eigen::VectorXd& w0,
                    const DelayedRunConfig& cfg);

// Synchronous baseline: every batch rounds, apply the average of `batch`
// noisy gradients all taken at the block's starting point. K must be a
// multiple of batch.
Trajectory run_minibatch_sgd(const QuadraticProblem& p,
                             const Eigen::VectorXd& w0, double eta, int batch,
                             int iterations, const NoiseModel& noise,
                             std::uint64_t seed, std::uint64_t trial = 0);

// One exact gradient step every tau+1 rounds; equals plain gradient descent
// sampled at floor(k/(tau+1)).
Trajectory run_idle_gd(const QuadraticProblem& p, const Eigen::VectorXd& w0,
                       double eta, int tau, int iterations);

enum class AgdVariant { StronglyConvex, Convex };

// Nesterov's accelerated step (step size 1/mu) every tau+1 rounds.
// StronglyConvex uses the constant momentum (sqrt(kappa)-1)/(sqrt(kappa)+1)
// and requires lambda > 0; Convex uses the t_{j+1} = (1+sqrt(1+4t_j^2))/2
// schedule.
Trajectory run_idle_agd(const QuadraticProblem& p, const Eigen::VectorXd& w0,
                        int tau, int iterations, AgdVariant variant);

std::string trajectory_to_csv(const Trajectory& t);

}  // namespace delaygrad
