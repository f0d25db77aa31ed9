#include "delaygrad/dynamics.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "delaygrad/errors.hpp"
#include "delaygrad/io.hpp"
#include "delaygrad/thresholds.hpp"

namespace delaygrad {

NoiseModel NoiseModel::isotropic_gaussian(double sigma2) {
    if (sigma2 < 0.0) throw InvalidArgument("sigma2 must be >= 0");
    return {NoiseKind::IsotropicGaussian, sigma2};
}

NoiseModel NoiseModel::spherical_fixed_norm(double sigma) {
    if (sigma < 0.0) throw InvalidArgument("sigma must be >= 0");
    return {NoiseKind::SphericalFixedNorm, sigma * sigma};
}

Eigen::VectorXd NoiseModel::draw(rng::Stream& stream, int dim) const {
    switch (kind) {
        case NoiseKind::IsotropicGaussian:
            return std::sqrt(sigma2 / dim) * stream.gaussian_vector(dim);
        case NoiseKind::SphericalFixedNorm:
            return std::sqrt(sigma2) * stream.unit_vector(dim);
        case NoiseKind::None:
            break;
    }
    return Eigen::VectorXd::Zero(dim);
}

namespace {

class Recorder {
  public:
    Recorder(const QuadraticProblem& p, const DelayedRunConfig& cfg,
             std::string algorithm)
        : p_(p), start_(std::chrono::steady_clock::now()) {
        traj_.algorithm = std::move(algorithm);
        traj_.tau = cfg.tau;
        traj_.eta = cfg.eta;
        traj_.sigma2 = cfg.noise.active() ? cfg.noise.sigma2 : 0.0;
        traj_.seed = cfg.seed;
        traj_.eta_certified = cfg.eta <= max_certified_step(p.mu, cfg.tau);
        traj_.subopt.reserve(cfg.iterations + 1);
        const long long footprint =
            static_cast<long long>(p.dim()) * (cfg.iterations + 1);
        store_ = cfg.store_iterates.value_or(footprint <= 1'000'000);
        if (store_) traj_.iterates.reserve(cfg.iterations + 1);
    }

    void record(const Eigen::VectorXd& w) {
        traj_.subopt.push_back(suboptimality(p_, w));
        if (store_) traj_.iterates.push_back(w);
    }

    Trajectory finish() {
        traj_.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start_)
                .count();
        return std::move(traj_);
    }

  private:
    const QuadraticProblem& p_;
    std::chrono::steady_clock::time_point start_;
    Trajectory traj_;
    bool store_ = false;
};

void validate_run(const QuadraticProblem& p, const Eigen::VectorXd& w0,
                  const DelayedRunConfig& cfg) {
    if (w0.size() != p.dim()) throw DimensionMismatch("w0 has wrong dimension");
    if (cfg.tau < 0 || cfg.iterations < 0 || !(cfg.eta > 0.0)) {
        throw InvalidArgument("run needs tau >= 0, K >= 0, eta > 0");
    }
    if (cfg.require_certified_step &&
        cfg.eta > max_certified_step(p.mu, cfg.tau)) {
        throw PreconditionViolated(
            "eta exceeds the certified step 1/(20*mu*(tau+1))");
    }
}

Trajectory run_delayed(const QuadraticProblem& p, const Eigen::VectorXd& w0,
                       const DelayedRunConfig& cfg, std::string name) {
    validate_run(p, w0, cfg);
    Recorder rec(p, cfg, std::move(name));

    // History ring holds w_{k-tau} .. w_k; iterate k+1 replaces the slot of
    // the iterate k-tau it consumed ((k-tau) and (k+1) agree mod tau+1).
    std::vector<Eigen::VectorXd> ring(cfg.tau + 1, w0);
    Eigen::VectorXd w = w0;
    rec.record(w);
    for (int k = 0; k < cfg.iterations; ++k) {
        const int slot = (k + 1) % (cfg.tau + 1);
        if (k >= cfg.tau) {
            Eigen::VectorXd g = gradient(p, ring[slot]);
            if (cfg.noise.active()) {
                rng::Stream stream(cfg.seed, cfg.trial, k);
                g += cfg.noise.draw(stream, p.dim());
            }
            w -= cfg.eta * g;
        }
        ring[slot] = w;
        rec.record(w);
    }
    return rec.finish();
}

}  // namespace

Trajectory run_dgd(const QuadraticProblem& p, const Eigen::VectorXd& w0,
                   const DelayedRunConfig& cfg) {
    DelayedRunConfig clean = cfg;
    clean.noise = NoiseModel::none();
    return run_delayed(p, w0, clean, "dgd");
}

Trajectory run_sdgd(const QuadraticProblem& p, const Eigen::VectorXd& w0,
                    const DelayedRunConfig& cfg) {
    return run_delayed(p, w0, cfg, "sdgd");
}

Trajectory run_minibatch_sgd(const QuadraticProblem& p,
                             const Eigen::VectorXd& w0, double eta, int batch,
                             int iterations, const NoiseModel& noise,
                             std::uint64_t seed, std::uint64_t trial) {
    if (batch < 1) throw InvalidArgument("batch must be >= 1");
    if (iterations % batch != 0) {
        throw InvalidArgument("iteration count must be a multiple of the batch");
    }
    DelayedRunConfig cfg;
    cfg.tau = 0;
    cfg.eta = eta;
    cfg.iterations = iterations;
    cfg.noise = noise;
    cfg.seed = seed;
    cfg.trial = trial;
    validate_run(p, w0, cfg);
    Recorder rec(p, cfg, "minibatch_sgd");

    Eigen::VectorXd w = w0;
    rec.record(w);
    for (int block = 0; block < iterations; block += batch) {
        const Eigen::VectorXd g = gradient(p, w);
        Eigen::VectorXd avg = g;
        if (noise.active()) {
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(p.dim());
            for (int i = 0; i < batch; ++i) {
                rng::Stream stream(seed, trial, block + i);
                sum += g + noise.draw(stream, p.dim());
            }
            avg = sum / batch;
        }
        const Eigen::VectorXd next = w - eta * avg;
        // Iterates inside a block stay at the block's starting point.
        for (int i = 1; i < batch; ++i) rec.record(w);
        w = next;
        rec.record(w);
    }
    return rec.finish();
}

Trajectory run_idle_gd(const QuadraticProblem& p, const Eigen::VectorXd& w0,
                       double eta, int tau, int iterations) {
    DelayedRunConfig cfg;
    cfg.tau = tau;
    cfg.eta = eta;
    cfg.iterations = iterations;
    validate_run(p, w0, cfg);
    Recorder rec(p, cfg, "idle_gd");

    Eigen::VectorXd w = w0;
    rec.record(w);
    for (int k = 1; k <= iterations; ++k) {
        if (k % (tau + 1) == 0) w -= eta * gradient(p, w);
        rec.record(w);
    }
    return rec.finish();
}

Trajectory run_idle_agd(const QuadraticProblem& p, const Eigen::VectorXd& w0,
                        int tau, int iterations, AgdVariant variant) {
    if (variant == AgdVariant::StronglyConvex && !(p.lambda > 0.0)) {
        throw InvalidArgument(
            "the strongly convex schedule needs lambda > 0");
    }
    DelayedRunConfig cfg;
    cfg.tau = tau;
    cfg.eta = 1.0 / p.mu;
    cfg.iterations = iterations;
    validate_run(p, w0, cfg);
    Recorder rec(p, cfg,
                 variant == AgdVariant::StronglyConvex ? "idle_agd_strong"
                                                       : "idle_agd_convex");

    const double step = 1.0 / p.mu;
    const double kappa = p.lambda > 0.0 ? p.mu / p.lambda : 0.0;
    const double momentum_sc =
        kappa > 0.0 ? (std::sqrt(kappa) - 1.0) / (std::sqrt(kappa) + 1.0) : 0.0;

    Eigen::VectorXd x = w0;
    Eigen::VectorXd y = w0;
    double t_sched = 1.0;

    rec.record(x);
    for (int k = 1; k <= iterations; ++k) {
        if (k % (tau + 1) == 0) {
            const Eigen::VectorXd x_next = y - step * gradient(p, y);
            double beta;
            if (variant == AgdVariant::StronglyConvex) {
                beta = momentum_sc;
            } else {
                const double t_next =
                    (1.0 + std::sqrt(1.0 + 4.0 * t_sched * t_sched)) / 2.0;
                beta = (t_sched - 1.0) / t_next;
                t_sched = t_next;
            }
            y = x_next + beta * (x_next - x);
            x = x_next;
        }
        rec.record(x);
    }
    return rec.finish();
}

std::string trajectory_to_csv(const Trajectory& t) {
    std::ostringstream os;
    os << "k,subopt,algorithm,tau,eta,sigma2,seed\n";
    for (size_t k = 0; k < t.subopt.size(); ++k) {
        os << csv_line({static_cast<long long>(k), t.subopt[k], t.algorithm,
                        t.tau, t.eta, t.sigma2,
                        static_cast<long long>(t.seed)});
    }
    return os.str();
}

}  // namespace delaygrad
