#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delaygrad/quadratic.hpp"

namespace delaygrad {

enum class SweepKind { DeterministicTau, StochasticTau, Minibatch };

/// Declarative description of a parameter sweep. Everything a sweep produces
/// is a pure function of (spec, seed); reruns are byte-identical regardless
/// of worker count.
struct SweepSpec {
    SweepKind kind = SweepKind::DeterministicTau;
    int d = 6;
    double lambda = 0.1;
    double mu = 1.0;
    double e0_norm = 1.0;
    std::vector<int> taus;
    std::vector<double> sigma2s;
    std::vector<int> ks;       // stochastic horizons; empty -> crossover rule
    double epsilon = 1e-6;
    long long budget = 2'000'000;  // per-run iteration ceiling
    int trials = 0;                // Monte Carlo trials per cell (0: exact only)
    std::uint64_t seed = 1;
    int threads = 1;
    // Horizon rule used when ks is empty: k = mult * tau * kappa * ln(2(tau+1)).
    // The multiplier is this tool's desk-scale choice and is echoed in the
    // output metadata.
    double crossover_multiplier = 100.0;
    std::string eta_rule = "paper";  // "paper" (1/(20 mu (tau+1))) or "tuned"
};

struct ResultRow {
    std::string algorithm;
    int tau = 0;
    int batch = 0;  // 0: not applicable
    double sigma2 = 0.0;
    int k = 0;
    double eta = 0.0;
    int trials = 0;
    std::optional<double> mean_subopt;
    std::optional<double> std_error;
    std::optional<double> exact_expectation;
    std::optional<double> bound_value;
    std::optional<int> iters_to_epsilon;  // nullopt while measured: see reached
    bool iters_measured = false;
    bool reached = false;
};

struct ResultTable {
    SweepSpec spec;
    std::vector<ResultRow> rows;

    std::string to_csv() const;
    std::string metadata_json() const;
};

// Smallest k with values[k] <= epsilon, nullopt when the budget never gets
// there.
std::optional<int> iterations_to_epsilon(const std::vector<double>& values,
                                         double epsilon);

// DGD at eta = 1/(20 mu (tau+1)) against idle-GD at 1/(20 mu), one pair of
// rows per tau, each carrying its iteration count to spec.epsilon.
ResultTable sweep_deterministic_tau(const SweepSpec& spec);

// SDGD across (tau, sigma2, k) with exact expectations and, when
// spec.trials > 0, Monte Carlo means reduced in trial order.
ResultTable sweep_stochastic_tau(const SweepSpec& spec);

// SDGD with delay tau against minibatch SGD with batch tau+1 at equal
// stochastic-gradient budgets and a shared tuned step.
ResultTable compare_minibatch(const SweepSpec& spec);

ResultTable run_sweep(const SweepSpec& spec);

std::string sweep_spec_to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const std::string& text);

}  // namespace delaygrad
