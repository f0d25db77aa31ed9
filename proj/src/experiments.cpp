#include "delaygrad/experiments.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "delaygrad/bounds.hpp"
#include "delaygrad/dynamics.hpp"
#include "delaygrad/errors.hpp"
#include "delaygrad/io.hpp"
#include "delaygrad/thresholds.hpp"

namespace delaygrad {

namespace {

constexpr long long kMaxRuns = 100'000;
constexpr const char* kCodeVersion = "delaygrad 0.1.0";

void run_indexed(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

struct MeanStdErr {
    double mean = 0.0;
    double std_error = 0.0;
};

// Reduction happens in trial-index order so the result does not depend on
// which worker finished first.
MeanStdErr reduce_ordered(const std::vector<double>& samples) {
    MeanStdErr out;
    const int n = static_cast<int>(samples.size());
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += samples[i];
    out.mean = sum / n;
    if (n > 1) {
        double ss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = samples[i] - out.mean;
            ss += d * d;
        }
        out.std_error = std::sqrt(ss / (n - 1) / n);
    }
    return out;
}

void check_budget(long long runs) {
    if (runs > kMaxRuns) {
        throw BudgetExceeded("sweep would launch " + std::to_string(runs) +
                             " runs (limit " + std::to_string(kMaxRuns) + ")");
    }
}

int crossover_horizon(const SweepSpec& spec, int tau) {
    const double kappa = spec.mu / spec.lambda;
    return static_cast<int>(std::llround(spec.crossover_multiplier * tau *
                                         kappa *
                                         std::log(2.0 * (tau + 1))));
}

double pick_eta(const SweepSpec& spec, int tau, double sigma2, int k) {
    if (spec.eta_rule == "tuned") {
        return tune_eta_strong(spec.mu, spec.lambda, std::max(1, tau), sigma2,
                               spec.e0_norm * spec.e0_norm, std::max(1, k));
    }
    if (spec.eta_rule == "paper") return max_certified_step(spec.mu, tau);
    throw InvalidArgument("eta_rule must be \"paper\" or \"tuned\"");
}

std::vector<double> mc_suboptimality(const QuadraticProblem& p,
                                     const Eigen::VectorXd& w0,
                                     const DelayedRunConfig& base, int at_k,
                                     int trials, int threads) {
    std::vector<double> samples(trials);
    run_indexed(trials, threads, [&](int t) {
        DelayedRunConfig cfg = base;
        cfg.trial = static_cast<std::uint64_t>(t);
        cfg.store_iterates = false;
        samples[t] = run_sdgd(p, w0, cfg).subopt[at_k];
    });
    return samples;
}

}  // namespace

std::optional<int> iterations_to_epsilon(const std::vector<double>& values,
                                         double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
    for (size_t k = 0; k < values.size(); ++k) {
        if (values[k] <= epsilon) return static_cast<int>(k);
    }
    return std::nullopt;
}

ResultTable sweep_deterministic_tau(const SweepSpec& spec) {
    if (spec.taus.empty()) throw InvalidArgument("sweep needs a tau grid");
    if (!(spec.lambda > 0.0)) {
        throw InvalidArgument("the deterministic sweep needs lambda > 0");
    }
    check_budget(2LL * spec.taus.size());

    auto [p, w0] = random_instance(spec.d, spec.lambda, spec.mu, spec.e0_norm,
                                   spec.seed);
    const double e0_sq = (w0 - p.w_star).squaredNorm();

    ResultTable table;
    table.spec = spec;
    for (int tau : spec.taus) {
        const double eta_dgd = max_certified_step(spec.mu, tau);
        // Size the run from the geometric decay the bound predicts, with
        // headroom; a run that still misses epsilon reports NotReached.
        const double predicted =
            std::log(5.0 * spec.mu * e0_sq / spec.epsilon) /
            (2.0 * eta_dgd * spec.lambda);
        const int k_budget = static_cast<int>(std::min<long long>(
            spec.budget,
            2 * (static_cast<long long>(predicted) +
                 geometric_regime_start(tau) + 16)));

        DelayedRunConfig cfg;
        cfg.tau = tau;
        cfg.eta = eta_dgd;
        cfg.iterations = k_budget;
        cfg.store_iterates = false;
        const Trajectory dgd = run_dgd(p, w0, cfg);
        const auto dgd_iters = iterations_to_epsilon(dgd.subopt, spec.epsilon);

        const Trajectory idle = run_idle_gd(
            p, w0, max_certified_step(spec.mu, 0), tau, k_budget);
        const auto idle_iters =
            iterations_to_epsilon(idle.subopt, spec.epsilon);

        for (const auto& [name, iters, eta] :
             {std::tuple{std::string("dgd"), dgd_iters, eta_dgd},
              std::tuple{std::string("idle_gd"), idle_iters,
                         max_certified_step(spec.mu, 0)}}) {
            ResultRow row;
            row.algorithm = name;
            row.tau = tau;
            row.k = k_budget;
            row.eta = eta;
            row.iters_measured = true;
            row.reached = iters.has_value();
            row.iters_to_epsilon = iters;
            table.rows.push_back(row);
        }
    }
    return table;
}

ResultTable sweep_stochastic_tau(const SweepSpec& spec) {
    if (spec.taus.empty()) throw InvalidArgument("sweep needs a tau grid");
    if (!(spec.lambda > 0.0)) {
        throw InvalidArgument("the stochastic sweep needs lambda > 0");
    }
    if (spec.sigma2s.empty()) throw InvalidArgument("sweep needs sigma2 grid");
    const size_t k_cells = spec.ks.empty() ? 1 : spec.ks.size();
    check_budget(static_cast<long long>(spec.taus.size()) *
                 spec.sigma2s.size() * k_cells * std::max(1, spec.trials));

    auto [p, w0] = random_instance(spec.d, spec.lambda, spec.mu, spec.e0_norm,
                                   spec.seed);
    const Eigen::VectorXd e0 = w0 - p.w_star;
    const double e0_sq = e0.squaredNorm();

    ResultTable table;
    table.spec = spec;
    for (int tau : spec.taus) {
        std::vector<int> horizons = spec.ks;
        if (horizons.empty()) {
            if (tau < 1) {
                throw InvalidArgument(
                    "the crossover horizon rule needs tau >= 1");
            }
            horizons.push_back(crossover_horizon(spec, tau));
        }
        for (double sigma2 : spec.sigma2s) {
            for (int k : horizons) {
                if (k > spec.budget) throw BudgetExceeded("horizon above budget");
                const double eta = pick_eta(spec, tau, sigma2, k);
                ResultRow row;
                row.algorithm = "sdgd";
                row.tau = tau;
                row.sigma2 = sigma2;
                row.k = k;
                row.eta = eta;
                if (!(eta > 0.0)) {
                    // Tuning can legitimately return 0 (stand still).
                    row.exact_expectation = suboptimality(p, w0);
                    table.rows.push_back(row);
                    continue;
                }
                row.exact_expectation =
                    exact_expected_suboptimality(p, e0, eta, tau, sigma2,
                                                 k)[k];
                if (sigma2 > 0.0 && k >= geometric_regime_start(tau) &&
                    eta <= max_certified_step(spec.mu, tau)) {
                    row.bound_value =
                        thm4_upper(Curvature::Strong, spec.mu, spec.lambda,
                                   eta, tau, sigma2, e0_sq, k);
                }
                if (spec.trials > 0) {
                    DelayedRunConfig cfg;
                    cfg.tau = tau;
                    cfg.eta = eta;
                    cfg.iterations = k;
                    cfg.noise = NoiseModel::isotropic_gaussian(sigma2);
                    cfg.seed = spec.seed;
                    const auto samples = mc_suboptimality(
                        p, w0, cfg, k, spec.trials, spec.threads);
                    const auto stats = reduce_ordered(samples);
                    row.trials = spec.trials;
                    row.mean_subopt = stats.mean;
                    row.std_error = stats.std_error;
                }
                table.rows.push_back(row);
            }
        }
    }
    return table;
}

ResultTable compare_minibatch(const SweepSpec& spec) {
    if (spec.taus.empty()) throw InvalidArgument("sweep needs a tau grid");
    if (spec.sigma2s.empty()) throw InvalidArgument("sweep needs sigma2 grid");
    if (spec.ks.empty()) throw InvalidArgument("sweep needs a k grid");
    if (spec.trials < 1) throw InvalidArgument("comparison needs trials >= 1");
    if (!(spec.lambda > 0.0)) {
        throw InvalidArgument("the comparison sweep needs lambda > 0");
    }
    check_budget(2LL * spec.taus.size() * spec.sigma2s.size() *
                 spec.ks.size() * spec.trials);

    auto [p, w0] = random_instance(spec.d, spec.lambda, spec.mu, spec.e0_norm,
                                   spec.seed);
    const Eigen::VectorXd e0 = w0 - p.w_star;

    ResultTable table;
    table.spec = spec;
    for (int tau : spec.taus) {
        const int batch = tau + 1;
        for (double sigma2 : spec.sigma2s) {
            for (int k_raw : spec.ks) {
                // Equal stochastic-gradient budgets: both methods run the
                // same number of rounds, rounded up to a whole block.
                const int k = ((k_raw + batch - 1) / batch) * batch;
                const double eta = pick_eta(spec, tau, sigma2, k);
                if (!(eta > 0.0)) {
                    throw InvalidArgument(
                        "tuned step collapsed to 0 for the comparison");
                }
                const NoiseModel noise =
                    sigma2 > 0.0 ? NoiseModel::isotropic_gaussian(sigma2)
                                 : NoiseModel::none();

                ResultRow sdgd_row;
                sdgd_row.algorithm = "sdgd";
                sdgd_row.tau = tau;
                sdgd_row.batch = batch;
                sdgd_row.sigma2 = sigma2;
                sdgd_row.k = k;
                sdgd_row.eta = eta;
                sdgd_row.trials = spec.trials;
                {
                    DelayedRunConfig cfg;
                    cfg.tau = tau;
                    cfg.eta = eta;
                    cfg.iterations = k;
                    cfg.noise = noise;
                    cfg.seed = spec.seed;
                    const auto stats = reduce_ordered(mc_suboptimality(
                        p, w0, cfg, k, spec.trials, spec.threads));
                    sdgd_row.mean_subopt = stats.mean;
                    sdgd_row.std_error = stats.std_error;
                }
                sdgd_row.exact_expectation =
                    sigma2 > 0.0 ? std::optional<double>(
                                       exact_expected_suboptimality(
                                           p, e0, eta, tau, sigma2, k)[k])
                                 : std::nullopt;
                table.rows.push_back(sdgd_row);

                ResultRow mb_row;
                mb_row.algorithm = "minibatch_sgd";
                mb_row.tau = tau;
                mb_row.batch = batch;
                mb_row.sigma2 = sigma2;
                mb_row.k = k;
                mb_row.eta = eta;
                mb_row.trials = spec.trials;
                {
                    std::vector<double> samples(spec.trials);
                    run_indexed(spec.trials, spec.threads, [&](int t) {
                        samples[t] = run_minibatch_sgd(
                                         p, w0, eta, batch, k, noise,
                                         spec.seed,
                                         static_cast<std::uint64_t>(t))
                                         .subopt[k];
                    });
                    const auto stats = reduce_ordered(samples);
                    mb_row.mean_subopt = stats.mean;
                    mb_row.std_error = stats.std_error;
                }
                table.rows.push_back(mb_row);
            }
        }
    }
    return table;
}

ResultTable run_sweep(const SweepSpec& spec) {
    switch (spec.kind) {
        case SweepKind::DeterministicTau: return sweep_deterministic_tau(spec);
        case SweepKind::StochasticTau: return sweep_stochastic_tau(spec);
        case SweepKind::Minibatch: return compare_minibatch(spec);
    }
    throw InvalidArgument("unknown sweep kind");
}

namespace {

std::string opt_cell(const std::optional<double>& v) {
    return v ? fmt_g17(*v) : "";
}

const char* sweep_kind_name(SweepKind k) {
    switch (k) {
        case SweepKind::DeterministicTau: return "deterministic_tau";
        case SweepKind::StochasticTau: return "stochastic_tau";
        case SweepKind::Minibatch: return "minibatch";
    }
    return "unknown";
}

SweepKind sweep_kind_from_name(const std::string& name) {
    if (name == "deterministic_tau") return SweepKind::DeterministicTau;
    if (name == "stochastic_tau") return SweepKind::StochasticTau;
    if (name == "minibatch") return SweepKind::Minibatch;
    throw InvalidArgument("unknown sweep kind: " + name);
}

}  // namespace

std::string ResultTable::to_csv() const {
    std::ostringstream os;
    os << "algorithm,tau,batch,sigma2,k,eta,trials,mean_subopt,std_error,"
          "exact_expectation,bound_value,iters_to_epsilon\n";
    for (const auto& r : rows) {
        std::string iters;
        if (r.iters_measured) {
            iters = r.reached ? std::to_string(*r.iters_to_epsilon)
                              : "not_reached";
        }
        os << csv_line({r.algorithm, r.tau, r.batch, r.sigma2, r.k, r.eta,
                        r.trials, opt_cell(r.mean_subopt),
                        opt_cell(r.std_error), opt_cell(r.exact_expectation),
                        opt_cell(r.bound_value), iters});
    }
    return os.str();
}

std::string ResultTable::metadata_json() const {
    const std::string spec_json = sweep_spec_to_json(spec);
    nlohmann::json j;
    j["spec"] = nlohmann::json::parse(spec_json);
    j["spec_hash"] = content_hash(spec_json);
    j["code_version"] = kCodeVersion;
    j["rows"] = rows.size();
    j["notes"] = {
        {"grids", "desk-scale instantiation chosen by this tool"},
        {"crossover_multiplier", spec.crossover_multiplier},
        {"minibatch_budget_rule", "equal stochastic-gradient evaluations"},
    };
    return j.dump(2);
}

std::string sweep_spec_to_json(const SweepSpec& spec) {
    nlohmann::json j;
    j["kind"] = sweep_kind_name(spec.kind);
    j["d"] = spec.d;
    j["lambda"] = spec.lambda;
    j["mu"] = spec.mu;
    j["e0_norm"] = spec.e0_norm;
    j["taus"] = spec.taus;
    j["sigma2s"] = spec.sigma2s;
    j["ks"] = spec.ks;
    j["epsilon"] = spec.epsilon;
    j["budget"] = spec.budget;
    j["trials"] = spec.trials;
    j["seed"] = spec.seed;
    j["threads"] = spec.threads;
    j["crossover_multiplier"] = spec.crossover_multiplier;
    j["eta_rule"] = spec.eta_rule;
    return j.dump(2);
}

SweepSpec sweep_spec_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SweepSpec spec;
    spec.kind = sweep_kind_from_name(j.at("kind").get<std::string>());
    spec.d = j.value("d", spec.d);
    spec.lambda = j.value("lambda", spec.lambda);
    spec.mu = j.value("mu", spec.mu);
    spec.e0_norm = j.value("e0_norm", spec.e0_norm);
    spec.taus = j.value("taus", spec.taus);
    spec.sigma2s = j.value("sigma2s", spec.sigma2s);
    spec.ks = j.value("ks", spec.ks);
    spec.epsilon = j.value("epsilon", spec.epsilon);
    spec.budget = j.value("budget", spec.budget);
    spec.trials = j.value("trials", spec.trials);
    spec.seed = j.value("seed", spec.seed);
    spec.threads = j.value("threads", spec.threads);
    spec.crossover_multiplier =
        j.value("crossover_multiplier", spec.crossover_multiplier);
    spec.eta_rule = j.value("eta_rule", spec.eta_rule);
    return spec;
}

}  // namespace delaygrad
