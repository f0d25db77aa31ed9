#include "delaygrad/cli.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "delaygrad/bounds.hpp"
#include "delaygrad/dynamics.hpp"
#include "delaygrad/errors.hpp"
#include "delaygrad/experiments.hpp"
#include "delaygrad/genfun.hpp"
#include "delaygrad/io.hpp"
#include "delaygrad/quadratic.hpp"
#include "delaygrad/roots.hpp"
#include "delaygrad/thresholds.hpp"
#include "delaygrad/worstcase.hpp"

namespace delaygrad {

namespace {

void emit(const std::string& text, const std::string& out_path,
          std::ostream& fallback) {
    if (out_path.empty()) {
        fallback << text;
    } else {
        write_text_file(out_path, text);
    }
}

double parse_eta_flag(const std::string& text, const char* flag) {
    try {
        size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument(std::string(flag) +
                              ": expected a number, \"paper\", or \"tuned\", "
                              "got \"" +
                              text + "\"");
    }
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    std::string alg = "dgd";
    int d = 6;
    double lambda = 0.1;
    double mu = 1.0;
    double e0 = 1.0;
    std::uint64_t seed = 1;
    std::string problem_path;
    int tau = 0;
    std::string eta = "paper";
    double sigma2 = 0.0;
    std::string noise = "gaussian";
    int k = 100;
    int batch = 1;
    std::string agd_variant = "strong";
    std::string out;
    std::string format = "csv";
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SimulateOptions, alg, d, lambda, mu, e0,
                                   seed, problem_path, tau, eta, sigma2, noise,
                                   k, batch, agd_variant, out, format)

NoiseModel make_noise(const std::string& kind, double sigma2) {
    if (kind == "none" || sigma2 == 0.0) return NoiseModel::none();
    if (kind == "gaussian") return NoiseModel::isotropic_gaussian(sigma2);
    if (kind == "sphere") {
        return NoiseModel::spherical_fixed_norm(std::sqrt(sigma2));
    }
    throw InvalidArgument("--noise: expected none, gaussian, or sphere");
}

int run_simulate(const SimulateOptions& opt, std::ostream& out) {
    QuadraticProblem p;
    Eigen::VectorXd w0;
    if (!opt.problem_path.empty()) {
        p = problem_from_json(read_text_file(opt.problem_path));
        rng::Stream dir(opt.seed, 0, 1);
        w0 = p.w_star + opt.e0 * dir.unit_vector(p.dim());
    } else {
        std::tie(p, w0) =
            random_instance(opt.d, opt.lambda, opt.mu, opt.e0, opt.seed);
    }

    double eta;
    if (opt.eta == "paper") {
        eta = opt.alg == "idle_gd" ? max_certified_step(p.mu, 0)
                                   : max_certified_step(p.mu, opt.tau);
    } else if (opt.eta == "tuned") {
        eta = p.lambda > 0.0
                  ? tune_eta_strong(p.mu, p.lambda, std::max(1, opt.tau),
                                    opt.sigma2, opt.e0 * opt.e0,
                                    std::max(1, opt.k))
                  : tune_eta_convex(p.mu, std::max(1, opt.tau),
                                    std::sqrt(opt.sigma2), opt.e0,
                                    std::max(1, opt.k));
    } else {
        eta = parse_eta_flag(opt.eta, "--eta");
    }

    Trajectory traj;
    if (opt.alg == "dgd" || opt.alg == "sdgd") {
        DelayedRunConfig cfg;
        cfg.tau = opt.tau;
        cfg.eta = eta;
        cfg.iterations = opt.k;
        cfg.seed = opt.seed;
        cfg.store_iterates = false;
        if (opt.alg == "sdgd") cfg.noise = make_noise(opt.noise, opt.sigma2);
        traj = opt.alg == "dgd" ? run_dgd(p, w0, cfg) : run_sdgd(p, w0, cfg);
    } else if (opt.alg == "minibatch") {
        traj = run_minibatch_sgd(p, w0, eta, opt.batch, opt.k,
                                 make_noise(opt.noise, opt.sigma2), opt.seed);
    } else if (opt.alg == "idle_gd") {
        traj = run_idle_gd(p, w0, eta, opt.tau, opt.k);
    } else if (opt.alg == "idle_agd") {
        if (opt.agd_variant != "strong" && opt.agd_variant != "convex") {
            throw InvalidArgument("--agd-variant: expected strong or convex");
        }
        traj = run_idle_agd(p, w0, opt.tau, opt.k,
                            opt.agd_variant == "strong"
                                ? AgdVariant::StronglyConvex
                                : AgdVariant::Convex);
    } else {
        throw InvalidArgument(
            "--alg: expected dgd, sdgd, minibatch, idle_gd, or idle_agd");
    }

    if (opt.format == "csv") {
        emit(trajectory_to_csv(traj), opt.out, out);
    } else if (opt.format == "json") {
        nlohmann::json j;
        j["algorithm"] = traj.algorithm;
        j["tau"] = traj.tau;
        j["eta"] = traj.eta;
        j["sigma2"] = traj.sigma2;
        j["seed"] = traj.seed;
        j["eta_certified"] = traj.eta_certified;
        j["subopt"] = traj.subopt;
        emit(j.dump(2) + "\n", opt.out, out);
    } else {
        throw InvalidArgument("--format: expected csv or json");
    }
    return 0;
}

// ------------------------------------------------------------------ coeffs

struct CoeffsOptions {
    double alpha = 0.1;
    int tau = 0;
    int k = 100;
    std::string method = "auto";
    std::string out;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CoeffsOptions, alpha, tau, k, method, out)

int run_coeffs(const CoeffsOptions& opt, std::ostream& out) {
    CoefficientSeries s;
    if (opt.method == "recurrence") {
        s = coeffs_recurrence(opt.alpha, opt.tau, opt.k);
    } else if (opt.method == "partial_fractions") {
        s = coeffs_partial_fractions(opt.alpha, opt.tau, opt.k);
    } else if (opt.method == "auto") {
        try {
            s = opt.alpha > 0.0
                    ? coeffs_partial_fractions(opt.alpha, opt.tau, opt.k)
                    : coeffs_recurrence(opt.alpha, opt.tau, opt.k);
        } catch (const NearlyRepeatedRoots&) {
            s = coeffs_recurrence(opt.alpha, opt.tau, opt.k);
        }
    } else {
        throw InvalidArgument(
            "--method: expected recurrence, partial_fractions, or auto");
    }
    emit(series_to_csv(s), opt.out, out);
    return 0;
}

// ------------------------------------------------------------------- roots

struct RootsOptions {
    double alpha = 0.01;
    int tau = 1;
    bool certify = false;
    std::string out;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RootsOptions, alpha, tau, certify, out)

int run_roots(const RootsOptions& opt, std::ostream& out) {
    if (opt.certify) {
        emit(certificate_to_json(certify_lemma1(opt.alpha, opt.tau)) + "\n",
             opt.out, out);
    } else {
        emit(root_set_to_json(find_roots(opt.alpha, opt.tau)) + "\n", opt.out,
             out);
    }
    return 0;
}

// ------------------------------------------------------------------ bounds

struct BoundsOptions {
    std::string kind = "thm1";
    double mu = 1.0;
    double lambda = 0.1;
    double eta = 0.0;  // 0 -> 1/(20 mu (tau+1))
    int tau = 0;
    double sigma2 = 0.0;
    double e0_sq = 1.0;
    int k = 100;
    bool force = false;
    std::string format = "csv";
    std::string out;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BoundsOptions, kind, mu, lambda, eta, tau,
                                   sigma2, e0_sq, k, force, format, out)

BoundKind bound_kind_from_flag(const std::string& name) {
    if (name == "thm1") return BoundKind::Thm1Upper;
    if (name == "thm2") return BoundKind::Thm2Upper;
    if (name == "thm3_strong") return BoundKind::Thm3LowerStrong;
    if (name == "thm3_convex") return BoundKind::Thm3LowerConvex;
    if (name == "thm4_strong") return BoundKind::Thm4StrongUpper;
    if (name == "thm4_convex") return BoundKind::Thm4ConvexUpper;
    throw InvalidArgument(
        "--kind: expected thm1, thm2, thm3_strong, thm3_convex, thm4_strong, "
        "or thm4_convex");
}

int run_bounds(const BoundsOptions& opt, std::ostream& out) {
    BoundParams params;
    params.mu = opt.mu;
    params.lambda = opt.lambda;
    params.tau = opt.tau;
    params.sigma2 = opt.sigma2;
    params.e0_sq = opt.e0_sq;
    params.eta =
        opt.eta > 0.0 ? opt.eta : max_certified_step(opt.mu, opt.tau);
    const BoundReport r =
        evaluate_bound(bound_kind_from_flag(opt.kind), params, opt.k,
                       opt.force);
    if (opt.format == "csv") {
        emit(bound_report_to_csv(r), opt.out, out);
    } else if (opt.format == "json") {
        emit(bound_report_to_json(r) + "\n", opt.out, out);
    } else {
        throw InvalidArgument("--format: expected csv or json");
    }
    return 0;
}

// -------------------------------------------------------------------- tune

struct TuneOptions {
    std::string curvature = "strong";
    double mu = 1.0;
    double lambda = 0.1;
    int tau = 1;
    double sigma2 = 1.0;
    double e0 = 1.0;
    int k = 100;
    std::string out;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TuneOptions, curvature, mu, lambda, tau,
                                   sigma2, e0, k, out)

int run_tune(const TuneOptions& opt, std::ostream& out) {
    double eta;
    if (opt.curvature == "strong") {
        eta = tune_eta_strong(opt.mu, opt.lambda, opt.tau, opt.sigma2,
                              opt.e0 * opt.e0, opt.k);
    } else if (opt.curvature == "convex") {
        eta = tune_eta_convex(opt.mu, opt.tau, std::sqrt(opt.sigma2), opt.e0,
                              opt.k);
    } else {
        throw InvalidArgument("--curvature: expected strong or convex");
    }
    emit("{\"eta\": " + fmt_g17(eta) + "}\n", opt.out, out);
    return 0;
}

// ------------------------------------------------------------- lowerbound

struct LowerBoundOptions {
    std::string kind = "strong";
    double mu = 1.0;
    double lambda = 0.25;
    int d = 0;  // 0 -> smallest admissible dimension
    int tau = 1;
    int k = 50;
    std::string alg = "dgd";
    std::string out;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LowerBoundOptions, kind, mu, lambda, d, tau,
                                   k, alg, out)

SpanAlgorithm span_algorithm_from_flag(const std::string& name) {
    if (name == "dgd") return SpanAlgorithm::Dgd;
    if (name == "idle_gd") return SpanAlgorithm::IdleGd;
    if (name == "idle_agd") return SpanAlgorithm::IdleAgd;
    throw InvalidArgument("--alg: expected dgd, idle_gd, or idle_agd");
}

int run_lowerbound(const LowerBoundOptions& opt, std::ostream& out) {
    WorstCaseInstance inst;
    if (opt.kind == "strong") {
        int d = opt.d;
        if (d == 0) {
            d = std::max(4, strong_min_dimension(opt.mu, opt.lambda, opt.k,
                                                 opt.tau));
        }
        inst = build_strong_instance(opt.mu, opt.lambda, d);
    } else if (opt.kind == "convex") {
        int d = opt.d;
        if (d == 0) d = 2 * opt.k / (opt.tau + 1) + 3;
        inst = build_convex_instance(opt.mu, d, opt.k, opt.tau);
    } else {
        throw InvalidArgument("--kind: expected strong or convex");
    }
    const LowerBoundReport rep = verify_thm3(
        inst, span_algorithm_from_flag(opt.alg), opt.tau, opt.k);
    emit(lower_bound_report_to_json(rep) + "\n", opt.out, out);
    return 0;
}

// ------------------------------------------------------------------- sweep

struct SweepOptions {
    std::string spec_path;
    std::string out_prefix;
    int threads = 0;  // 0: take the spec's value
};

int run_sweep_cmd(const SweepOptions& opt, std::ostream& out) {
    SweepSpec spec = sweep_spec_from_json(read_text_file(opt.spec_path));
    if (opt.threads > 0) spec.threads = opt.threads;
    const ResultTable table = run_sweep(spec);
    if (opt.out_prefix.empty()) {
        out << table.to_csv();
    } else {
        write_text_file(opt.out_prefix + ".csv", table.to_csv());
        write_text_file(opt.out_prefix + ".meta.json",
                        table.metadata_json() + "\n");
    }
    return 0;
}

// --------------------------------------------------------------- plumbing

// Wires one subcommand: binds flags into `opt`, supports --config (replace
// the whole option set from a JSON file; other flags may not be mixed in)
// and --dump-config (print the resolved set instead of running).
template <typename Options, typename Runner>
void attach(CLI::App& app, const std::string& name, const std::string& help,
            Options& opt, std::ostream& out_stream, int& exit_code,
            std::vector<std::function<void(CLI::App&, Options&)>> bind,
            Runner runner) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto config_path = std::make_shared<std::string>();
    auto dump = std::make_shared<bool>(false);
    for (auto& b : bind) b(*sub, opt);
    sub->add_option("--config", *config_path,
                    "load all options from a JSON file (excludes other flags)");
    sub->add_flag("--dump-config", *dump,
                  "print the resolved options as JSON and exit");
    sub->callback([&, sub, config_path, dump]() {
        if (!config_path->empty()) {
            int explicit_flags = 0;
            for (const auto* o : sub->get_options()) {
                if (o->count() > 0 && o->get_name() != "--config" &&
                    o->get_name() != "--dump-config") {
                    ++explicit_flags;
                }
            }
            if (explicit_flags > 0) {
                throw InvalidArgument(
                    "--config cannot be combined with other options");
            }
            nlohmann::json j =
                nlohmann::json::parse(read_text_file(*config_path));
            opt = j.get<Options>();
        }
        if (*dump) {
            const nlohmann::json j = opt;
            out_stream << j.dump(2) << "\n";
            exit_code = 0;
            return;
        }
        exit_code = runner(opt, out_stream);
    });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"delayed-gradient quadratic optimization workbench"};
    app.require_subcommand(1);
    int exit_code = 0;

    SimulateOptions sim;
    attach<SimulateOptions>(
        app, "simulate", "run one algorithm and emit its trajectory", sim, out,
        exit_code,
        {[](CLI::App& s, SimulateOptions& o) {
            s.add_option("--alg", o.alg,
                         "dgd | sdgd | minibatch | idle_gd | idle_agd");
            s.add_option("--d", o.d, "problem dimension");
            s.add_option("--lambda", o.lambda, "strong convexity");
            s.add_option("--mu", o.mu, "smoothness");
            s.add_option("--e0", o.e0, "initial distance to the minimizer");
            s.add_option("--seed", o.seed, "master seed");
            s.add_option("--problem", o.problem_path,
                         "load the problem from a JSON file instead");
            s.add_option("--tau", o.tau, "gradient delay");
            s.add_option("--eta", o.eta, "step size, or paper/tuned");
            s.add_option("--sigma2", o.sigma2, "noise second moment");
            s.add_option("--noise", o.noise, "none | gaussian | sphere");
            s.add_option("--k", o.k, "iteration count");
            s.add_option("--batch", o.batch, "minibatch size");
            s.add_option("--agd-variant", o.agd_variant, "strong | convex");
            s.add_option("--out", o.out, "output path (default stdout)");
            s.add_option("--format", o.format, "csv | json");
        }},
        run_simulate);

    CoeffsOptions co;
    attach<CoeffsOptions>(
        app, "coeffs", "coefficient series of the error recursion", co, out,
        exit_code,
        {[](CLI::App& s, CoeffsOptions& o) {
            s.add_option("--alpha", o.alpha, "contraction parameter");
            s.add_option("--tau", o.tau, "gradient delay");
            s.add_option("--k", o.k, "last index");
            s.add_option("--method", o.method,
                         "recurrence | partial_fractions | auto");
            s.add_option("--out", o.out, "output path (default stdout)");
        }},
        run_coeffs);

    RootsOptions ro;
    attach<RootsOptions>(
        app, "roots", "characteristic-polynomial roots and certification", ro,
        out, exit_code,
        {[](CLI::App& s, RootsOptions& o) {
            s.add_option("--alpha", o.alpha, "contraction parameter");
            s.add_option("--tau", o.tau, "gradient delay");
            s.add_flag("--certify", o.certify, "evaluate the lemma clauses");
            s.add_option("--out", o.out, "output path (default stdout)");
        }},
        run_roots);

    BoundsOptions bo;
    attach<BoundsOptions>(
        app, "bounds", "evaluate a convergence-bound curve", bo, out,
        exit_code,
        {[](CLI::App& s, BoundsOptions& o) {
            s.add_option("--kind", o.kind,
                         "thm1 | thm2 | thm3_strong | thm3_convex | "
                         "thm4_strong | thm4_convex");
            s.add_option("--mu", o.mu, "smoothness");
            s.add_option("--lambda", o.lambda, "strong convexity");
            s.add_option("--eta", o.eta, "step size (0: certified cap)");
            s.add_option("--tau", o.tau, "gradient delay");
            s.add_option("--sigma2", o.sigma2, "noise second moment");
            s.add_option("--e0sq", o.e0_sq, "squared initial distance");
            s.add_option("--k", o.k, "last iteration");
            s.add_flag("--force", o.force,
                       "evaluate outside the validity region, flagged");
            s.add_option("--format", o.format, "csv | json");
            s.add_option("--out", o.out, "output path (default stdout)");
        }},
        run_bounds);

    TuneOptions to;
    attach<TuneOptions>(
        app, "tune", "horizon-aware step-size choice", to, out, exit_code,
        {[](CLI::App& s, TuneOptions& o) {
            s.add_option("--curvature", o.curvature, "strong | convex");
            s.add_option("--mu", o.mu, "smoothness");
            s.add_option("--lambda", o.lambda, "strong convexity");
            s.add_option("--tau", o.tau, "gradient delay");
            s.add_option("--sigma2", o.sigma2, "noise second moment");
            s.add_option("--e0", o.e0, "initial distance");
            s.add_option("--k", o.k, "horizon");
            s.add_option("--out", o.out, "output path (default stdout)");
        }},
        run_tune);

    LowerBoundOptions lo;
    attach<LowerBoundOptions>(
        app, "lowerbound", "hard-instance lower-bound verification", lo, out,
        exit_code,
        {[](CLI::App& s, LowerBoundOptions& o) {
            s.add_option("--kind", o.kind, "strong | convex");
            s.add_option("--mu", o.mu, "smoothness");
            s.add_option("--lambda", o.lambda, "strong convexity");
            s.add_option("--d", o.d, "dimension (0: smallest admissible)");
            s.add_option("--tau", o.tau, "gradient delay");
            s.add_option("--k", o.k, "iteration horizon");
            s.add_option("--alg", o.alg, "dgd | idle_gd | idle_agd");
            s.add_option("--out", o.out, "output path (default stdout)");
        }},
        run_lowerbound);

    SweepOptions so;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "run a parameter sweep from a spec file");
    sweep_cmd->add_option("--spec", so.spec_path, "sweep spec JSON file")
        ->required();
    sweep_cmd->add_option("--out", so.out_prefix,
                          "output prefix (writes .csv and .meta.json)");
    sweep_cmd->add_option("--threads", so.threads,
                          "worker threads (0: use the spec's value)");
    sweep_cmd->callback([&]() { exit_code = run_sweep_cmd(so, out); });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("delaygrad");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends.
            return app.exit(e, out, err);
        }
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}

}  // namespace delaygrad
