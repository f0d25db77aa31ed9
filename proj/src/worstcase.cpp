#include "delaygrad/worstcase.hpp"

#include <cmath>

#include <json.hpp>

#include "delaygrad/errors.hpp"
#include "delaygrad/thresholds.hpp"

namespace delaygrad {

namespace {

Eigen::MatrixXd tridiagonal(int d, double corner) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        t(i, i) = 2.0;
        if (i + 1 < d) {
            t(i, i + 1) = -1.0;
            t(i + 1, i) = -1.0;
        }
    }
    t(d - 1, d - 1) = corner;
    return t;
}

}  // namespace

WorstCaseInstance build_strong_instance(double mu, double lambda, int d) {
    if (!(mu > lambda) || !(lambda > 0.0)) {
        throw InvalidArgument("build_strong_instance needs mu > lambda > 0");
    }
    if (d < 4) throw InvalidArgument("build_strong_instance needs d >= 4");

    const double kappa = mu / lambda;
    const double rk = std::sqrt(kappa);
    const double q = (rk - 1.0) / (rk + 1.0);
    const double scale = lambda * (kappa - 1.0) / 4.0;

    // The corner entry is pinned by requiring (scale T + lambda I) w* to
    // cancel against scale * e_1 in the last row when w* = (q, ..., q^d).
    Eigen::MatrixXd t = tridiagonal(d, (rk + 3.0) / (rk + 1.0));
    Eigen::MatrixXd hessian = scale * t + lambda * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    b[0] = -scale;

    WorstCaseInstance inst;
    inst.kind = WorstCaseKind::StrongLan;
    inst.dim = d;
    inst.mu = mu;
    inst.lambda = lambda;
    inst.q = q;
    inst.problem = make_dense_problem(std::move(hessian), std::move(b), 0.0,
                                      mu, lambda);

    double worst = 0.0;
    double qp = 1.0;
    for (int i = 0; i < d; ++i) {
        qp *= q;
        worst = std::max(worst, std::abs(inst.problem.w_star[i] - qp));
    }
    if (worst > 1e-8) {
        throw NoConvergence("minimizer drifted from (q, ..., q^d) by " +
                            std::to_string(worst));
    }
    return inst;
}

WorstCaseInstance build_convex_instance(double mu, int d, int k, int tau) {
    if (!(mu > 0.0) || tau < 0) {
        throw InvalidArgument("build_convex_instance needs mu > 0, tau >= 0");
    }
    if (k < tau + 1 || 2 * k > (d - 1) * (tau + 1)) {
        throw InvalidArgument(
            "build_convex_instance needs tau+1 <= k <= (d-1)(tau+1)/2");
    }
    const int m = 2 * (k / (tau + 1)) + 1;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    a.topLeftCorner(m, m) = (mu / 4.0) * tridiagonal(m, 2.0);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    b[0] = -mu / 4.0;

    WorstCaseInstance inst;
    inst.kind = WorstCaseKind::ConvexNesterov;
    inst.dim = d;
    inst.mu = mu;
    inst.lambda = 0.0;
    inst.k_target = k;
    inst.active_block = m;
    inst.problem = make_dense_problem(std::move(a), std::move(b), 0.0, mu, 0.0);
    return inst;
}

int strong_min_dimension(double mu, double lambda, int K, int tau) {
    const double rk = std::sqrt(mu / lambda);
    const double q = (rk - 1.0) / (rk + 1.0);
    const int tail = static_cast<int>(
        std::ceil(std::log(2.0) / (-2.0 * std::log(q))));
    return K / (tau + 1) + 2 * tail;
}

SpanProfile span_profile(const std::vector<Eigen::VectorXd>& iterates,
                         int tau) {
    SpanProfile prof;
    prof.max_nonzero_index.reserve(iterates.size());
    for (size_t k = 0; k < iterates.size(); ++k) {
        const Eigen::VectorXd& w = iterates[k];
        int top = 0;
        for (int i = static_cast<int>(w.size()) - 1; i >= 0; --i) {
            if (w[i] != 0.0) {
                top = i + 1;
                break;
            }
        }
        prof.max_nonzero_index.push_back(top);
        const int allowed = static_cast<int>(k) / (tau + 1);
        if (top > allowed) prof.pass = false;
    }
    return prof;
}

std::string span_algorithm_name(SpanAlgorithm a) {
    switch (a) {
        case SpanAlgorithm::Dgd: return "dgd";
        case SpanAlgorithm::IdleGd: return "idle_gd";
        case SpanAlgorithm::IdleAgd: return "idle_agd";
    }
    return "unknown";
}

Trajectory run_span_algorithm(const WorstCaseInstance& inst, SpanAlgorithm a,
                              int tau, int iterations) {
    const Eigen::VectorXd w0 = Eigen::VectorXd::Zero(inst.dim);
    switch (a) {
        case SpanAlgorithm::Dgd: {
            DelayedRunConfig cfg;
            cfg.tau = tau;
            cfg.eta = max_certified_step(inst.mu, tau);
            cfg.iterations = iterations;
            cfg.store_iterates = true;
            return run_dgd(inst.problem, w0, cfg);
        }
        case SpanAlgorithm::IdleGd:
            return run_idle_gd(inst.problem, w0,
                               max_certified_step(inst.mu, 0), tau,
                               iterations);
        case SpanAlgorithm::IdleAgd:
            return run_idle_agd(inst.problem, w0, tau, iterations,
                                inst.kind == WorstCaseKind::StrongLan
                                    ? AgdVariant::StronglyConvex
                                    : AgdVariant::Convex);
    }
    throw InvalidArgument("unknown algorithm");
}

LowerBoundReport verify_thm3(const WorstCaseInstance& inst, SpanAlgorithm a,
                             int tau, int iterations) {
    if (iterations < tau + 1) {
        throw InvalidArgument("verify_thm3 needs at least tau+1 iterations");
    }
    if (inst.kind == WorstCaseKind::StrongLan &&
        inst.dim < strong_min_dimension(inst.mu, inst.lambda, iterations, tau)) {
        throw InvalidArgument(
            "dimension too small for the requested iteration range");
    }

    const Trajectory traj = run_span_algorithm(inst, a, tau, iterations);
    const double e0_sq = inst.problem.w_star.squaredNorm();  // w0 = 0

    LowerBoundReport rep;
    rep.kind = inst.kind;
    rep.algorithm = a;
    rep.tau = tau;
    rep.span_pass = span_profile(traj.iterates, tau).pass;

    const Curvature curv = inst.kind == WorstCaseKind::StrongLan
                               ? Curvature::Strong
                               : Curvature::Convex;
    int k_lo = tau + 1, k_hi = iterations;
    if (inst.kind == WorstCaseKind::ConvexNesterov) {
        // The block is sized for one target iteration; other k need their
        // own instance.
        k_lo = k_hi = std::min(inst.k_target, iterations);
    }
    for (int k = k_lo; k <= k_hi; ++k) {
        LowerBoundRow row;
        row.k = k;
        row.lower =
            thm3_lower(curv, inst.mu, inst.lambda, tau, k, e0_sq);
        row.observed = traj.subopt[k];
        row.margin = row.observed - row.lower;
        if (row.margin < 0.0) rep.bound_pass = false;
        rep.rows.push_back(row);
    }
    return rep;
}

std::string lower_bound_report_to_json(const LowerBoundReport& r) {
    nlohmann::json j;
    j["kind"] = r.kind == WorstCaseKind::StrongLan ? "strong_lan"
                                                   : "convex_nesterov";
    j["algorithm"] = span_algorithm_name(r.algorithm);
    j["tau"] = r.tau;
    j["bound_pass"] = r.bound_pass;
    j["span_pass"] = r.span_pass;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"k", row.k},
                        {"lower", row.lower},
                        {"observed", row.observed},
                        {"margin", row.margin}});
    }
    j["rows"] = rows;
    return j.dump(2);
}

}  // namespace delaygrad
