#include "delaygrad/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "delaygrad/errors.hpp"
#include "delaygrad/rng.hpp"

namespace delaygrad {

namespace {

constexpr double kKernelEigTol = 1e-12;   // relative to max eigenvalue
constexpr double kKernelProjTol = 1e-9;   // relative to ||b||

void check_dim(const QuadraticProblem& p, const Eigen::VectorXd& w) {
    if (w.size() != p.dim()) {
        throw DimensionMismatch("vector has dimension " +
                                std::to_string(w.size()) + ", problem has " +
                                std::to_string(p.dim()));
    }
}

}  // namespace

double evaluate(const QuadraticProblem& p, const Eigen::VectorXd& w) {
    check_dim(p, w);
    if (p.spectral()) {
        return 0.5 * w.cwiseProduct(p.eigenvalues).dot(w) + p.linear.dot(w) +
               p.offset;
    }
    return 0.5 * w.dot(p.dense_a * w) + p.linear.dot(w) + p.offset;
}

Eigen::VectorXd gradient(const QuadraticProblem& p, const Eigen::VectorXd& w) {
    check_dim(p, w);
    if (p.spectral()) {
        return p.eigenvalues.cwiseProduct(w) + p.linear;
    }
    return p.dense_a * w + p.linear;
}

double suboptimality(const QuadraticProblem& p, const Eigen::VectorXd& w) {
    const double s = evaluate(p, w) - p.f_star;
    // Rounding can leave a residue of order eps*(1+|f_star|) below zero.
    return s < 0.0 && s > -1e-12 * (1.0 + std::abs(p.f_star)) ? 0.0 : s;
}

std::optional<Eigen::VectorXd> minimizer_spectral(const Eigen::VectorXd& a,
                                                  const Eigen::VectorXd& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("eigenvalue and linear-term sizes differ");
    }
    const double amax = a.size() > 0 ? a.maxCoeff() : 0.0;
    const double eig_cut = kKernelEigTol * amax;
    const double bnorm = b.norm();

    double kernel_mass = 0.0;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(a.size());
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] > eig_cut) {
            w[i] = -b[i] / a[i];
        } else {
            kernel_mass += b[i] * b[i];
        }
    }
    if (std::sqrt(kernel_mass) > kKernelProjTol * bnorm) return std::nullopt;
    return w;
}

std::optional<Eigen::VectorXd> minimizer_dense(const Eigen::MatrixXd& a,
                                               const Eigen::VectorXd& b) {
    if (a.rows() != a.cols() || a.rows() != b.size()) {
        throw DimensionMismatch("matrix and linear-term sizes differ");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) {
        throw NoConvergence("eigendecomposition failed");
    }
    const Eigen::VectorXd coords = es.eigenvectors().transpose() * b;
    const auto w_spec = minimizer_spectral(es.eigenvalues(), coords);
    if (!w_spec) return std::nullopt;
    return es.eigenvectors() * (*w_spec);
}

QuadraticProblem make_spectral_problem(Eigen::VectorXd eigenvalues,
                                       Eigen::VectorXd b, double c) {
    if (eigenvalues.size() != b.size() || eigenvalues.size() == 0) {
        throw DimensionMismatch("spectral problem needs matching nonempty a, b");
    }
    if (eigenvalues.minCoeff() < 0.0) {
        throw InvalidArgument("negative eigenvalue in spectral problem");
    }
    QuadraticProblem p;
    p.eigenvalues = std::move(eigenvalues);
    p.linear = std::move(b);
    p.offset = c;
    p.mu = p.eigenvalues.maxCoeff();
    p.lambda = p.eigenvalues.minCoeff();
    auto w = minimizer_spectral(p.eigenvalues, p.linear);
    if (!w) throw UnboundedBelow("linear term has a kernel component");
    p.w_star = std::move(*w);
    p.f_star = evaluate(p, p.w_star);
    return p;
}

namespace {

QuadraticProblem make_dense_impl(Eigen::MatrixXd a, Eigen::VectorXd b, double c,
                                 const double* mu_bound,
                                 const double* lambda_bound) {
    if (a.rows() != a.cols() || a.rows() != b.size() || b.size() == 0) {
        throw DimensionMismatch("dense problem needs square A matching b");
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (((a - a.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale) {
        throw InvalidArgument("dense matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) {
        throw NoConvergence("eigendecomposition failed");
    }
    Eigen::VectorXd eigs = es.eigenvalues();
    if (eigs.minCoeff() < -1e-8 * scale) {
        throw InvalidArgument("dense matrix is not positive semi-definite");
    }
    QuadraticProblem p;
    p.dense_a = std::move(a);
    p.eigenvalues = eigs;
    p.linear = std::move(b);
    p.offset = c;
    if (mu_bound != nullptr) {
        if (eigs.maxCoeff() > *mu_bound + 1e-8 ||
            eigs.minCoeff() < *lambda_bound - 1e-8) {
            throw InvalidArgument("spectrum escapes the declared [lambda, mu]");
        }
        p.mu = *mu_bound;
        p.lambda = *lambda_bound;
    } else {
        p.mu = eigs.maxCoeff();
        p.lambda = std::max(0.0, eigs.minCoeff());
    }
    const Eigen::VectorXd coords = es.eigenvectors().transpose() * p.linear;
    const auto w_spec = minimizer_spectral(eigs, coords);
    if (!w_spec) throw UnboundedBelow("linear term has a kernel component");
    p.w_star = es.eigenvectors() * (*w_spec);
    p.f_star = evaluate(p, p.w_star);
    return p;
}

}  // namespace

QuadraticProblem make_dense_problem(Eigen::MatrixXd a, Eigen::VectorXd b,
                                    double c) {
    return make_dense_impl(std::move(a), std::move(b), c, nullptr, nullptr);
}

QuadraticProblem make_dense_problem(Eigen::MatrixXd a, Eigen::VectorXd b,
                                    double c, double mu_bound,
                                    double lambda_bound) {
    return make_dense_impl(std::move(a), std::move(b), c, &mu_bound,
                           &lambda_bound);
}

std::pair<QuadraticProblem, Eigen::VectorXd> random_instance(
    int d, double lambda, double mu, double e0_norm, std::uint64_t seed) {
    if (d < 2) throw InvalidArgument("random_instance needs d >= 2");
    if (lambda < 0.0 || lambda > mu) {
        throw InvalidArgument("random_instance needs 0 <= lambda <= mu");
    }
    if (e0_norm < 0.0) throw InvalidArgument("e0_norm must be >= 0");

    rng::Stream eig_stream(seed, 0, 0);
    rng::Stream dir_stream(seed, 0, 1);

    Eigen::VectorXd a(d);
    a[0] = lambda;
    a[1] = mu;
    for (int i = 2; i < d; ++i) {
        a[i] = lambda + (mu - lambda) * eig_stream.next_uniform01();
    }
    std::sort(a.data(), a.data() + d);

    const Eigen::VectorXd w_star = dir_stream.unit_vector(d);
    // b taken as -a.*w_star so the gradient at w_star cancels exactly.
    const Eigen::VectorXd b = -a.cwiseProduct(w_star);

    QuadraticProblem p;
    p.eigenvalues = a;
    p.linear = b;
    p.offset = 0.0;
    p.mu = mu;
    p.lambda = lambda;
    p.w_star = w_star;
    p.f_star = evaluate(p, w_star);

    const Eigen::VectorXd w0 = w_star + e0_norm * dir_stream.unit_vector(d);
    return {std::move(p), w0};
}

std::string problem_to_json(const QuadraticProblem& p) {
    nlohmann::json j;
    if (p.spectral()) {
        j["eigenvalues"] = std::vector<double>(
            p.eigenvalues.data(), p.eigenvalues.data() + p.eigenvalues.size());
    } else {
        std::vector<std::vector<double>> rows(p.dim());
        for (int i = 0; i < p.dim(); ++i) {
            rows[i].assign(p.dense_a.row(i).begin(), p.dense_a.row(i).end());
        }
        j["dense_A"] = rows;
    }
    j["b"] = std::vector<double>(p.linear.data(),
                                 p.linear.data() + p.linear.size());
    j["c"] = p.offset;
    j["w_star"] = std::vector<double>(p.w_star.data(),
                                      p.w_star.data() + p.w_star.size());
    return j.dump();
}

QuadraticProblem problem_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const std::vector<double> bv = j.at("b").get<std::vector<double>>();
    Eigen::VectorXd b =
        Eigen::Map<const Eigen::VectorXd>(bv.data(), bv.size());
    const double c = j.at("c").get<double>();
    if (j.contains("eigenvalues")) {
        const auto av = j.at("eigenvalues").get<std::vector<double>>();
        Eigen::VectorXd a =
            Eigen::Map<const Eigen::VectorXd>(av.data(), av.size());
        return make_spectral_problem(std::move(a), std::move(b), c);
    }
    const auto rows = j.at("dense_A").get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd a(rows.size(), rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) {
            throw InvalidArgument("dense_A is not square");
        }
        for (size_t k = 0; k < rows[i].size(); ++k) a(i, k) = rows[i][k];
    }
    return make_dense_problem(std::move(a), std::move(b), c);
}

}  // namespace delaygrad
