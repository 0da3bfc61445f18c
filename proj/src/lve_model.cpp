#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "lve_internal.hpp"
#include "lvelab/errors.hpp"
#include "lvelab/lve.hpp"
#include "lvelab/rng.hpp"

namespace lvelab::lve {

void LoopVertexModel::validate() const {
    if (N < 1) throw ContractViolation("matrix size N must be positive");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("coupling must be real and non-negative");
}

void ResolventAudit::merge(const ResolventAudit& other) {
    samples += other.samples;
    violations += other.violations;
    max_norm = std::max(max_norm, other.max_norm);
}

namespace detail {

Eigen::MatrixXcd sample_gue(int N, std::mt19937_64& rng, std::normal_distribution<double>& normal) {
    Eigen::MatrixXcd g(N, N);
    const double s = std::sqrt(0.5);
    for (int i = 0; i < N; ++i) {
        g(i, i) = normal(rng);
        for (int j = i + 1; j < N; ++j) {
            const double re = normal(rng) * s;
            const double im = normal(rng) * s;
            g(i, j) = {re, im};
            g(j, i) = {re, -im};
        }
    }
    return g;
}

Estimate eigenvalue_average(int N, const std::function<double(std::span<const double>)>& f,
                            const QuadratureConfig& cfg) {
    static constexpr int kLevels[] = {16, 24, 32, 48, 64};
    if (N < 1 || N > kMaxQuadratureSize)
        throw ResourceLimit("eigenvalue quadrature for N = " + std::to_string(N), kMaxQuadratureSize);
    auto at_level = [&](int points) {
        const auto& rule = quad::gauss_hermite_normal(points);
        std::vector<int> index(N, 0);
        std::vector<double> mu(N);
        double num = 0.0, den = 0.0;
        while (true) {
            double weight = 1.0;
            for (int i = 0; i < N; ++i) {
                mu[i] = rule.nodes[index[i]];
                weight *= rule.weights[index[i]];
            }
            double vandermonde = 1.0;
            for (int i = 0; i < N; ++i)
                for (int j = i + 1; j < N; ++j) vandermonde *= mu[i] - mu[j];
            weight *= vandermonde * vandermonde;
            if (weight != 0.0) {
                num += weight * f(mu);
                den += weight;
            }
            int d = 0;
            while (d < N && ++index[d] == points) index[d++] = 0;
            if (d == N) break;
        }
        return num / den;
    };
    double previous = at_level(kLevels[0]);
    double diff = 0.0;
    for (std::size_t i = 1; i < std::size(kLevels); ++i) {
        const double current = at_level(kLevels[i]);
        diff = std::abs(current - previous);
        previous = current;
        if (diff <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(current))) return {current, diff};
    }
    throw AccuracyError("eigenvalue Gauss-Hermite quadrature did not converge", previous, diff);
}

Estimate mc_average(const McConfig& cfg, const WorkerPool& pool,
                    const std::function<double(std::mt19937_64&, std::normal_distribution<double>&)>& draw) {
    struct Moments {
        double sum = 0.0, sum_sq = 0.0;
        std::uint64_t count = 0;
    };
    auto shards = pool.map<Moments>(oracle::kShards, [&](std::size_t shard) {
        auto rng = make_stream(cfg.seed, shard);
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::uint64_t draws = cfg.samples / oracle::kShards + (shard < cfg.samples % oracle::kShards ? 1 : 0);
        Moments m;
        for (std::uint64_t s = 0; s < draws; ++s) {
            const double v = draw(rng, normal);
            m.sum += v;
            m.sum_sq += v * v;
            ++m.count;
        }
        return m;
    });
    Moments total;
    for (const auto& m : shards) {
        total.sum += m.sum;
        total.sum_sq += m.sum_sq;
        total.count += m.count;
    }
    const double count = static_cast<double>(total.count);
    const double mean = total.sum / count;
    const double variance = std::max(0.0, (total.sum_sq / count - mean * mean) * count / (count - 1.0));
    return {mean, std::sqrt(variance / count)};
}

}  // namespace detail

Estimate sigma_z(const LoopVertexModel& model, const Integrator& integrator, const WorkerPool& pool) {
    model.validate();
    if (model.lambda == 0.0) return {1.0, 0.0};
    const double a = model.a();
    const int N = model.N;
    if (const auto* cfg = std::get_if<QuadratureConfig>(&integrator)) {
        cfg->validate();
        if (N == 1) return quad::normal_expectation([a](double s) { return 1.0 / (1.0 + a * a * s * s); }, *cfg);
        // Re prod_i (1 + i a mu_i)^(-N)
        return detail::eigenvalue_average(
            N,
            [&](std::span<const double> mu) {
                std::complex<double> p = 1.0;
                for (double m : mu) p /= std::complex<double>(1.0, a * m);
                return std::real(std::pow(p, N));
            },
            *cfg);
    }
    const auto& mc = std::get<McConfig>(integrator);
    mc.validate();
    if (mc.N != N) throw ContractViolation("Monte Carlo config and model disagree on N");
    return detail::mc_average(mc, pool, [&](std::mt19937_64& rng, std::normal_distribution<double>& normal) {
        const Eigen::MatrixXcd s = detail::sample_gue(N, rng, normal);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(s, Eigen::EigenvaluesOnly);
        std::complex<double> p = 1.0;
        for (int i = 0; i < N; ++i) p /= std::complex<double>(1.0, a * eig.eigenvalues()(i));
        return std::real(std::pow(p, N));
    });
}

std::complex<double> loop_vertex_value(const Eigen::MatrixXcd& sigma, const LoopVertexModel& model, LogRoute route) {
    model.validate();
    if (sigma.rows() != model.N || sigma.cols() != model.N)
        throw ContractViolation("sigma must be an N x N matrix");
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ContractViolation("sigma is not hermitian");
    const std::complex<double> ia(0.0, model.a());
    std::complex<double> trace_log = 0.0;
    if (route == LogRoute::Eigenvalues) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sigma, Eigen::EigenvaluesOnly);
        for (int i = 0; i < model.N; ++i) trace_log += std::log(1.0 + ia * eig.eigenvalues()(i));
    } else {
        const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(model.N, model.N) + ia * sigma;
        trace_log = m.log().trace();
    }
    return -static_cast<double>(model.N) * trace_log;
}

BorelFit borel_growth_check(const std::vector<Rational>& coefficients, BorelConfig cfg) {
    if (coefficients.size() < 4) throw ContractViolation("Borel fit needs at least four coefficients");
    if (!(cfg.residual_tol > 0.0)) throw ContractViolation("residual tolerance must be positive");
    std::vector<double> xs, ys;
    double log_factorial = 0.0;
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        const int n = static_cast<int>(k) + 1;
        log_factorial += std::log(static_cast<double>(n));
        if (coefficients[k] == 0) continue;
        // log|p/q| from the big integers, safe against overflow of get_d().
        const Rational magnitude = abs(coefficients[k]);
        long exp_num = 0, exp_den = 0;
        const double mant_num = mpz_get_d_2exp(&exp_num, magnitude.get_num_mpz_t());
        const double mant_den = mpz_get_d_2exp(&exp_den, magnitude.get_den_mpz_t());
        const double log_c = std::log(mant_num) - std::log(mant_den) + (exp_num - exp_den) * std::log(2.0);
        xs.push_back(n);
        ys.push_back(log_c - log_factorial);
    }
    if (xs.empty()) throw DegenerateFit("all coefficients vanish");
    if (xs.size() < 2) throw DegenerateFit("a single nonzero coefficient does not fix a growth rate");
    const double count = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / count;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    BorelFit fit;
    fit.C = std::exp(intercept);
    fit.K = std::exp(slope);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (intercept + slope * xs[i]);
        fit.residuals.push_back(r);
        fit.max_residual = std::max(fit.max_residual, std::abs(r));
    }
    fit.pass = std::isfinite(fit.C) && std::isfinite(fit.K) && fit.max_residual <= cfg.residual_tol;
    return fit;
}

}  // namespace lvelab::lve
