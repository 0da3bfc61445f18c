#include "lvelab/quadrature.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <queue>

#include <Eigen/Eigenvalues>

#include "lvelab/errors.hpp"

namespace lvelab {

void QuadratureConfig::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw ContractViolation("quadrature tolerances must be positive");
    if (max_subdivisions < 1) throw ContractViolation("max_subdivisions must be at least 1");
    if (cutoff < 0.0) throw ContractViolation("cutoff must be non-negative");
}

double QuadratureConfig::effective_cutoff() const {
    if (cutoff > 0.0) return cutoff;
    return std::log(10.0 / abs_tol);
}

namespace quad {
namespace {

// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix.
Rule golub_welsch(int points, const std::function<double(int)>& off_diagonal, double mu0,
                  const std::function<double(int)>& diagonal = {}) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
    if (diagonal)
        for (int k = 0; k < points; ++k) jacobi(k, k) = diagonal(k);
    for (int k = 1; k < points; ++k) {
        jacobi(k, k - 1) = off_diagonal(k);
        jacobi(k - 1, k) = off_diagonal(k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    Rule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    for (int k = 0; k < points; ++k) {
        rule.nodes[k] = solver.eigenvalues()(k);
        const double v0 = solver.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

// Newton polish of Legendre nodes; Golub-Welsch alone loses a few digits at
// high order.
void polish_legendre(Rule& rule) {
    const int n = static_cast<int>(rule.nodes.size());
    for (int k = 0; k < n; ++k) {
        double x = rule.nodes[k];
        double derivative = 1.0;
        for (int iter = 0; iter < 4; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            derivative = n * (x * p1 - p0) / (x * x - 1.0);
            x -= p1 / derivative;
        }
        rule.nodes[k] = x;
        rule.weights[k] = 2.0 / ((1.0 - x * x) * derivative * derivative);
    }
}

template <class Make>
const Rule& cached(std::map<int, std::unique_ptr<Rule>>& cache, std::mutex& mutex, int points,
                   Make make) {
    std::lock_guard lock(mutex);
    auto it = cache.find(points);
    if (it == cache.end()) it = cache.emplace(points, std::make_unique<Rule>(make())).first;
    return *it->second;
}

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel estimate_panel(const std::function<double(double)>& f, double a, double b) {
    const Rule& rule = gauss_legendre_unit(10);
    auto apply = [&](double lo, double hi) {
        double sum = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k)
            sum += rule.weights[k] * f(lo + (hi - lo) * rule.nodes[k]);
        return sum * (hi - lo);
    };
    const double mid = 0.5 * (a + b);
    const double whole = apply(a, b);
    const double halves = apply(a, mid) + apply(mid, b);
    return {a, b, halves, std::abs(halves - whole)};
}

}  // namespace

const Rule& gauss_legendre_unit(int points) {
    if (points < 1) throw ContractViolation("Gauss-Legendre rule needs at least one point");
    static std::map<int, std::unique_ptr<Rule>> cache;
    static std::mutex mutex;
    return cached(cache, mutex, points, [points] {
        Rule rule = golub_welsch(
            points, [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0);
        polish_legendre(rule);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            rule.nodes[k] = 0.5 * (rule.nodes[k] + 1.0);
            rule.weights[k] *= 0.5;
        }
        return rule;
    });
}

const Rule& gauss_hermite_normal(int points) {
    if (points < 1) throw ContractViolation("Gauss-Hermite rule needs at least one point");
    static std::map<int, std::unique_ptr<Rule>> cache;
    static std::mutex mutex;
    return cached(cache, mutex, points, [points] {
        Rule rule = golub_welsch(points, [](int k) { return std::sqrt(static_cast<double>(k)); }, 1.0);
        // Symmetrize: the exact rule is symmetric about zero.
        const int n = points;
        for (int k = 0; k < n / 2; ++k) {
            const double x = 0.5 * (rule.nodes[n - 1 - k] - rule.nodes[k]);
            const double w = 0.5 * (rule.weights[n - 1 - k] + rule.weights[k]);
            rule.nodes[k] = -x;
            rule.nodes[n - 1 - k] = x;
            rule.weights[k] = rule.weights[n - 1 - k] = w;
        }
        if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
        const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
        for (double& w : rule.weights) w /= total;
        return rule;
    });
}

const Rule& gauss_laguerre(int points, int alpha) {
    if (points < 1 || points > 64) throw ContractViolation("Gauss-Laguerre rule supports 1..64 points");
    if (alpha < 0 || alpha > 32) throw ContractViolation("Gauss-Laguerre exponent must lie in 0..32");
    static std::map<int, std::unique_ptr<Rule>> cache;
    static std::mutex mutex;
    return cached(cache, mutex, points * 64 + alpha, [points, alpha] {
        Rule rule = golub_welsch(
            points, [alpha](int k) { return std::sqrt(static_cast<double>(k) * (k + alpha)); }, 1.0,
            [alpha](int k) { return 2.0 * k + alpha + 1.0; });
        const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
        for (double& w : rule.weights) w /= total;
        return rule;
    });
}

Estimate integrate(const std::function<double(double)>& f, double a, double b,
                   const QuadratureConfig& cfg) {
    cfg.validate();
    if (a == b) return {};
    std::priority_queue<Panel> panels;
    Panel first = estimate_panel(f, a, b);
    double total = first.value;
    double error = first.error;
    panels.push(first);
    int subdivisions = 0;
    while (error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
        if (subdivisions >= cfg.max_subdivisions)
            throw AccuracyError("adaptive Gauss-Legendre did not reach tolerance", total, error);
        const Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Panel left = estimate_panel(f, worst.a, mid);
        const Panel right = estimate_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++subdivisions;
    }
    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    error = 0.0;
    while (!panels.empty()) {
        total += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    return {total, error};
}

Estimate integrate_half_line(const std::function<double(double)>& f, const QuadratureConfig& cfg) {
    cfg.validate();
    Estimate est = integrate(f, 0.0, cfg.effective_cutoff(), cfg);
    est.error += cfg.abs_tol / 10.0;
    return est;
}

Estimate normal_expectation(const std::function<double(double)>& f, const QuadratureConfig& cfg) {
    cfg.validate();
    // Two-sided normal tail below abs_tol / 10.
    double s = 1.0;
    while (std::erfc(s / std::sqrt(2.0)) > cfg.abs_tol / 10.0) s += 0.25;
    const double norm = 1.0 / std::sqrt(2.0 * M_PI);
    Estimate est = integrate([&](double x) { return norm * std::exp(-0.5 * x * x) * f(x); }, -s, s, cfg);
    est.error += cfg.abs_tol / 10.0;
    return est;
}

double integrate_simplex(const CubeIntegrand& f, const OrderingSimplex& simplex, int points) {
    const int m = static_cast<int>(simplex.order.size());
    if (m == 0) return simplex.multiplicity * f({});
    const Rule& rule = gauss_legendre_unit(points);
    // Duffy weights: scaled[k * points + i] = weight_i * node_i^k.
    std::vector<double> scaled(static_cast<std::size_t>(m) * points);
    for (int i = 0; i < points; ++i) {
        double p = rule.weights[i];
        for (int k = 0; k < m; ++k, p *= rule.nodes[i]) scaled[k * points + i] = p;
    }
    std::vector<int> index(m, 0);
    std::vector<double> w(m), u(m);
    double sum = 0.0;
    while (true) {
        double weight = 1.0;
        for (int k = m - 1; k >= 0; --k) {
            const double y = rule.nodes[index[k]];
            u[k] = (k == m - 1) ? y : u[k + 1] * y;
            weight *= scaled[k * points + index[k]];
        }
        for (int k = 0; k < m; ++k) w[simplex.order[k]] = u[k];
        sum += weight * f(w);

        int d = 0;
        while (d < m && ++index[d] == points) index[d++] = 0;
        if (d == m) break;
    }
    return simplex.multiplicity * sum;
}

std::vector<OrderingSimplex> all_orderings(int m) {
    std::vector<OrderingSimplex> out;
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    do {
        out.push_back({order, 1.0});
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

Estimate integrate_cube_by_orderings(const CubeIntegrand& f, int m, const QuadratureConfig& cfg,
                                     std::span<const int> levels) {
    cfg.validate();
    if (m < 0) throw ContractViolation("cube dimension must be non-negative");
    if (m == 0) return {f({}), 0.0};
    static constexpr int kDefaultLevels[] = {3, 5, 7, 9, 11, 13, 16};
    if (levels.empty()) levels = kDefaultLevels;

    const auto simplices = all_orderings(m);
    auto at_level = [&](int points) {
        double sum = 0.0;
        for (const auto& s : simplices) sum += integrate_simplex(f, s, points);
        return sum;
    };
    double previous = at_level(levels[0]);
    double diff = std::abs(previous);
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const double current = at_level(levels[i]);
        diff = std::abs(current - previous);
        previous = current;
        if (diff <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(current))) return {current, diff};
    }
    throw AccuracyError("ordered-simplex Gauss-Legendre did not converge", previous, diff);
}

}  // namespace quad
}  // namespace lvelab
