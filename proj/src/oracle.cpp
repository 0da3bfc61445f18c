#include "lvelab/oracle.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "lvelab/errors.hpp"
#include "lvelab/rng.hpp"

namespace lvelab {

void McConfig::validate() const {
    if (samples < 2) throw ContractViolation("Monte Carlo needs at least two samples");
    if (N < 1) throw ContractViolation("matrix size N must be positive");
}

namespace oracle {

Estimate z_reference(double lambda, int N, const QuadratureConfig& cfg) {
    if (!(lambda >= 0.0)) throw DomainError("coupling must be non-negative");
    if (N != 1) throw ContractViolation("quadrature reference reduces to one dimension only at N = 1");
    cfg.validate();
    if (lambda == 0.0) return {1.0, 0.0};
    return quad::integrate_half_line([lambda](double t) { return std::exp(-t - lambda * t * t); }, cfg);
}

namespace {

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t count = 0;
};

constexpr int kMaxMcSize = 3;

}  // namespace

Estimate z_reference(double lambda, const McConfig& cfg, const WorkerPool& pool) {
    if (!(lambda >= 0.0)) throw DomainError("coupling must be non-negative");
    cfg.validate();
    if (cfg.N > kMaxMcSize) throw ResourceLimit("Monte Carlo reference for N = " + std::to_string(cfg.N), kMaxMcSize);
    if (lambda == 0.0) return {1.0, 0.0};
    const int n = cfg.N;
    const double g = lambda / n;
    auto shards = pool.map<Moments>(kShards, [&](std::size_t shard) {
        auto rng = make_stream(cfg.seed, shard);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        const std::uint64_t draws = cfg.samples / kShards + (shard < cfg.samples % kShards ? 1 : 0);
        Moments m;
        std::array<std::complex<double>, kMaxMcSize * kMaxMcSize> phi{};
        for (std::uint64_t s = 0; s < draws; ++s) {
            for (int k = 0; k < n * n; ++k) {
                const double re = normal(rng);
                const double im = normal(rng);
                phi[k] = {re, im};
            }
            // Tr (Phi^+ Phi)^2 = sum_{ij} |M_ij|^2 with M = Phi^+ Phi.
            double trace = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    std::complex<double> mij = 0.0;
                    for (int k = 0; k < n; ++k) mij += std::conj(phi[k * n + i]) * phi[k * n + j];
                    trace += std::norm(mij);
                }
            const double weight = std::exp(-g * trace);
            m.sum += weight;
            m.sum_sq += weight * weight;
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

SeriesComparison compare_series(const SeriesInN& a, const SeriesInN& b, int max_order) {
    if (max_order < 0) throw ContractViolation("max_order must be non-negative");
    SeriesComparison report;
    report.max_order = max_order;
    for (int k = 0; k <= max_order; ++k) {
        const auto& pa = a.coefficient(k);
        const auto& pb = b.coefficient(k);
        std::set<int, std::greater<>> powers;
        for (const auto& [p, c] : pa.terms()) powers.insert(p);
        for (const auto& [p, c] : pb.terms()) powers.insert(p);
        for (int p : powers) {
            SeriesComparison::Row row{k, p, pa.coefficient(p), pb.coefficient(p)};
            if (row.a != row.b && !report.first_divergence) {
                report.equal = false;
                report.first_divergence = Divergence{k, p, row.a, row.b};
            }
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::string to_table(const SeriesComparison& report, const std::string& label_a, const std::string& label_b) {
    std::ostringstream out;
    const int width = 16;
    out << std::left << std::setw(7) << "order" << std::setw(8) << "power" << std::setw(width) << label_a
        << std::setw(width) << label_b << "match\n";
    for (const auto& row : report.rows)
        out << std::left << std::setw(7) << row.order << std::setw(8) << ("N^" + std::to_string(row.power))
            << std::setw(width) << row.a.get_str() << std::setw(width) << row.b.get_str()
            << (row.a == row.b ? "yes" : "NO") << '\n';
    if (report.first_divergence) {
        const auto& d = *report.first_divergence;
        out << "first divergence at order " << d.order << ", N^" << d.power << ": " << d.a.get_str() << " vs "
            << d.b.get_str() << '\n';
    } else {
        out << "series agree exactly through order " << report.max_order << '\n';
    }
    return out.str();
}

}  // namespace oracle
}  // namespace lvelab
