// Prints one PASS/FAIL line per acceptance criterion. Tolerances are pinned
// here; the exit status is non-zero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lvelab/errors.hpp"
#include "lvelab/forest.hpp"
#include "lvelab/forest_functions.hpp"
#include "lvelab/lve.hpp"
#include "lvelab/oracle.hpp"
#include "lvelab/propagator.hpp"
#include "lvelab/ribbon.hpp"
#include "lvelab/wick.hpp"

using namespace lvelab;

namespace {

constexpr double kForestTol = 1e-6;
const QuadratureConfig kForestQuadrature{.abs_tol = 1e-9, .rel_tol = 1e-9};
constexpr double kForestSeconds = 60.0;
constexpr int kPositivitySamples = 10000;
constexpr double kPositivityTol = 1e-12;
constexpr double kSigmaTol = 1e-8;
constexpr double kLveTol = 1e-4;
constexpr double kLveSeconds = 300.0;
constexpr std::uint64_t kResolventSamples = 100000;
constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int precision = 3) {
    std::ostringstream out;
    out << std::setprecision(precision) << v;
    return out.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

QuadratureConfig tight() {
    QuadratureConfig q;
    q.abs_tol = 1e-13;
    q.rel_tol = 1e-13;
    return q;
}

// ---------------------------------------------------------------------------

Outcome forest_identity() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    int checked = 0;
    for (int n = 2; n <= 5; ++n)
        for (const auto& f : forest::closed_form::standard_battery(n)) {
            worst = std::max(worst, std::abs(forest::apply_forest_formula(*f, n, kForestQuadrature).value - f->value_at_ones()));
            ++checked;
        }
    const double t = seconds_since(start);
    return {checked == 40 && worst < kForestTol && t < kForestSeconds,
            std::to_string(checked) + " (function, n) pairs, max |error| " + fmt(worst) + ", " + fmt(t) + " s"};
}

Outcome positivity() {
    std::mt19937_64 rng(kSeed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 1.0;
    for (int s = 0; s < kPositivitySamples; ++s) {
        const int n = 2 + static_cast<int>(rng() % 7);
        // Random forest: lines in random order, each kept with probability
        // 1/2 unless it closes a cycle.
        std::vector<std::pair<int, int>> lines;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) lines.emplace_back(i, j);
        std::shuffle(lines.begin(), lines.end(), rng);
        std::vector<int> parent(n + 1);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x];
            return x;
        };
        std::vector<forest::Edge> edges;
        const bool dense = s % 2 == 0;
        for (auto [i, j] : lines) {
            if (!dense && unit(rng) < 0.5) continue;
            const int a = find(i), b = find(j);
            if (a == b) continue;
            parent[a] = b;
            edges.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j)});
        }
        const forest::Forest f(n, edges);
        std::vector<double> w(f.edge_count());
        for (double& x : w) x = unit(rng);
        worst = std::min(worst, forest::check_positivity(forest::interpolate_weakening(f, forest::WeakeningAssignment(w))));
    }
    return {worst >= -kPositivityTol,
            std::to_string(kPositivitySamples) + " samples, n in [2, 8], smallest eigenvalue " + fmt(worst)};
}

Outcome counting() {
    bool ok = true;
    for (int n = 1; n <= 6; ++n) {
        const int m = n * (n - 1) / 2;
        std::size_t forests = 0;
        for (unsigned long mask = 0; mask < (1UL << m); ++mask) {
            std::vector<int> parent(n + 1);
            std::iota(parent.begin(), parent.end(), 0);
            auto find = [&](int x) {
                while (parent[x] != x) x = parent[x];
                return x;
            };
            bool acyclic = true;
            for (int l = 0; l < m && acyclic; ++l) {
                if (!(mask >> l & 1)) continue;
                const auto e = forest::line_edge(n, l);
                const int a = find(e.i), b = find(e.j);
                acyclic = a != b;
                parent[a] = b;
            }
            forests += acyclic;
        }
        ok = ok && forests == forest::enumerate_forests(n, false).size();
    }
    std::string trees;
    for (int n = 2; n <= 8; ++n) {
        std::size_t count = 0;
        forest::for_each_forest(n, true, [&](const forest::Forest&) { ++count; });
        ok = ok && count == static_cast<std::size_t>(std::llround(std::pow(n, n - 2)));
        trees += (n > 2 ? "," : "") + std::to_string(count);
    }
    return {ok, "forests match brute force for n <= 6; trees n = 2..8: " + trees};
}

Outcome representation() {
    double worst = 0.0;
    for (double lambda : {0.01, 0.1, 0.5, 1.0}) {
        const double sigma = lve::sigma_z({1, lambda}, tight()).value;
        const double radial = oracle::z_reference(lambda, 1, tight()).value;
        worst = std::max(worst, std::abs(sigma - radial));
    }
    const double closed = std::exp(0.25) * std::sqrt(M_PI) / 2.0 * std::erfc(0.5);
    const double at1 = lve::sigma_z({1, 1.0}, tight()).value;
    const double radial1 = oracle::z_reference(1.0, 1, tight()).value;
    const double third = std::max(std::abs(at1 - closed), std::abs(radial1 - closed));
    return {worst < kSigmaTol && third < kSigmaTol,
            "max |sigma_z - radial| " + fmt(worst) + "; at lambda = 1: " + fmt(at1, 9) + " vs erfc form " +
                fmt(closed, 9)};
}

Outcome lve_equals_wick() {
    const auto lve = lve::lve_series(4);
    const auto wick = wick::log_z_series(4);
    const auto report = oracle::compare_series(lve, wick, 4);
    const bool c1 = lve.coefficient(1) == PolynomialInN(2, -2);
    return {report.equal && c1, std::string(report.equal ? "equal" : "DIFFERENT") + " through order 4 with N symbolic, c1 = " +
                                    lve.coefficient(1).pretty()};
}

Outcome lve_convergence() {
    const auto start = std::chrono::steady_clock::now();
    QuadratureConfig q;
    q.abs_tol = 1e-6;
    q.rel_tol = 1e-4;
    const auto e = lve::lve_sum({1, 0.05}, 6, q, WorkerPool::from_environment());
    const double t = seconds_since(start);
    bool decreasing = true;
    for (int n = 3; n <= 6; ++n) decreasing = decreasing && std::abs(e.orders[n - 1].t_n) < std::abs(e.orders[n - 2].t_n);
    const double diff = e.partial_sums.back() - e.oracle->value;
    std::string ts;
    for (const auto& o : e.orders) ts += (o.n > 1 ? " " : "") + fmt(o.t_n);
    return {std::abs(diff) < kLveTol && decreasing && t < kLveSeconds,
            "S6 - log Z = " + fmt(diff) + ", t_n = [" + ts + "], " + fmt(t) + " s"};
}

Outcome genus_structure() {
    const auto c = wick::log_z_series(4);
    bool powers_ok = true;
    for (const auto& [k, p] : c.orders())
        for (const auto& [power, coef] : p.terms()) {
            const int g = (2 - power) / 2;
            powers_ok = powers_ok && power % 2 == 0 && g >= 0 && g <= 2;
        }
    const bool planar1 = c.coefficient(1) == PolynomialInN(2, -2);
    const auto census = wick::pairing_census(2);
    const bool count = census.connected == 20 && census.total == 24;
    return {powers_ok && planar1 && count, "powers N^(2-2g), g <= 2; order 1 = " + c.coefficient(1).pretty() +
                                               "; order 2 connected " + std::to_string(census.connected) + " of " +
                                               std::to_string(census.total)};
}

Outcome ribbon_wick() {
    std::size_t pairings = 0, mismatches = 0;
    for (int n = 1; n <= 3; ++n)
        ribbon::for_each_vacuum_pairing(n, [&](std::span<const int> perm) {
            ++pairings;
            if (ribbon::invariants(ribbon::from_permutation(n, perm)).faces != wick::index_face_count(n, perm.data()))
                ++mismatches;
        });
    return {mismatches == 0 && pairings == 2 + 24 + 720,
            std::to_string(pairings) + " pairings, " + std::to_string(mismatches) + " mismatches"};
}

Outcome resolvent_bound() {
    lve::ResolventAudit audit;
    // Monte Carlo tree expansion at N = 2 and N = 3.
    for (int N : {2, 3}) {
        const auto e = lve::lve_sum({N, 0.05}, 4, McConfig{kSeed, 20000, N});
        audit.merge(e.audit);
    }
    // Gauss-Hermite resolvent route at N = 1.
    for (const auto& shape : lve::tree_shapes(4))
        audit.merge(lve::hermite_tree_amplitude(shape.representative, {1, 0.05}, {8, 4}).audit);
    return {audit.samples >= kResolventSamples && audit.violations == 0,
            std::to_string(audit.samples) + " resolvent evaluations, " + std::to_string(audit.violations) +
                " violations, max norm " + fmt(audit.max_norm, 15)};
}

Outcome borel() {
    const auto c = wick::log_z_series(5);
    std::vector<Rational> at1;
    for (int k = 1; k <= 5; ++k) at1.push_back(c.coefficient(k).at(1));
    const auto fit = lve::borel_growth_check(at1);
    return {fit.pass, "C = " + fmt(fit.C, 5) + ", K = " + fmt(fit.K, 5) + ", max residual " + fmt(fit.max_residual) +
                          " (bound " + fmt(lve::BorelConfig{}.residual_tol) + ")"};
}

Outcome propagator_taxonomy() {
    using propagator::PropagatorClass;
    bool ok = true;
    for (double A : {0.5, 1.0, 3.0}) {
        const propagator::PropagatorSpec sd{PropagatorClass::SelfDual, 1.0, A};
        const propagator::PropagatorSpec sdc{PropagatorClass::SelfDualCovariant, 1.0, A};
        for (long m = 0; m < 20; ++m)
            for (long n = 0; n < 20; ++n) {
                ok = ok && propagator::kernel_value(sd, m, n) == 1.0 / (static_cast<double>(m + n) + A);
                ok = ok && propagator::kernel_value(sdc, m, n) == 1.0 / (static_cast<double>(m) + A);
                ok = ok && propagator::kernel_value(sdc, m, n) == propagator::kernel_value(sdc, m, 0);
            }
    }
    ok = ok && propagator::classify(0.5, false) == PropagatorClass::Ordinary &&
         propagator::classify(1.0, false) == PropagatorClass::SelfDual &&
         propagator::classify(0.5, true) == PropagatorClass::Covariant &&
         propagator::classify(1.0, true) == PropagatorClass::SelfDualCovariant;
    return {ok, "20 x 20 grid at A in {0.5, 1, 3}, four classes"};
}

std::string capture(const std::string& command) {
    std::string out;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return out;
    std::array<char, 4096> buffer;
    std::size_t got;
    while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) out.append(buffer.data(), got);
    const int status = pclose(pipe);
    if (status != 0) out = "exit status " + std::to_string(status) + "\n" + out;
    return out;
}

Outcome reproducibility(const std::string& cli) {
    if (cli.empty()) return {false, "no CLI binary given (--cli PATH)"};
    const std::vector<std::string> runs{
        " lve --lambda 0.05 --N 2 --orders 4 --samples 20000 --seed 42",
        " lve --lambda 0.05 --N 1 --orders 4 --seed 42",
        " oracle --lambda 0.05 --N 3 --samples 50000 --seed 42",
        " --format json series --order 4 --genus",
        " forests --n 5",
    };
    int identical = 0;
    for (const auto& args : runs) {
        const std::string first = capture(cli + " --jobs 1" + args);
        const std::string second = capture(cli + " --jobs 2" + args);
        if (!first.empty() && first.rfind("exit status", 0) != 0 && first == second) ++identical;
    }
    return {identical == static_cast<int>(runs.size()),
            std::to_string(identical) + " of " + std::to_string(runs.size()) + " reruns byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int k = 1; k + 1 < argc; ++k)
        if (std::string(argv[k]) == "--cli") cli = argv[k + 1];

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"forest formula identity", forest_identity},
        {"positivity of interpolated matrices", positivity},
        {"forest and tree counting", counting},
        {"intermediate-field representation at N = 1", representation},
        {"tree expansion equals perturbation theory", lve_equals_wick},
        {"tree expansion converges at N = 1", lve_convergence},
        {"genus structure of log Z", genus_structure},
        {"ribbon faces equal Wick index cycles", ribbon_wick},
        {"resolvent norm bound", resolvent_bound},
        {"Borel growth diagnostic", borel},
        {"propagator taxonomy", propagator_taxonomy},
        {"CLI reproducibility", [&] { return reproducibility(cli); }},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (k + 1 < 10 ? " " : "") << k + 1 << ". "
                  << criteria[k].first << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failures) << " of " << criteria.size() << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
