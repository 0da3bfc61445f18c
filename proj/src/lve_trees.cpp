#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "lve_internal.hpp"
#include "lvelab/errors.hpp"
#include "lvelab/kernels.hpp"
#include "lvelab/lve.hpp"
#include "lvelab/oracle.hpp"
#include "lvelab/rng.hpp"

namespace lvelab::lve {

namespace {

using forest::Forest;

std::vector<std::vector<int>> adjacency(const Forest& t) {
    std::vector<std::vector<int>> adj(t.vertex_count());
    for (auto e : t.edges()) {
        adj[e.i - 1].push_back(e.j - 1);
        adj[e.j - 1].push_back(e.i - 1);
    }
    return adj;
}

std::string rooted_code(const std::vector<std::vector<int>>& adj, int v, int parent) {
    std::vector<std::string> children;
    for (int w : adj[v])
        if (w != parent) children.push_back(rooted_code(adj, w, v));
    std::sort(children.begin(), children.end());
    std::string out = "(";
    for (const auto& c : children) out += c;
    return out + ")";
}

// Isomorphism-invariant code: smallest rooted code over all roots.
std::string canonical_code(const Forest& t) {
    const auto adj = adjacency(t);
    std::string best;
    for (int r = 0; r < t.vertex_count(); ++r) {
        auto c = rooted_code(adj, r, -1);
        if (best.empty() || c < best) best = std::move(c);
    }
    return best;
}

// Edge permutations induced by the vertex automorphisms of the tree.
std::vector<std::vector<int>> edge_automorphisms(const Forest& t) {
    const int n = t.vertex_count();
    const auto edges = t.edges();
    std::map<std::pair<int, int>, int> index;
    for (std::size_t k = 0; k < edges.size(); ++k) index[{edges[k].i, edges[k].j}] = static_cast<int>(k);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 1);
    std::vector<std::vector<int>> out;
    do {
        std::vector<int> image(edges.size());
        bool ok = true;
        for (std::size_t k = 0; k < edges.size() && ok; ++k) {
            int a = perm[edges[k].i - 1], b = perm[edges[k].j - 1];
            if (a > b) std::swap(a, b);
            auto it = index.find({a, b});
            if (it == index.end())
                ok = false;
            else
                image[k] = it->second;
        }
        if (ok) out.push_back(std::move(image));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

void check_tree(const Forest& tree, int cap) {
    if (!tree.is_tree()) throw ContractViolation("tree amplitude needs a spanning tree, got " + forest::to_string(tree));
    if (tree.vertex_count() > cap) throw ResourceLimit("tree on " + std::to_string(tree.vertex_count()) + " vertices", cap);
}

double tree_prefactor(const Forest& tree, double lambda, int N) {
    const int m = tree.edge_count();
    double p = static_cast<double>(N) * std::pow(-2.0 * lambda, m);
    return p;
}

// prod_v (d_v - 1)!: number of plane embeddings, all equal at N = 1.
double embedding_count(const Forest& tree) {
    double count = 1.0;
    for (int d : tree.degrees())
        for (int k = 2; k < d; ++k) count *= k;
    return count;
}

Eigen::MatrixXd replica_covariance(const Forest& tree, std::span<const double> w) {
    const auto x = forest::interpolate_weakening(tree, forest::WeakeningAssignment({w.begin(), w.end()}));
    const int n = x.size();
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = x(i, j);
    return m;
}

// Lower factor L with L L^T = x; falls back to the symmetric square root
// when x is numerically singular.
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& x) {
    Eigen::LLT<Eigen::MatrixXd> llt(x);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x);
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

struct OrbitValue {
    double fine = 0.0;
    double coarse = 0.0;
};

// Ordering-simplex integral of E[prod_v (1 + i a sigma_v)^(-d_v)] at N = 1 in
// the Laplace form: each resolvent power becomes
// int dt t^(d-1) e^(-t (1 + i a sigma)) / (d-1)!, the Gaussian average is
// then exact and leaves sum_p w_p exp(-lambda t^T x(w) t) on a
// generalized Gauss-Laguerre grid.
OrbitValue orbit_integral(const Forest& tree, const quad::OrderingSimplex& simplex, double lambda, const TreeGrid& grid,
                          const kernels::LaguerreGrid& fine_grid, const kernels::LaguerreGrid& coarse_grid) {
    const int n = tree.vertex_count();
    const auto isa = kernels::active_isa();
    std::vector<double> x(static_cast<std::size_t>(n) * n);
    auto integrand = [&](const kernels::LaguerreGrid& g) {
        return [&](std::span<const double> w) {
            const auto m = forest::interpolate_weakening(tree, forest::WeakeningAssignment({w.begin(), w.end()}));
            std::copy(m.entries().begin(), m.entries().end(), x.begin());
            return kernels::laplace_quadratic_sum(isa, x, g, lambda);
        };
    };
    OrbitValue out;
    out.fine = quad::integrate_simplex(integrand(fine_grid), simplex, grid.fine.weakening_points);
    out.coarse = quad::integrate_simplex(integrand(coarse_grid), simplex, grid.coarse.weakening_points);
    return out;
}

kernels::LaguerreGrid laguerre_grid(const Forest& tree, int points) {
    std::vector<int> alphas;
    for (int d : tree.degrees()) alphas.push_back(d - 1);
    return kernels::LaguerreGrid::build(alphas, points);
}

double tolerance(const QuadratureConfig& cfg, double value) { return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value)); }

AmplitudeResult single_vertex(const LoopVertexModel& model, const Integrator& integrator, std::uint64_t stream,
                              const WorkerPool& pool) {
    const double a = model.a();
    const int N = model.N;
    AmplitudeResult out;
    if (model.lambda == 0.0) return out;
    if (const auto* cfg = std::get_if<QuadratureConfig>(&integrator)) {
        cfg->validate();
        Estimate e;
        if (N == 1)
            e = quad::normal_expectation([a](double s) { return -0.5 * std::log1p(a * a * s * s); }, *cfg);
        else
            e = detail::eigenvalue_average(
                N,
                [&](std::span<const double> mu) {
                    double s = 0.0;
                    for (double m : mu) s += std::log1p(a * a * m * m);
                    return -0.5 * N * s;
                },
                *cfg);
        out.value = e.value;
        out.error = e.error;
        return out;
    }
    McConfig mc = std::get<McConfig>(integrator);
    mc.validate();
    mc.seed = stream_seed(mc.seed, stream);
    LoopVertexModel m = model;
    const Estimate e = detail::mc_average(mc, pool, [&](std::mt19937_64& rng, std::normal_distribution<double>& normal) {
        return std::real(loop_vertex_value(detail::sample_gue(N, rng, normal), m));
    });
    out.value = e.value;
    out.error = e.error;
    return out;
}

AmplitudeResult amplitude_mc(const Forest& tree, const LoopVertexModel& model, const McConfig& cfg,
                             std::uint64_t stream) {
    cfg.validate();
    if (cfg.N != model.N) throw ContractViolation("Monte Carlo config and model disagree on N");
    const int n = tree.vertex_count();
    const int m = tree.edge_count();
    const int N = model.N;
    const std::complex<double> ia(0.0, model.a());
    const auto contours = embedding_contours(tree);
    auto rng = make_stream(cfg.seed, stream);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    AmplitudeResult out;
    std::vector<double> w(m);
    std::vector<Eigen::MatrixXcd> g(n), resolvent(n);
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
        for (auto& wk : w) wk = uniform(rng);
        const Eigen::MatrixXd l = covariance_factor(replica_covariance(tree, w));
        for (int u = 0; u < n; ++u) g[u] = detail::sample_gue(N, rng, normal);
        for (int v = 0; v < n; ++v) {
            Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(N, N);
            for (int u = 0; u < n; ++u)
                if (l(v, u) != 0.0) sigma += l(v, u) * g[u];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sigma);
            Eigen::VectorXcd d(N);
            double norm = 0.0;
            for (int i = 0; i < N; ++i) {
                d(i) = 1.0 / (1.0 + ia * eig.eigenvalues()(i));
                norm = std::max(norm, std::abs(d(i)));
            }
            ++out.audit.samples;
            out.audit.max_norm = std::max(out.audit.max_norm, norm);
            if (norm > 1.0 + kResolventSlack) ++out.audit.violations;
            resolvent[v] = eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().adjoint();
        }
        double value = 0.0;
        for (const auto& contour : contours) {
            Eigen::MatrixXcd p = resolvent[contour.front()];
            for (std::size_t c = 1; c < contour.size(); ++c) p = p * resolvent[contour[c]];
            value += std::real(p.trace());
        }
        sum += value;
        sum_sq += value * value;
    }
    const double count = static_cast<double>(cfg.samples);
    const double mean = sum / count;
    const double variance = std::max(0.0, (sum_sq / count - mean * mean) * count / (count - 1.0));
    const double prefactor = tree_prefactor(tree, model.lambda, N);
    out.value = prefactor * mean;
    out.error = std::abs(prefactor) * std::sqrt(variance / count);
    return out;
}

}  // namespace

std::vector<quad::OrderingSimplex> ordering_orbits(const forest::Forest& tree) {
    const int m = tree.edge_count();
    if (m == 0) return {quad::OrderingSimplex{{}, 1.0}};
    const auto auts = edge_automorphisms(tree);
    std::map<std::vector<int>, int> orbits;
    std::vector<int> order(m), image(m);
    std::iota(order.begin(), order.end(), 0);
    do {
        std::vector<int> best = order;
        for (const auto& aut : auts) {
            for (int k = 0; k < m; ++k) image[k] = aut[order[k]];
            if (image < best) best = image;
        }
        ++orbits[best];
    } while (std::next_permutation(order.begin(), order.end()));
    std::vector<quad::OrderingSimplex> out;
    for (auto& [rep, size] : orbits) out.push_back({rep, static_cast<double>(size)});
    return out;
}

std::vector<TreeShape> tree_shapes(int n, int cap) {
    if (n < 1) throw ContractViolation("trees need at least one vertex");
    if (n > cap) throw ResourceLimit("tree shapes on " + std::to_string(n) + " vertices", cap);
    std::map<std::string, std::size_t> by_code;
    std::vector<TreeShape> shapes;
    forest::for_each_forest(
        n, true,
        [&](const forest::Forest& t) {
            auto code = canonical_code(t);
            auto [it, inserted] = by_code.try_emplace(std::move(code), shapes.size());
            if (inserted) shapes.push_back({t, 0, {}});
            ++shapes[it->second].labeled_count;
        },
        forest::EnumerationLimits{std::max(cap, forest::kDefaultEnumerationCap)});
    for (auto& s : shapes) s.ordering_orbits = ordering_orbits(s.representative);
    return shapes;
}

std::vector<std::vector<int>> embedding_contours(const forest::Forest& tree) {
    const int n = tree.vertex_count();
    if (n == 1) return {{0}};
    const auto edges = tree.edges();
    std::vector<std::vector<int>> incident(n);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        incident[edges[k].i - 1].push_back(static_cast<int>(k));
        incident[edges[k].j - 1].push_back(static_cast<int>(k));
    }
    // cyclic[v]: current cyclic order at v; the first edge stays fixed and
    // the rest run through their permutations.
    std::vector<std::vector<int>> cyclic = incident;
    std::vector<std::vector<int>> out;
    auto walk = [&] {
        std::vector<int> contour;
        int v = 0, e = cyclic[0][0];
        const std::pair<int, int> start{v, e};
        do {
            contour.push_back(v);
            const int w = edges[e].i - 1 == v ? edges[e].j - 1 : edges[e].i - 1;
            const auto& cyc = cyclic[w];
            const auto idx = std::find(cyc.begin(), cyc.end(), e) - cyc.begin();
            e = cyc[(idx + 1) % cyc.size()];
            v = w;
        } while (std::pair<int, int>{v, e} != start);
        out.push_back(std::move(contour));
    };
    auto recurse = [&](auto&& self, int v) -> void {
        if (v == n) {
            walk();
            return;
        }
        auto& cyc = cyclic[v];
        if (cyc.size() <= 2) {
            self(self, v + 1);
            return;
        }
        std::sort(cyc.begin() + 1, cyc.end());
        do {
            self(self, v + 1);
        } while (std::next_permutation(cyc.begin() + 1, cyc.end()));
    };
    recurse(recurse, 0);
    return out;
}

TreeGrid default_tree_grid(int n) {
    switch (n) {
        case 2: return {{24, 24}, {16, 16}};
        case 3: return {{12, 10}, {8, 8}};
        case 4: return {{8, 6}, {6, 4}};
        case 5: return {{6, 4}, {4, 3}};
        case 6: return {{4, 3}, {3, 2}};
        default: return {{3, 3}, {3, 2}};
    }
}

AmplitudeResult hermite_tree_amplitude(const forest::Forest& tree, const LoopVertexModel& model, GridRule rule,
                                       int cap) {
    model.validate();
    check_tree(tree, cap);
    if (model.N != 1) throw ContractViolation("the Gauss-Hermite resolvent route needs N = 1");
    if (rule.sigma_points < 1 || rule.weakening_points < 1) throw ContractViolation("grid sizes must be positive");
    const int n = tree.vertex_count();
    AmplitudeResult out;
    if (n == 1 || model.lambda == 0.0) return out;
    const auto isa = kernels::active_isa();
    const auto degrees = tree.degrees();
    const double a = model.a();
    const auto grid = kernels::GaussianGrid::hermite(n, rule.sigma_points, true);
    std::vector<double> lower(static_cast<std::size_t>(n) * n);
    auto integrand = [&](std::span<const double> w) {
        const Eigen::MatrixXd l = covariance_factor(replica_covariance(tree, w));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) lower[i * n + j] = j <= i ? l(i, j) : 0.0;
        const auto r = kernels::gaussian_resolvent_average(isa, lower, grid, degrees, a);
        out.audit.samples += grid.count;
        out.audit.max_norm = std::max(out.audit.max_norm, r.max_modulus);
        if (r.max_modulus > 1.0 + kResolventSlack) ++out.audit.violations;
        return r.weighted_real;
    };
    double sum = 0.0;
    for (const auto& orbit : ordering_orbits(tree)) sum += quad::integrate_simplex(integrand, orbit, rule.weakening_points);
    out.value = tree_prefactor(tree, model.lambda, 1) * embedding_count(tree) * sum;
    return out;
}

AmplitudeResult tree_amplitude(const forest::Forest& tree, const LoopVertexModel& model, const Integrator& integrator,
                               int cap) {
    model.validate();
    check_tree(tree, cap);
    if (tree.vertex_count() == 1) return single_vertex(model, integrator, 0, WorkerPool());
    if (const auto* mc = std::get_if<McConfig>(&integrator)) return amplitude_mc(tree, model, *mc, 0);
    const auto& cfg = std::get<QuadratureConfig>(integrator);
    cfg.validate();
    if (model.N != 1) throw ContractViolation("quadrature tree amplitudes need N = 1; use Monte Carlo for N > 1");
    AmplitudeResult out;
    if (model.lambda == 0.0) return out;
    const TreeGrid grid = default_tree_grid(tree.vertex_count());
    const auto fine = laguerre_grid(tree, grid.fine.sigma_points);
    const auto coarse = laguerre_grid(tree, grid.coarse.sigma_points);
    double fine_sum = 0.0, coarse_sum = 0.0;
    for (const auto& orbit : ordering_orbits(tree)) {
        const auto v = orbit_integral(tree, orbit, model.lambda, grid, fine, coarse);
        fine_sum += v.fine;
        coarse_sum += v.coarse;
    }
    const double prefactor = tree_prefactor(tree, model.lambda, 1) * embedding_count(tree);
    out.value = prefactor * fine_sum;
    out.error = std::abs(prefactor * (fine_sum - coarse_sum));
    if (out.error > tolerance(cfg, out.value))
        throw AccuracyError("tree amplitude grid estimate above tolerance", out.value, out.error);
    return out;
}

LveEstimate lve_sum(const LoopVertexModel& model, int n_max, const Integrator& integrator, const WorkerPool& pool,
                    int cap) {
    model.validate();
    if (n_max < 1) throw ContractViolation("n_max must be at least 1");
    if (n_max > cap) throw ResourceLimit("LVE order " + std::to_string(n_max), cap);
    const auto* quad_cfg = std::get_if<QuadratureConfig>(&integrator);
    const auto* mc_cfg = std::get_if<McConfig>(&integrator);
    if (quad_cfg) quad_cfg->validate();
    if (mc_cfg) mc_cfg->validate();
    if (quad_cfg && model.N != 1 && n_max > 1)
        throw ContractViolation("quadrature tree amplitudes need N = 1; use Monte Carlo for N > 1");
    if (mc_cfg && mc_cfg->N != model.N) throw ContractViolation("Monte Carlo config and model disagree on N");

    LveEstimate est;
    est.lambda = model.lambda;
    est.N = model.N;
    if (mc_cfg) est.seed = mc_cfg->seed;

    std::vector<std::vector<TreeShape>> shapes(n_max + 1);
    for (int n = 2; n <= n_max; ++n) shapes[n] = tree_shapes(n, cap);

    // One task per (order, shape, ordering orbit) under quadrature, per
    // (order, shape) under Monte Carlo.
    struct Task {
        int n;
        std::size_t shape;
        std::size_t orbit;
    };
    std::vector<Task> tasks;
    for (int n = 2; n <= n_max; ++n)
        for (std::size_t s = 0; s < shapes[n].size(); ++s) {
            if (quad_cfg)
                for (std::size_t o = 0; o < shapes[n][s].ordering_orbits.size(); ++o) tasks.push_back({n, s, o});
            else
                tasks.push_back({n, s, 0});
        }

    std::vector<std::vector<kernels::LaguerreGrid>> fine(n_max + 1), coarse(n_max + 1);
    if (quad_cfg && model.lambda != 0.0)
        for (int n = 2; n <= n_max; ++n) {
            const auto g = default_tree_grid(n);
            for (const auto& shape : shapes[n]) {
                fine[n].push_back(laguerre_grid(shape.representative, g.fine.sigma_points));
                coarse[n].push_back(laguerre_grid(shape.representative, g.coarse.sigma_points));
            }
        }

    struct TaskResult {
        double value = 0.0;
        double second = 0.0;  // coarse value or standard error
        ResolventAudit audit;
    };
    auto results = pool.map<TaskResult>(tasks.size(), [&](std::size_t i) {
        const Task& t = tasks[i];
        const TreeShape& shape = shapes[t.n][t.shape];
        TaskResult r;
        if (model.lambda == 0.0) return r;
        if (quad_cfg) {
            const auto v = orbit_integral(shape.representative, shape.ordering_orbits[t.orbit], model.lambda,
                                          default_tree_grid(t.n), fine[t.n][t.shape], coarse[t.n][t.shape]);
            const double prefactor = tree_prefactor(shape.representative, model.lambda, 1) *
                                     embedding_count(shape.representative);
            r.value = prefactor * v.fine;
            r.second = prefactor * v.coarse;
        } else {
            const auto a = amplitude_mc(shape.representative, model, *mc_cfg, i + 1);
            r.value = a.value;
            r.second = a.error;
            r.audit = a.audit;
        }
        return r;
    });

    const auto first = single_vertex(model, integrator, 0, pool);
    est.orders.push_back({1, first.value, first.error, 1});

    double factorial = 1.0;
    std::size_t next = 0;
    for (int n = 2; n <= n_max; ++n) {
        factorial *= n;
        double value = 0.0, coarse_value = 0.0, variance = 0.0;
        std::uint64_t trees = 0;
        for (std::size_t s = 0; s < shapes[n].size(); ++s) {
            const auto count = shapes[n][s].labeled_count;
            trees += count;
            const std::size_t pieces = quad_cfg ? shapes[n][s].ordering_orbits.size() : 1;
            for (std::size_t p = 0; p < pieces; ++p, ++next) {
                const auto& r = results[next];
                value += static_cast<double>(count) * r.value;
                if (quad_cfg)
                    coarse_value += static_cast<double>(count) * r.second;
                else
                    variance += std::pow(static_cast<double>(count) * r.second, 2);
                est.audit.merge(r.audit);
            }
        }
        OrderTerm term{n, value / factorial, 0.0, trees};
        term.error = quad_cfg ? std::abs(value - coarse_value) / factorial : std::sqrt(variance) / factorial;
        if (quad_cfg && term.error > tolerance(*quad_cfg, term.t_n))
            throw AccuracyError("order " + std::to_string(n) + " grid estimate above tolerance", term.t_n, term.error);
        est.orders.push_back(term);
    }

    double running = 0.0;
    for (const auto& o : est.orders) est.partial_sums.push_back(running += o.t_n);

    if (model.N == 1) {
        const auto z = oracle::z_reference(model.lambda, 1, QuadratureConfig{1e-13, 1e-13, 4000, 0.0});
        est.oracle = Estimate{std::log(z.value), z.error / z.value};
    } else if (mc_cfg && model.N <= 3) {
        const auto z = oracle::z_reference(model.lambda, *mc_cfg, pool);
        est.oracle = Estimate{std::log(z.value), z.error / z.value};
    }
    return est;
}

}  // namespace lvelab::lve
