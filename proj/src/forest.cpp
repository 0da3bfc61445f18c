#include "lvelab/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "lvelab/errors.hpp"

namespace lvelab::forest {
namespace {

struct UnionFind {
    std::array<int, kMaxVertices> parent{};

    explicit UnionFind(int n) { std::iota(parent.begin(), parent.begin() + n, 0); }

    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

void check_vertex_count(int n) {
    if (n < 1 || n > kMaxVertices)
        throw ContractViolation("vertex count must lie in [1, " + std::to_string(kMaxVertices) + "]");
}

}  // namespace

int line_count(int n) { return n * (n - 1) / 2; }

int line_index(int n, int i, int j) {
    if (i > j) std::swap(i, j);
    if (i < 1 || j > n || i == j) throw ContractViolation("line (i, j) out of range");
    // Lines (a, b) with a < i come first: sum_{a<i} (n - a).
    return (i - 1) * n - (i - 1) * i / 2 + (j - i - 1);
}

Edge line_edge(int n, int index) {
    if (index < 0 || index >= line_count(n)) throw ContractViolation("line index out of range");
    for (int i = 1; i < n; ++i) {
        const int row = n - i;
        if (index < row) return {static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(i + 1 + index)};
        index -= row;
    }
    throw ContractViolation("line index out of range");
}

Forest::Forest(int n, std::span<const Edge> edges) {
    check_vertex_count(n);
    if (edges.size() > static_cast<std::size_t>(n - 1 > 0 ? n - 1 : 0))
        throw ContractViolation("a forest over n vertices has at most n - 1 edges");
    n_ = static_cast<std::uint8_t>(n);
    edge_count_ = static_cast<std::uint8_t>(edges.size());
    std::copy(edges.begin(), edges.end(), edges_.begin());
    for (int k = 0; k < edge_count_; ++k) {
        Edge& e = edges_[k];
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i < 1 || e.j > n || e.i == e.j)
            throw ContractViolation("edge references a vertex outside [1, n] or is a loop");
    }
    std::sort(edges_.begin(), edges_.begin() + edge_count_);
    UnionFind uf(n);
    for (int k = 0; k < edge_count_; ++k)
        if (!uf.unite(edges_[k].i - 1, edges_[k].j - 1))
            throw ContractViolation("edge set contains a cycle or a repeated edge");
}

Forest::Forest(int n, std::initializer_list<std::pair<int, int>> edges) {
    std::vector<Edge> list;
    for (auto [i, j] : edges) {
        if (i < 0 || j < 0 || i > kMaxVertices || j > kMaxVertices)
            throw ContractViolation("edge references a vertex outside [1, n]");
        list.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j)});
    }
    *this = Forest(n, list);
}

std::vector<int> Forest::components() const {
    UnionFind uf(n_);
    for (const Edge& e : edges()) uf.unite(e.i - 1, e.j - 1);
    std::vector<int> label(n_, -1), root_label(n_, -1);
    int next = 0;
    for (int v = 0; v < n_; ++v) {
        const int r = uf.find(v);
        if (root_label[r] < 0) root_label[r] = next++;
        label[v] = root_label[r];
    }
    return label;
}

std::vector<int> Forest::path(int i, int j) const {
    if (i < 1 || j < 1 || i > n_ || j > n_) throw ContractViolation("path endpoint out of range");
    if (i == j) return {};
    // Depth-first search from i recording the edge used to reach each vertex.
    std::vector<int> via(n_, -1), prev(n_, -1);
    std::vector<int> stack{i - 1};
    std::vector<bool> seen(n_, false);
    seen[i - 1] = true;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int k = 0; k < edge_count_; ++k) {
            const int a = edges_[k].i - 1, b = edges_[k].j - 1;
            const int w = (a == v) ? b : (b == v ? a : -1);
            if (w < 0 || seen[w]) continue;
            seen[w] = true;
            via[w] = k;
            prev[w] = v;
            stack.push_back(w);
        }
    }
    if (!seen[j - 1]) throw ContractViolation("vertices lie in different forest components");
    std::vector<int> out;
    for (int v = j - 1; v != i - 1; v = prev[v]) out.push_back(via[v]);
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<int> Forest::degrees() const {
    std::vector<int> d(n_, 0);
    for (const Edge& e : edges()) {
        ++d[e.i - 1];
        ++d[e.j - 1];
    }
    return d;
}

bool operator<(const Forest& a, const Forest& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    return std::lexicographical_compare(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end());
}

WeakeningAssignment::WeakeningAssignment(std::vector<double> values) : values_(std::move(values)) {
    for (double w : values_)
        if (!(w >= 0.0 && w <= 1.0)) throw ContractViolation("weakening parameters must lie in [0, 1]");
}

InterpolatedMatrix::InterpolatedMatrix(int n, std::vector<double> entries) : n_(n), entries_(std::move(entries)) {
    if (n < 1 || entries_.size() != static_cast<std::size_t>(n) * n)
        throw ContractViolation("interpolated matrix must be n x n");
}

std::vector<double> InterpolatedMatrix::line_values() const {
    std::vector<double> out;
    out.reserve(line_count(n_));
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) out.push_back((*this)(i, j));
    return out;
}

void for_each_forest(int n, bool trees_only, const std::function<void(const Forest&)>& visit,
                     EnumerationLimits limits) {
    if (limits.cap < 1 || limits.cap > kMaxVertices)
        throw ContractViolation("enumeration cap must lie in [1, " + std::to_string(kMaxVertices) + "]");
    if (n < 1) throw ContractViolation("forest enumeration needs n >= 1");
    if (n > limits.cap) throw ResourceLimit("forest enumeration over " + std::to_string(n) + " vertices", limits.cap);

    const int lines = line_count(n);
    std::vector<Edge> all(lines);
    for (int k = 0; k < lines; ++k) all[k] = line_edge(n, k);

    std::vector<Edge> chosen;
    // Pre-order DFS over increasing line index yields lexicographic order
    // of the sorted edge lists.
    std::function<void(int, const UnionFind&)> grow = [&](int next, const UnionFind& uf) {
        if (!trees_only || static_cast<int>(chosen.size()) == n - 1) visit(Forest(n, chosen));
        if (static_cast<int>(chosen.size()) == n - 1) return;
        for (int k = next; k < lines; ++k) {
            UnionFind extended = uf;
            if (!extended.unite(all[k].i - 1, all[k].j - 1)) continue;
            chosen.push_back(all[k]);
            grow(k + 1, extended);
            chosen.pop_back();
        }
    };
    grow(0, UnionFind(n));
}

std::vector<Forest> enumerate_forests(int n, bool trees_only, EnumerationLimits limits) {
    std::vector<Forest> out;
    for_each_forest(n, trees_only, [&](const Forest& f) { out.push_back(f); }, limits);
    return out;
}

namespace {

// For every ordered pair (i, j), the forest edges on the path between them,
// or no entry (flagged by `connected`) across components.
struct PathTable {
    int n = 0;
    std::vector<std::vector<int>> edges;
    std::vector<bool> connected;

    explicit PathTable(const Forest& f) : n(f.vertex_count()), edges(n * n), connected(n * n, false) {
        const auto comp = f.components();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (comp[i] != comp[j]) continue;
                edges[i * n + j] = f.path(i + 1, j + 1);
                connected[i * n + j] = true;
            }
    }

    double entry(int i, int j, std::span<const double> w) const {
        if (i == j) return 1.0;
        if (i > j) std::swap(i, j);
        if (!connected[i * n + j]) return 0.0;
        double m = 1.0;
        for (int k : edges[i * n + j]) m = std::min(m, w[k]);
        return m;
    }
};

}  // namespace

InterpolatedMatrix interpolate_weakening(const Forest& forest, const WeakeningAssignment& w) {
    if (w.size() != static_cast<std::size_t>(forest.edge_count()))
        throw ContractViolation("weakening assignment must cover exactly the forest edges");
    const int n = forest.vertex_count();
    const PathTable table(forest);
    std::vector<double> entries(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) entries[i * n + j] = table.entry(i, j, w.values());
    return InterpolatedMatrix(n, std::move(entries));
}

double check_positivity(const InterpolatedMatrix& m) {
    const int n = m.size();
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (m(i, j) != m(j, i)) throw ContractViolation("interpolated matrix is not symmetric");
            a(i, j) = m(i, j);
        }
    for (int i = 0; i < n; ++i)
        if (m(i, i) != 1.0) throw ContractViolation("interpolated matrix must have unit diagonal");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

double SmoothFunctionOracle::value_at_ones() const {
    const std::vector<double> ones(line_count(vertex_count()), 1.0);
    return value(ones);
}

ForestFormulaResult apply_forest_formula(const SmoothFunctionOracle& oracle, int n, const QuadratureConfig& cfg,
                                         EnumerationLimits limits) {
    cfg.validate();
    if (oracle.vertex_count() != n) throw ContractViolation("oracle is defined over a different vertex count");
    ForestFormulaResult result;
    const int lines = line_count(n);
    std::vector<Edge> line_edges(lines);
    for (int k = 0; k < lines; ++k) line_edges[k] = line_edge(n, k);
    // Sum the per-forest terms with Kahan compensation; there are up to
    // thousands of them with mixed signs.
    double compensation = 0.0;
    for_each_forest(
        n, false,
        [&](const Forest& f) {
            const PathTable table(f);
            std::vector<int> derivative_lines;
            for (const Edge& e : f.edges()) derivative_lines.push_back(line_index(n, e.i, e.j));
            // Flattened paths of the connected lines; the rest stay at zero.
            std::vector<int> path_lines, path_start{0}, path_edges;
            for (int k = 0; k < lines; ++k) {
                const int i = line_edges[k].i - 1, j = line_edges[k].j - 1;
                if (!table.connected[i * n + j]) continue;
                const auto& p = table.edges[i * n + j];
                path_lines.push_back(k);
                path_edges.insert(path_edges.end(), p.begin(), p.end());
                path_start.push_back(static_cast<int>(path_edges.size()));
            }
            std::vector<double> x(lines, 0.0);
            auto integrand = [&](std::span<const double> w) {
                for (std::size_t p = 0; p < path_lines.size(); ++p) {
                    double m = 1.0;
                    for (int e = path_start[p]; e < path_start[p + 1]; ++e) m = std::min(m, w[path_edges[e]]);
                    x[path_lines[p]] = m;
                }
                return oracle.mixed_partial(derivative_lines, x);
            };
            const Estimate term = quad::integrate_cube_by_orderings(integrand, f.edge_count(), cfg);
            const double y = term.value - compensation;
            const double t = result.value + y;
            compensation = (t - result.value) - y;
            result.value = t;
            result.error += term.error;
            ++result.forests;
        },
        limits);
    return result;
}

std::string to_string(const Forest& f) {
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (const Edge& e : f.edges()) {
        out << (first ? "" : ", ") << "(" << int(e.i) << "," << int(e.j) << ")";
        first = false;
    }
    out << "}";
    return out.str();
}

}  // namespace lvelab::forest
