#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lvelab/quadrature.hpp"

namespace lvelab::forest {

/// Largest vertex count a Forest can hold. The enumeration cap (default 9)
/// is a separate, configurable limit below this.
inline constexpr int kMaxVertices = 16;
inline constexpr int kDefaultEnumerationCap = 9;

/// Unordered pair of vertices, stored with i < j, 1-based.
struct Edge {
    std::uint8_t i = 0;
    std::uint8_t j = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Index of the line (i, j), 1 <= i < j <= n, in lexicographic order of
/// pairs: (1,2), (1,3), ..., (1,n), (2,3), ...
int line_index(int n, int i, int j);
int line_count(int n);
Edge line_edge(int n, int index);

/// Acyclic edge set over n labeled vertices. Edges are kept sorted, so two
/// forests compare equal exactly when their edge sets do.
class Forest {
public:
    Forest() = default;

    /// Validates range and acyclicity; throws ContractViolation otherwise.
    Forest(int n, std::span<const Edge> edges);
    Forest(int n, std::initializer_list<std::pair<int, int>> edges);

    int vertex_count() const noexcept { return n_; }
    int edge_count() const noexcept { return edge_count_; }
    std::span<const Edge> edges() const noexcept { return {edges_.data(), static_cast<std::size_t>(edge_count_)}; }
    bool is_tree() const noexcept { return edge_count_ == n_ - 1; }

    /// Connected-component label of each vertex (0-based vertex index),
    /// labels numbered in order of first appearance.
    std::vector<int> components() const;

    /// Edge indices (into edges()) along the unique path between vertices
    /// i and j (1-based). Empty when i == j; throws ContractViolation when
    /// the vertices are in different components.
    std::vector<int> path(int i, int j) const;

    std::vector<int> degrees() const;

    friend bool operator==(const Forest& a, const Forest& b) {
        return a.n_ == b.n_ && std::equal(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end());
    }
    /// Canonical order: lexicographic on the sorted edge lists.
    friend bool operator<(const Forest& a, const Forest& b);

private:
    std::uint8_t n_ = 0;
    std::uint8_t edge_count_ = 0;
    std::array<Edge, kMaxVertices - 1> edges_{};
};

/// Weakening parameter per forest edge, aligned with Forest::edges().
class WeakeningAssignment {
public:
    WeakeningAssignment() = default;
    explicit WeakeningAssignment(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
};

/// Symmetric n x n interpolated matrix, row-major.
class InterpolatedMatrix {
public:
    InterpolatedMatrix() = default;
    InterpolatedMatrix(int n, std::vector<double> entries);

    int size() const noexcept { return n_; }
    double operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i) * n_ + j]; }
    std::span<const double> entries() const noexcept { return entries_; }

    /// Off-diagonal entries as line variables, in line_index order.
    std::vector<double> line_values() const;

private:
    int n_ = 0;
    std::vector<double> entries_;
};

struct EnumerationLimits {
    int cap = kDefaultEnumerationCap;
};

/// Calls `visit` on every forest over n vertices (only spanning trees with
/// trees_only), in canonical order.
void for_each_forest(int n, bool trees_only, const std::function<void(const Forest&)>& visit,
                     EnumerationLimits limits = {});

std::vector<Forest> enumerate_forests(int n, bool trees_only, EnumerationLimits limits = {});

/// x_ij = 0 across components, minimum weakening parameter along the
/// forest path otherwise, 1 on the diagonal. Ties on a path need no
/// tie-breaking: the minimum value is the same whichever edge attains it.
InterpolatedMatrix interpolate_weakening(const Forest& forest, const WeakeningAssignment& w);

/// Smallest eigenvalue. Throws ContractViolation when the matrix is not
/// symmetric with unit diagonal.
double check_positivity(const InterpolatedMatrix& m);

/// Smooth function of the n(n-1)/2 line variables. Implementations supply
/// the mixed first-order partial derivative with respect to a set of
/// distinct lines; the set is unordered (mixed partials must commute).
class SmoothFunctionOracle {
public:
    virtual ~SmoothFunctionOracle() = default;
    virtual int vertex_count() const = 0;
    /// lines: distinct line indices; x: all line variables.
    virtual double mixed_partial(std::span<const int> lines, std::span<const double> x) const = 0;
    virtual std::string describe() const { return "oracle"; }

    double value(std::span<const double> x) const { return mixed_partial({}, x); }
    double value_at_ones() const;
};

/// Result of the forest formula with its per-forest breakdown.
struct ForestFormulaResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t forests = 0;
};

/// sum over forests of the w-integrated mixed partials at the interpolated
/// point. The integrals use the ordered-simplex Gauss-Legendre scheme, so
/// the kinks of the min-interpolation never fall inside a panel.
ForestFormulaResult apply_forest_formula(const SmoothFunctionOracle& oracle, int n,
                                         const QuadratureConfig& cfg = {}, EnumerationLimits limits = {});

std::string to_string(const Forest& f);

}  // namespace lvelab::forest
