#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

#include "lvelab/errors.hpp"
#include "lvelab/lve.hpp"

namespace lvelab::lve {

namespace {

// Faces of a one-trace Gaussian word: cycles of shift o pairing.
int trace_faces(const std::vector<int>& mate) {
    const int len = static_cast<int>(mate.size());
    std::vector<bool> seen(len, false);
    int cycles = 0;
    for (int s = 0; s < len; ++s) {
        if (seen[s]) continue;
        ++cycles;
        for (int x = s; !seen[x]; x = (mate[x] + 1) % len) seen[x] = true;
    }
    return cycles;
}

// Calls visit(mate) for each perfect matching of 0..len-1.
template <class Visit>
void for_each_matching(int len, Visit&& visit) {
    std::vector<int> mate(len, -1);
    auto recurse = [&](auto&& self) -> void {
        int first = 0;
        while (first < len && mate[first] >= 0) ++first;
        if (first == len) {
            visit(mate);
            return;
        }
        for (int q = first + 1; q < len; ++q) {
            if (mate[q] >= 0) continue;
            mate[first] = q;
            mate[q] = first;
            self(self);
            mate[first] = mate[q] = -1;
        }
    };
    recurse(recurse);
}

// Compositions of `total` into `parts` non-negative parts.
template <class Visit>
void for_each_composition(int total, int parts, Visit&& visit) {
    std::vector<int> c(parts, 0);
    auto recurse = [&](auto&& self, int k, int left) -> void {
        if (k == parts - 1) {
            c[k] = left;
            visit(c);
            return;
        }
        for (int x = 0; x <= left; ++x) {
            c[k] = x;
            self(self, k + 1, left - x);
        }
    };
    recurse(recurse, 0, total);
}

Rational power(int base, int exp) {
    Rational r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

Rational factorial(int n) {
    Rational r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace

Rational weakening_integral(int m, const std::vector<std::vector<int>>& min_sets) {
    if (m < 0) throw ContractViolation("dimension must be non-negative");
    for (const auto& s : min_sets) {
        if (s.empty()) throw ContractViolation("a min-set must name at least one edge");
        for (int e : s)
            if (e < 0 || e >= m) throw ContractViolation("edge index out of range in min-set");
    }
    // Sum over orderings of the simplex integrals of prod_k u_k^(e_k),
    // 0 < u_0 < ... < u_{m-1} < 1, which equal prod_k 1 / (sum_{j<=k} (e_j + 1)).
    std::vector<int> order(m), rank(m), exps(m);
    std::iota(order.begin(), order.end(), 0);
    Rational total = 0;
    do {
        for (int r = 0; r < m; ++r) rank[order[r]] = r;
        std::fill(exps.begin(), exps.end(), 0);
        for (const auto& s : min_sets) {
            int low = m;
            for (int e : s) low = std::min(low, rank[e]);
            ++exps[low];
        }
        Rational term = 1;
        int running = 0;
        for (int k = 0; k < m; ++k) {
            running += exps[k] + 1;
            term /= running;
        }
        total += term;
    } while (std::next_permutation(order.begin(), order.end()));
    return total;
}

SeriesInN lve_series(int max_order, const WorkerPool& pool, int cap) {
    if (max_order < 0) throw ContractViolation("max_order must be non-negative");
    if (max_order > cap) throw ResourceLimit("symbolic LVE order " + std::to_string(max_order), cap);
    SeriesInN out;

    // One loop vertex: N sum_p (-2/N)^p / (2p) <Tr sigma^(2p)>.
    for (int p = 1; p <= max_order; ++p) {
        const Rational coefficient = power(-2, p) / (2 * p);
        std::map<int, long> faces;
        for_each_matching(2 * p, [&](const std::vector<int>& mate) { ++faces[trace_faces(mate)]; });
        for (auto [f, count] : faces) out.add(p, PolynomialInN(1 - p + f, coefficient * Rational(count)));
    }

    // Trees on n >= 2 vertices reach order n - 1 with no sigma pairs left.
    struct Task {
        int n;
        TreeShape shape;
    };
    std::vector<Task> tasks;
    for (int n = 2; n <= max_order + 1; ++n)
        for (auto& s : tree_shapes(n, std::max(max_order + 1, kDefaultTreeCap))) tasks.push_back({n, std::move(s)});

    auto partial = pool.map<SeriesInN>(tasks.size(), [&](std::size_t i) {
        const int n = tasks[i].n;
        const auto& tree = tasks[i].shape.representative;
        const int m = n - 1;
        const Rational multiplicity(static_cast<unsigned long>(tasks[i].shape.labeled_count));
        const Rational base = multiplicity * power(-2, m) / factorial(n);

        std::vector<std::vector<std::vector<int>>> paths(n, std::vector<std::vector<int>>(n));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (a != b) {
                    paths[a][b] = tree.path(a + 1, b + 1);
                    std::sort(paths[a][b].begin(), paths[a][b].end());
                }
        std::map<std::vector<std::vector<int>>, Rational> cache;
        auto integral = [&](std::vector<std::vector<int>> sets) {
            std::sort(sets.begin(), sets.end());
            auto it = cache.find(sets);
            if (it != cache.end()) return it->second;
            const Rational v = weakening_integral(m, sets);
            cache.emplace(std::move(sets), v);
            return v;
        };

        SeriesInN s;
        for (const auto& contour : embedding_contours(tree)) {
            const int corners = static_cast<int>(contour.size());
            for (int q = 0; m + q <= max_order; ++q) {
                const Rational prefactor = base * power(-2, q);
                if (q == 0) {
                    s.add(m, PolynomialInN(2, prefactor));
                    continue;
                }
                for_each_composition(2 * q, corners, [&](const std::vector<int>& parts) {
                    std::vector<int> word;
                    for (int c = 0; c < corners; ++c) word.insert(word.end(), parts[c], contour[c]);
                    for_each_matching(2 * q, [&](const std::vector<int>& mate) {
                        std::vector<std::vector<int>> sets;
                        for (int x = 0; x < 2 * q; ++x)
                            if (x < mate[x] && word[x] != word[mate[x]]) sets.push_back(paths[word[x]][word[mate[x]]]);
                        s.add(m + q, PolynomialInN(1 - q + trace_faces(mate), prefactor * integral(std::move(sets))));
                    });
                });
            }
        }
        return s;
    });
    for (const auto& s : partial)
        for (const auto& [k, p] : s.orders()) out.add(k, p);
    return out;
}

}  // namespace lvelab::lve
