#include "lvelab/wick.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "lvelab/errors.hpp"
#include "lvelab/ribbon.hpp"

namespace lvelab::wick {

TraceWord TraceWord::parse(std::string_view text) {
    TraceWord w;
    std::vector<Letter> current;
    auto flush = [&] {
        if (!current.empty()) w.traces.push_back(std::move(current));
        current.clear();
    };
    for (char c : text) {
        switch (c) {
            case 'P': current.push_back(Letter::Phi); break;
            case 'D': current.push_back(Letter::PhiDagger); break;
            case 'S': current.push_back(Letter::Sigma); break;
            case ' ': flush(); break;
            default: throw ContractViolation(std::string("unknown letter '") + c + "' in trace word");
        }
    }
    flush();
    return w;
}

std::size_t TraceWord::count(Letter l) const {
    std::size_t n = 0;
    for (const auto& t : traces) n += static_cast<std::size_t>(std::count(t.begin(), t.end(), l));
    return n;
}

std::string TraceWord::to_string() const {
    std::string out;
    for (const auto& t : traces) {
        if (!out.empty()) out += ' ';
        for (Letter l : t) out += l == Letter::Phi ? 'P' : l == Letter::PhiDagger ? 'D' : 'S';
    }
    return out;
}

namespace {

// Union-find over the row index of every letter position; the column index
// of a position is the row index of its cyclic successor in the trace.
class IndexClasses {
public:
    explicit IndexClasses(int n) : parent_(n), classes_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void join(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[a] = b;
            --classes_;
        }
    }
    int classes() const { return classes_; }

private:
    std::vector<int> parent_;
    int classes_;
};

struct Positions {
    std::vector<Letter> letter;
    std::vector<int> next;  // cyclic successor within the trace
};

Positions flatten(const TraceWord& word) {
    Positions p;
    for (const auto& t : word.traces) {
        const int base = static_cast<int>(p.letter.size());
        const int len = static_cast<int>(t.size());
        for (int k = 0; k < len; ++k) {
            p.letter.push_back(t[k]);
            p.next.push_back(base + (k + 1) % len);
        }
    }
    return p;
}

}  // namespace

PolynomialInN wick_moment(const TraceWord& word, const GaussianSpec& spec) {
    const Positions pos = flatten(word);
    const int total = static_cast<int>(pos.letter.size());
    std::map<int, std::uint64_t> by_faces;

    if (spec.kind == FieldKind::ComplexMatrix) {
        if (word.count(Letter::Sigma) != 0) throw ContractViolation("sigma letters need the hermitian kind");
        std::vector<int> phis, daggers;
        for (int p = 0; p < total; ++p) (pos.letter[p] == Letter::Phi ? phis : daggers).push_back(p);
        if (phis.size() != daggers.size())
            throw ContractViolation("unbalanced word: " + std::to_string(phis.size()) + " Phi against " +
                                    std::to_string(daggers.size()) + " Phi^dagger");
        std::vector<int> perm(phis.size());
        std::iota(perm.begin(), perm.end(), 0);
        do {
            IndexClasses ix(total);
            for (std::size_t k = 0; k < phis.size(); ++k) {
                // Phi at q is Phi_{r_q c_q}; Phi^dagger at p is conj(Phi)_{c_p r_p}.
                const int q = phis[k], p = daggers[perm[k]];
                ix.join(pos.next[p], q);
                ix.join(p, pos.next[q]);
            }
            ++by_faces[ix.classes()];
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        if (word.count(Letter::Sigma) != static_cast<std::size_t>(total))
            throw ContractViolation("hermitian moments take sigma letters only");
        if (total % 2 != 0) throw ContractViolation("odd number of sigma letters");
        // Perfect matchings: pair the lowest free position with each other one.
        std::vector<int> mate(total, -1);
        auto recurse = [&](auto&& self) -> void {
            int first = -1;
            for (int p = 0; p < total; ++p)
                if (mate[p] < 0) {
                    first = p;
                    break;
                }
            if (first < 0) {
                IndexClasses ix(total);
                for (int p = 0; p < total; ++p)
                    if (p < mate[p]) {
                        ix.join(p, pos.next[mate[p]]);
                        ix.join(pos.next[p], mate[p]);
                    }
                ++by_faces[ix.classes()];
                return;
            }
            for (int q = first + 1; q < total; ++q) {
                if (mate[q] >= 0) continue;
                mate[first] = q;
                mate[q] = first;
                self(self);
                mate[first] = mate[q] = -1;
            }
        };
        recurse(recurse);
    }
    PolynomialInN out;
    for (auto [f, count] : by_faces) out.add(f, Rational(static_cast<unsigned long>(count)));
    return out;
}

int index_face_count(int n_vertices, const int* perm) {
    constexpr int kMax = 4 * 16;
    const int total = 4 * n_vertices;
    if (n_vertices < 1 || total > kMax) throw ContractViolation("index_face_count supports 1..16 vertices");
    int parent[kMax];
    std::iota(parent, parent + total, 0);
    int classes = total;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto join = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[a] = b;
            --classes;
        }
    };
    auto next = [](int p) { return (p & ~3) | ((p + 1) & 3); };
    for (int k = 0; k < 2 * n_vertices; ++k) {
        const int q = 4 * (k / 2) + 2 * (k % 2);
        const int p = 4 * (perm[k] / 2) + 2 * (perm[k] % 2) + 1;
        join(next(p), q);
        join(p, next(q));
    }
    return classes;
}

PairingCensus pairing_census(int order, const WorkerPool& pool) {
    if (order < 1) throw ContractViolation("pairing census needs order >= 1");
    const int m = 2 * order;
    auto partial = pool.map<PairingCensus>(static_cast<std::size_t>(m), [&](std::size_t first) {
        PairingCensus c;
        ribbon::for_each_vacuum_pairing_with_first(order, static_cast<int>(first), [&](std::span<const int> perm) {
            const int f = index_face_count(order, perm.data());
            ++c.total;
            ++c.all_by_faces[f];
            if (ribbon::component_count(order, perm) == 1) {
                ++c.connected;
                ++c.connected_by_faces[f];
            }
        });
        return c;
    });
    PairingCensus out;
    out.order = order;
    for (const auto& c : partial) {
        out.total += c.total;
        out.connected += c.connected;
        for (auto [f, n] : c.connected_by_faces) out.connected_by_faces[f] += n;
        for (auto [f, n] : c.all_by_faces) out.all_by_faces[f] += n;
    }
    return out;
}

namespace {

void check_request(int max_order, const GaussianSpec& spec, SeriesLimits limits) {
    if (spec.kind != FieldKind::ComplexMatrix)
        throw ContractViolation("the quartic series is defined for the complex matrix measure");
    if (max_order < 0) throw ContractViolation("max_order must be non-negative");
    if (max_order > limits.order_cap)
        throw ResourceLimit("order " + std::to_string(max_order) + " enumerates (" + std::to_string(2 * max_order) +
                                ")! pairings",
                            limits.order_cap);
}

// (-1)^k / k! * sum count_F N^(F-k)
PolynomialInN order_coefficient(int k, const std::map<int, std::uint64_t>& by_faces) {
    Rational prefactor = k % 2 == 0 ? 1 : -1;
    for (int i = 2; i <= k; ++i) prefactor /= i;
    PolynomialInN out;
    for (auto [f, count] : by_faces) out.add(f - k, prefactor * Rational(static_cast<unsigned long>(count)));
    return out;
}

}  // namespace

SeriesInN z_series(int max_order, const GaussianSpec& spec, const WorkerPool& pool, SeriesLimits limits) {
    check_request(max_order, spec, limits);
    SeriesInN s;
    s.add(0, PolynomialInN(0, 1));
    for (int k = 1; k <= max_order; ++k) s.add(k, order_coefficient(k, pairing_census(k, pool).all_by_faces));
    return s;
}

SeriesInN log_z_series(int max_order, const GaussianSpec& spec, const WorkerPool& pool, SeriesLimits limits) {
    check_request(max_order, spec, limits);
    SeriesInN s;
    for (int k = 1; k <= max_order; ++k)
        s.add(k, order_coefficient(k, pairing_census(k, pool).connected_by_faces));
    return s;
}

GenusSplit genus_split(const SeriesInN& s) {
    GenusSplit out;
    for (const auto& [k, poly] : s.orders()) {
        for (const auto& [power, c] : poly.terms()) {
            if (power > 2 || (2 - power) % 2 != 0)
                throw StructureViolation("order " + std::to_string(k) + " carries N^" + std::to_string(power) +
                                         ", not of the form N^(2-2g)");
            out[(2 - power) / 2][k] = c;
        }
    }
    return out;
}

std::string to_csv(const SeriesInN& s) {
    std::ostringstream out;
    out << "order,N_power,coefficient\n";
    for (const auto& [k, poly] : s.orders())
        for (auto it = poly.terms().rbegin(); it != poly.terms().rend(); ++it)
            out << k << ',' << it->first << ',' << to_fraction_string(it->second) << '\n';
    return out.str();
}

}  // namespace lvelab::wick
