#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lvelab/parallel.hpp"
#include "lvelab/series.hpp"

namespace lvelab::wick {

enum class FieldKind { ComplexMatrix, Hermitian };

/// Complex kind: <conj(Phi)_ij Phi_kl> = d_ik d_jl, <Phi Phi> = 0.
/// Hermitian kind: <s_ij s_kl> = d_il d_jk.
struct GaussianSpec {
    FieldKind kind = FieldKind::ComplexMatrix;
    /// Matrix size used when a caller evaluates numerically; 0 keeps N
    /// symbolic. Moments are always returned as polynomials in N.
    int N = 0;
};

enum class Letter : std::uint8_t { Phi, PhiDagger, Sigma };

/// Product of traces of words in Phi, Phi^dagger (complex kind) or sigma
/// (hermitian kind).
struct TraceWord {
    std::vector<std::vector<Letter>> traces;

    /// Space-separated traces, one letter per factor: 'P' = Phi,
    /// 'D' = Phi^dagger, 'S' = sigma. "DPDP" is Tr Phi^+ Phi Phi^+ Phi,
    /// "" is the empty word.
    static TraceWord parse(std::string_view text);
    std::size_t count(Letter l) const;
    std::string to_string() const;
};

/// Exact Gaussian moment: sum over all admissible pairings of N^F, F the
/// number of free index cycles left by the Kronecker deltas.
PolynomialInN wick_moment(const TraceWord& word, const GaussianSpec& spec);

/// Index cycles of the vacuum pairing `perm` of n quartic vertices
/// Tr Phi Phi^+ Phi Phi^+, by union-find over the delta constraints.
/// perm follows the numbering of ribbon::for_each_vacuum_pairing.
int index_face_count(int n_vertices, const int* perm);

inline constexpr int kDefaultOrderCap = 5;

struct SeriesLimits {
    int order_cap = kDefaultOrderCap;
};

/// Histogram of pairings at one order: (connected?, F) -> count.
struct PairingCensus {
    int order = 0;
    std::uint64_t total = 0;
    std::uint64_t connected = 0;
    std::map<int, std::uint64_t> connected_by_faces;
    std::map<int, std::uint64_t> all_by_faces;
};

/// Enumerates the (2n)! pairings at order n, split over the first
/// contraction across the pool's workers.
PairingCensus pairing_census(int order, const WorkerPool& pool = WorkerPool());

/// Coefficients of lambda^k in Z, k <= max_order.
SeriesInN z_series(int max_order, const GaussianSpec& spec = {}, const WorkerPool& pool = WorkerPool(),
                   SeriesLimits limits = {});

/// Coefficients of lambda^k in log Z from the connected pairings,
/// c_k = (-1)^k / k! sum_connected N^(F-k). Order 0 is zero.
SeriesInN log_z_series(int max_order, const GaussianSpec& spec = {}, const WorkerPool& pool = WorkerPool(),
                       SeriesLimits limits = {});

/// genus -> order -> a_{k,g} with c_k = N^2 sum_g a_{k,g} N^(-2g).
/// Throws StructureViolation for any power outside {2, 0, -2, ...}.
using GenusSplit = std::map<int, std::map<int, Rational>>;
GenusSplit genus_split(const SeriesInN& s);

/// CSV with header "order,N_power,coefficient", one row per nonzero
/// coefficient, coefficients as "p/q".
std::string to_csv(const SeriesInN& s);

}  // namespace lvelab::wick
