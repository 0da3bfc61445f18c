#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lvelab/propagator.hpp"

namespace lvelab::ribbon {

// Vertex v (1-based) owns the half-edge slots 4v-3 .. 4v, in the cyclic
// order Phi, Phi^dagger, Phi, Phi^dagger of Tr Phi Phi^+ Phi Phi^+. Public
// slot numbers are 1-based; internally slot s maps to s - 1.

enum class SlotKind : std::uint8_t { Phi, PhiDagger };

inline SlotKind slot_kind(int slot) { return ((slot - 1) % 2 == 0) ? SlotKind::Phi : SlotKind::PhiDagger; }
inline int slot_vertex(int slot) { return (slot - 1) / 4 + 1; }

/// Orientable combinatorial map built from Wick contractions of quartic
/// complex-matrix vertices.
class RibbonGraph {
public:
    /// Validates that every pair joins a Phi slot to a Phi^dagger slot,
    /// that each slot is used at most once and that the unpaired slots are
    /// exactly `external`. Throws InvalidPairing or ContractViolation.
    static RibbonGraph from_pairing(int n_vertices, std::span<const std::pair<int, int>> pairing,
                                    std::span<const int> external = {});

    int vertex_count() const noexcept { return n_; }
    int slot_count() const noexcept { return 4 * n_; }
    /// Partner slot (1-based) or 0 for an external slot.
    int partner(int slot) const { return partner_[slot - 1]; }
    bool is_external(int slot) const { return partner_[slot - 1] == 0; }
    /// Next slot in the cyclic order around its vertex.
    int rotate(int slot) const { return (slot - 1) % 4 == 3 ? slot - 3 : slot + 1; }

    /// Internal edges as (Phi slot, Phi^dagger slot), sorted.
    std::vector<std::pair<int, int>> pairing() const;
    std::vector<int> external_slots() const;

private:
    int n_ = 0;
    std::vector<int> partner_;
};

struct GraphInvariants {
    int vertices = 0;
    int edges = 0;
    int faces = 0;
    int genus = 0;
    int broken_faces = 0;
    int components = 0;
    bool connected = false;
    int external_legs = 0;
};

enum class FaceConvention { RotationAfterPairing, PairingAfterRotation };

/// Faces as cycles of rotation o pairing (or the reverse composition);
/// external slots are fixed points of the pairing. Each face lists slots.
std::vector<std::vector<int>> faces(const RibbonGraph& g,
                                    FaceConvention convention = FaceConvention::RotationAfterPairing);

/// Connected-component label per vertex (0-based), in first-appearance order.
std::vector<int> vertex_components(const RibbonGraph& g);

/// Euler relation per component: V - E + F = 2 - 2g, summed genus.
GraphInvariants invariants(const RibbonGraph& g);

struct DivergenceDegree {
    int omega = 0;
    /// ext = 4 with two broken faces: the case handled by mass renormalization.
    bool two_broken_four_point = false;
    /// B > 2: omega is still reported, but the weighting of extra broken
    /// faces is not classified.
    bool unclassified_broken_faces = false;
};

/// omega = 4 - ext - 8g - 4(B - 1) for the ordinary class. Other classes
/// raise NotImplemented; disconnected graphs raise ContractViolation.
DivergenceDegree divergence_degree(const GraphInvariants& inv, propagator::PropagatorClass model);

/// Visits every vacuum pairing of n quartic vertices: perm[k] is the index
/// (0 .. 2n-1) of the Phi^dagger slot matched to the k-th Phi slot, with Phi
/// slots and Phi^dagger slots each numbered in increasing slot order.
/// The (2n)! pairings are visited in lexicographic order of perm.
void for_each_vacuum_pairing(int n_vertices, const std::function<void(std::span<const int>)>& visit);

/// Same enumeration restricted to pairings whose first Phi slot is matched
/// to `first` (used to split the work across workers).
void for_each_vacuum_pairing_with_first(int n_vertices, int first,
                                        const std::function<void(std::span<const int>)>& visit);

/// 1-based slot of the k-th Phi (resp. Phi^dagger) slot, k 0-based.
inline int phi_slot(int k) { return 4 * (k / 2) + 2 * (k % 2) + 1; }
inline int phi_dagger_slot(int k) { return 4 * (k / 2) + 2 * (k % 2) + 2; }

RibbonGraph from_permutation(int n_vertices, std::span<const int> perm);

/// Number of connected components of the vacuum graph encoded by `perm`,
/// without building the RibbonGraph (hot path of the series enumeration).
int component_count(int n_vertices, std::span<const int> perm);

}  // namespace lvelab::ribbon
