#include "lvelab/ribbon.hpp"

#include <algorithm>
#include <numeric>

#include "lvelab/errors.hpp"

namespace lvelab::ribbon {

RibbonGraph RibbonGraph::from_pairing(int n_vertices, std::span<const std::pair<int, int>> pairing,
                                      std::span<const int> external) {
    if (n_vertices < 1) throw ContractViolation("a ribbon graph needs at least one vertex");
    RibbonGraph g;
    g.n_ = n_vertices;
    const int slots = 4 * n_vertices;
    g.partner_.assign(slots, -1);
    auto check_range = [&](int s) {
        if (s < 1 || s > slots) throw ContractViolation("slot " + std::to_string(s) + " out of range");
    };
    for (auto [a, b] : pairing) {
        check_range(a);
        check_range(b);
        if (slot_kind(a) == slot_kind(b))
            throw InvalidPairing("slots " + std::to_string(a) + " and " + std::to_string(b) +
                                 " carry the same field; pairings must match Phi with Phi^dagger");
        if (g.partner_[a - 1] != -1 || g.partner_[b - 1] != -1)
            throw InvalidPairing("slot used by two contractions");
        g.partner_[a - 1] = b;
        g.partner_[b - 1] = a;
    }
    for (int s : external) {
        check_range(s);
        if (g.partner_[s - 1] != -1) throw InvalidPairing("slot " + std::to_string(s) + " is both paired and external");
        g.partner_[s - 1] = 0;
    }
    for (int s = 1; s <= slots; ++s)
        if (g.partner_[s - 1] == -1)
            throw ContractViolation("slot " + std::to_string(s) + " is neither paired nor declared external");
    return g;
}

std::vector<std::pair<int, int>> RibbonGraph::pairing() const {
    std::vector<std::pair<int, int>> out;
    for (int s = 1; s <= slot_count(); ++s)
        if (slot_kind(s) == SlotKind::Phi && partner_[s - 1] != 0) out.emplace_back(s, partner_[s - 1]);
    return out;
}

std::vector<int> RibbonGraph::external_slots() const {
    std::vector<int> out;
    for (int s = 1; s <= slot_count(); ++s)
        if (partner_[s - 1] == 0) out.push_back(s);
    return out;
}

std::vector<std::vector<int>> faces(const RibbonGraph& g, FaceConvention convention) {
    const int slots = g.slot_count();
    auto pair = [&](int s) { return g.is_external(s) ? s : g.partner(s); };
    auto step = [&](int s) {
        return convention == FaceConvention::RotationAfterPairing ? g.rotate(pair(s)) : pair(g.rotate(s));
    };
    std::vector<bool> seen(slots + 1, false);
    std::vector<std::vector<int>> out;
    for (int start = 1; start <= slots; ++start) {
        if (seen[start]) continue;
        std::vector<int> cycle;
        for (int s = start; !seen[s]; s = step(s)) {
            seen[s] = true;
            cycle.push_back(s);
        }
        out.push_back(std::move(cycle));
    }
    return out;
}

std::vector<int> vertex_components(const RibbonGraph& g) {
    const int n = g.vertex_count();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [a, b] : g.pairing()) parent[find(slot_vertex(a) - 1)] = find(slot_vertex(b) - 1);
    std::vector<int> label(n, -1), root_label(n, -1);
    int next = 0;
    for (int v = 0; v < n; ++v) {
        const int r = find(v);
        if (root_label[r] < 0) root_label[r] = next++;
        label[v] = root_label[r];
    }
    return label;
}

GraphInvariants invariants(const RibbonGraph& g) {
    GraphInvariants inv;
    inv.vertices = g.vertex_count();
    inv.edges = static_cast<int>(g.pairing().size());
    inv.external_legs = static_cast<int>(g.external_slots().size());

    const auto comp = vertex_components(g);
    inv.components = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    inv.connected = inv.components == 1;

    std::vector<int> v_count(inv.components, 0), e_count(inv.components, 0), f_count(inv.components, 0);
    for (int v = 0; v < inv.vertices; ++v) ++v_count[comp[v]];
    for (auto [a, b] : g.pairing()) ++e_count[comp[slot_vertex(a) - 1]];
    for (const auto& face : faces(g)) {
        ++f_count[comp[slot_vertex(face.front()) - 1]];
        ++inv.faces;
        if (std::any_of(face.begin(), face.end(), [&](int s) { return g.is_external(s); })) ++inv.broken_faces;
    }
    for (int c = 0; c < inv.components; ++c) {
        const int chi = v_count[c] - e_count[c] + f_count[c];
        if (chi > 2 || (2 - chi) % 2 != 0)
            throw StructureViolation("Euler characteristic " + std::to_string(chi) + " is not 2 - 2g");
        inv.genus += (2 - chi) / 2;
    }
    return inv;
}

DivergenceDegree divergence_degree(const GraphInvariants& inv, propagator::PropagatorClass model) {
    if (model != propagator::PropagatorClass::Ordinary)
        throw NotImplemented("divergence degree is only defined for the ordinary class, not " +
                             std::string(propagator::to_string(model)));
    if (!inv.connected) throw ContractViolation("divergence degree needs a connected graph");
    DivergenceDegree d;
    const int broken = std::max(inv.broken_faces, 1);
    d.omega = 4 - inv.external_legs - 8 * inv.genus - 4 * (broken - 1);
    d.two_broken_four_point = inv.external_legs == 4 && inv.broken_faces == 2;
    d.unclassified_broken_faces = inv.broken_faces > 2;
    return d;
}

RibbonGraph from_permutation(int n_vertices, std::span<const int> perm) {
    if (perm.size() != static_cast<std::size_t>(2 * n_vertices))
        throw ContractViolation("vacuum pairing of n vertices matches 2n Phi slots");
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k)
        pairs.emplace_back(phi_slot(static_cast<int>(k)), phi_dagger_slot(perm[k]));
    return RibbonGraph::from_pairing(n_vertices, pairs);
}

int component_count(int n_vertices, std::span<const int> perm) {
    constexpr int kMax = 32;
    if (n_vertices < 1 || n_vertices > kMax) throw ContractViolation("component_count supports 1..32 vertices");
    int parent[kMax];
    std::iota(parent, parent + n_vertices, 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    int components = n_vertices;
    for (std::size_t k = 0; k < perm.size(); ++k) {
        // Phi slot k and Phi^dagger slot perm[k] sit on vertices k/2 and perm[k]/2.
        const int a = find(static_cast<int>(k) / 2), b = find(perm[k] / 2);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components;
}

void for_each_vacuum_pairing_with_first(int n_vertices, int first,
                                        const std::function<void(std::span<const int>)>& visit) {
    const int m = 2 * n_vertices;
    if (first < 0 || first >= m) throw ContractViolation("first contraction out of range");
    std::vector<int> rest;
    for (int k = 0; k < m; ++k)
        if (k != first) rest.push_back(k);
    std::vector<int> perm(m);
    perm[0] = first;
    do {
        std::copy(rest.begin(), rest.end(), perm.begin() + 1);
        visit(perm);
    } while (std::next_permutation(rest.begin(), rest.end()));
}

void for_each_vacuum_pairing(int n_vertices, const std::function<void(std::span<const int>)>& visit) {
    if (n_vertices < 1) throw ContractViolation("pairing enumeration needs n >= 1");
    for (int first = 0; first < 2 * n_vertices; ++first) for_each_vacuum_pairing_with_first(n_vertices, first, visit);
}

}  // namespace lvelab::ribbon
