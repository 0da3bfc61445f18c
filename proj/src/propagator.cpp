#include "lvelab/propagator.hpp"

#include "lvelab/errors.hpp"

namespace lvelab::propagator {

std::string_view to_string(PropagatorClass c) {
    switch (c) {
        case PropagatorClass::Ordinary: return "ordinary";
        case PropagatorClass::SelfDual: return "self-dual";
        case PropagatorClass::Covariant: return "covariant";
        case PropagatorClass::SelfDualCovariant: return "self-dual-covariant";
    }
    return "unknown";
}

PropagatorClass class_from_string(std::string_view name) {
    for (auto c : {PropagatorClass::Ordinary, PropagatorClass::SelfDual, PropagatorClass::Covariant,
                   PropagatorClass::SelfDualCovariant})
        if (to_string(c) == name) return c;
    throw ContractViolation("unknown propagator class '" + std::string(name) + "'");
}

void PropagatorSpec::validate() const {
    if (!(mass_constant >= 0.0)) throw DomainError("propagator constant A must be non-negative");
    const bool self_dual = cls == PropagatorClass::SelfDual || cls == PropagatorClass::SelfDualCovariant;
    if (self_dual && omega != 1.0) throw DomainError(std::string(to_string(cls)) + " models require omega = 1");
    if (!self_dual && !(omega > 0.0 && omega < 1.0))
        throw DomainError(std::string(to_string(cls)) + " models require 0 < omega < 1");
}

PropagatorClass classify(double omega, bool covariant) {
    if (!(omega > 0.0 && omega <= 1.0)) throw DomainError("omega must lie in (0, 1]");
    if (omega == 1.0) return covariant ? PropagatorClass::SelfDualCovariant : PropagatorClass::SelfDual;
    return covariant ? PropagatorClass::Covariant : PropagatorClass::Ordinary;
}

bool has_matrix_base_form(PropagatorClass c) {
    return c == PropagatorClass::SelfDual || c == PropagatorClass::SelfDualCovariant;
}

double kernel_value(const PropagatorSpec& spec, long m, long n) {
    spec.validate();
    if (m < 0 || n < 0) throw DomainError("matrix indices must be non-negative");
    double denominator = 0.0;
    switch (spec.cls) {
        case PropagatorClass::SelfDual: denominator = static_cast<double>(m + n) + spec.mass_constant; break;
        case PropagatorClass::SelfDualCovariant: denominator = static_cast<double>(m) + spec.mass_constant; break;
        default:
            throw NotImplemented(std::string(to_string(spec.cls)) +
                                 " propagator has no closed matrix-base form; only an approximate continuum form is known");
    }
    if (denominator == 0.0) throw DomainError("propagator pole: vanishing denominator");
    return 1.0 / denominator;
}

std::string_view continuum_form(PropagatorClass c) {
    switch (c) {
        case PropagatorClass::Ordinary: return "~ (p^2 + Omega^2 xt^2 + A)^-1";
        case PropagatorClass::SelfDual: return "LS invariant, Omega = 1; matrix base G_mn = (m + n + A)^-1";
        case PropagatorClass::Covariant: return "~ (p^2 + Omega^2 xt^2 + 2 Omega xt ^ p)^-1";
        case PropagatorClass::SelfDualCovariant: return "Omega = 1; matrix base G_mn = (m + A)^-1";
    }
    return "";
}

}  // namespace lvelab::propagator
