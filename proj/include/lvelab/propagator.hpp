#pragma once

#include <string>
#include <string_view>

namespace lvelab::propagator {

/// Four-way taxonomy of vulcanized noncommutative models by propagator.
enum class PropagatorClass { Ordinary, SelfDual, Covariant, SelfDualCovariant };

std::string_view to_string(PropagatorClass c);
PropagatorClass class_from_string(std::string_view name);

struct PropagatorSpec {
    PropagatorClass cls = PropagatorClass::SelfDual;
    double omega = 1.0;
    double mass_constant = 1.0;  // A

    /// SelfDual and SelfDualCovariant need omega == 1, the other two
    /// 0 < omega < 1, and A >= 0. Throws DomainError.
    void validate() const;
};

/// (omega, covariant) -> class. Throws DomainError outside (0, 1].
PropagatorClass classify(double omega, bool covariant);

/// Diagonal matrix-base kernel G_{m,n}: 1/(m + n + A) for SelfDual and
/// 1/(m + A) for SelfDualCovariant. The other two classes are only known
/// in approximate continuum form and raise NotImplemented. A vanishing
/// denominator raises DomainError.
double kernel_value(const PropagatorSpec& spec, long m, long n);

/// Continuum form of the propagator, as descriptive text only.
std::string_view continuum_form(PropagatorClass c);

bool has_matrix_base_form(PropagatorClass c);

}  // namespace lvelab::propagator
