#pragma once

#include "adisc/boundary.hpp"

namespace adisc {

/// The two normalizations of the harmonic conjugate used here:
/// AtCenter is T0 with (T0 u)(0) = 0 at the disc center (zero-mean output),
/// AtOne is T1 with T1 u(1) = 0 (output vanishes at theta = 0).
enum class ConjugationKind { AtCenter, AtOne };

/// Harmonic conjugate of a real-valued function, acting mode by mode:
/// a_n cos + b_n sin -> a_n sin - b_n cos for n >= 1. The unpaired Nyquist
/// mode is zeroed. Throws on non-real input.
BoundaryFunction conjugate(const BoundaryFunction& u, ConjugationKind kind);

/// Fraction of spectral energy at negative frequencies, summed over all
/// components; 0 for the zero function.
double negative_spectrum_mass(const BoundaryFunction& f);
double negative_spectrum_mass_component(const BoundaryFunction& f, std::size_t comp);
/// Worst component.
double max_negative_spectrum_mass(const BoundaryFunction& f);

/// Evaluate sum_{n>=0} c_n zeta^n inside the disc. Requires |zeta| <= 1-1e-6
/// and negligible negative spectrum (mass below neg_mass_tol).
std::vector<cplx> holomorphic_extension(const BoundaryFunction& f, cplx zeta,
                                        double neg_mass_tol = 1e-8);

/// Winding number of a nonvanishing scalar loop around the origin, computed
/// by summing principal-branch argument increments between consecutive
/// samples. Requires min |f| > tol and every increment below pi/2.
int winding_number(const BoundaryFunction& f, double tol);

}  // namespace adisc
