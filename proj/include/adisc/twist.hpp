#pragma once

#include <vector>

#include "adisc/boundary.hpp"
#include "adisc/frames.hpp"
#include "adisc/poly.hpp"

namespace adisc {

/// Index-raising scalar g = zeta^ell * h with h = exp(-T0 v + i v)
/// nonvanishing and holomorphic, g real on the long arc |theta| <= pi - eps/8
/// and winding exactly ell.
struct TwistFunction {
    int ell = 0;
    double eps = 0.0;
    BoundaryFunction g;
    BoundaryFunction h;
};

/// Grid large enough to resolve the phase transition of a twist (the
/// argument sweeps 2*pi*ell across an arc of width eps/4) so winding
/// numbers evaluate; never below the structural minimum max(256, 64 ell/eps).
std::size_t recommended_twist_grid(int ell, double eps);

/// Builds v equal to -ell*theta on the long arc, closed up across the short
/// arc by a quintic matched to value and two derivatives at the endpoints,
/// and returns g = zeta^ell exp(-T0 v + i v). All TwistFunction invariants
/// are re-checked after construction.
TwistFunction make_twist(int ell, double eps, const BoundaryGrid& grid);

/// Family r(s, z) gluing a graph manifold R = {y = phi(x)} to its moving
/// tangent planes along a curve gamma(s) in R: the zero set of r(s, .) is
/// the affine tangent plane at gamma(s) for |s| <= eps/4 and R itself for
/// |s| >= eps/2.
class GluedFamily {
public:
    GluedFamily(std::vector<RealPolynomial> phi, std::vector<RealPolynomial> gamma_x, double eps);

    std::size_t dimension() const { return phi_.size(); }
    double eps() const { return eps_; }

    /// Cutoff: 0 on |s| <= eps/4, 1 on |s| >= eps/2, C-infinity in between.
    double chi(double s) const;

    /// Point gamma(s) = (x(s), phi(x(s))) in R^{2N}.
    std::vector<double> gamma(double s) const;

    /// Defining polynomials r_j(s, .) over variables (x_1..x_N, y_1..y_N).
    std::vector<RealPolynomial> defining_at(double s) const;

    /// Tangent direction (e_dir, dphi(x(s)) e_dir) of R at gamma(s).
    std::vector<double> tangent_direction(double s, std::size_t dir) const;

    /// Base defining functions y_j - phi_j(x).
    std::vector<RealPolynomial> base_defining() const;

private:
    std::vector<RealPolynomial> phi_;      // N polynomials over x in R^N
    std::vector<RealPolynomial> gamma_x_;  // N polynomials over s
    double eps_;
};

GluedFamily glue_tangent_family(std::vector<RealPolynomial> phi,
                                std::vector<RealPolynomial> gamma_x, double eps);

/// Index-raising twist of a structured frame: column j of the structured base
/// (zeta Theta_1, Theta_2, ..., Theta_N) is multiplied by g_{ell_j}. The
/// result carries its structured factorization
/// G = (h_1 Theta_1 | ... | h_N Theta_N) * diag(zeta^{1+ell_1}, zeta^{ell_2}, ...),
/// with the carrier certified holomorphic and invertible on the closed disc
/// (negative spectral mass of each column below 1e-10, det winding zero and
/// bounded away from zero).
FrameLoop twist_frame(const ThetaFrame& base, const std::vector<int>& ells, double eps);

/// The same twist applied at the ThetaFrame level: columns h_j * Theta_j,
/// powers (1 + ell_1, ell_2, ..., ell_N). Used to drive the nearby-disc
/// machinery on twisted targets.
ThetaFrame twist_theta_frame(const ThetaFrame& base, const std::vector<int>& ells, double eps);

}  // namespace adisc
