#pragma once

#include <functional>
#include <string>
#include <vector>

#include "adisc/bishop.hpp"
#include "adisc/boundary.hpp"
#include "adisc/frames.hpp"
#include "adisc/poly.hpp"

namespace adisc {

/// Moving family of maximally real targets R(zeta_k) near a reference disc,
/// given by N real defining polynomials per sample in the local coordinates
/// p in C^N centered at the disc boundary. Polynomial variables are ordered
/// (Re p_1..Re p_N, Im p_1..Im p_N). Construction checks r(zeta_k, 0) = 0
/// and that the zero sets are maximally real (invertible Wirtinger
/// Jacobian), and normalizes each row to unit gradient at p = 0 so
/// residuals read as distances to first order.
class AttachmentTarget {
public:
    AttachmentTarget(FrameLoop frame, std::vector<std::vector<RealPolynomial>> defining,
                     bool linear_flag);

    /// Affine target whose zero sets are the frame's spans L(zeta_k).
    static AttachmentTarget linear(const FrameLoop& frame);

    const FrameLoop& frame() const { return frame_; }
    bool linear_flag() const { return linear_; }
    std::size_t dimension() const { return n_; }
    const BoundaryGrid& grid() const { return frame_.grid(); }

    std::vector<double> eval(std::size_t k, const std::vector<cplx>& p) const;
    /// Real directional derivative of r_j at p along the complex direction q.
    double directional_derivative(std::size_t k, std::size_t j, const std::vector<cplx>& p,
                                  const std::vector<cplx>& q) const;

private:
    FrameLoop frame_;
    std::vector<std::vector<RealPolynomial>> defining_;            // [k][j]
    std::vector<std::vector<std::vector<RealPolynomial>>> partials_;  // [k][j][var]
    bool linear_ = false;
    std::size_t n_ = 0;
};

/// Sigma(kappa_j + 1) = kappa + N; requires all kappa_j >= 0.
std::size_t param_space_dim(const IndexProfile& profile);

/// Real parameters of the palindromic polynomials h_j: kappa_j + 1 reals per
/// component, with an optional restriction mask pinning entries to zero.
struct DiscParameters {
    std::vector<int> kappa;       // per component, even and >= 0
    std::vector<double> t;        // concatenated, kappa_j + 1 per component
    std::vector<bool> mask;       // true = frozen to zero

    DiscParameters(std::vector<int> kappa, std::vector<double> t, std::vector<bool> mask = {});

    std::size_t offset(std::size_t j) const;
    std::size_t free_count() const;

    /// The step4 layout: kappa_j = 4 with t1 = t2 = t5 = 0, leaving the 2N
    /// reals (t3^j, t4^j) supplied in order (t3^1, t4^1, t3^2, ...).
    static DiscParameters step4(std::size_t n_components, const std::vector<double>& t34);
};

/// The palindromic polynomial h_j of the parameter space: with m_j =
/// kappa_j/2, h_j = sum_{r<m_j} (c_r zeta^r + conj(c_r) zeta^{kappa_j - r})
/// + t_mid zeta^{m_j}, c_r = t_{2r+1} + i t_{2r+2}.
BoundaryFunction poly_h(const DiscParameters& params, std::size_t j, const BoundaryGrid& grid);

/// u_j = zeta^{-m_j} h_j, real on the circle by the palindromic structure
/// (checked to 1e-10). Returns the real N-vector function.
BoundaryFunction u_from_params(const DiscParameters& params, const std::vector<long>& m_powers,
                               const BoundaryGrid& grid);

struct PhiOptions {
    double tol = 1e-11;
    int max_iter = 80;
};

/// Damped quasi-Newton solve of r_j(zeta_k, G(u,f)(zeta_k)) = 0 for the real
/// N-vector f, from f = 0, with the f-Jacobian at (u, f=0) factored once per
/// sample and reused. The variation frame X_j defaults to the target's frame
/// columns; nearby_disc passes the distinguished Theta*sqrt(Lambda) columns.
BoundaryFunction solve_phi(const AttachmentTarget& target, const BoundaryFunction& u,
                           const PhiOptions& opts = {});
BoundaryFunction solve_phi_in_frame(const AttachmentTarget& target,
                                    const std::vector<BoundaryFunction>& x_cols,
                                    const BoundaryFunction& u, const PhiOptions& opts = {});

/// G(u,f) = sum_j u_j X_j + i sum_j {f_j + i T0 f_j} X_j.
BoundaryFunction variation_field(const std::vector<BoundaryFunction>& x_cols,
                                 const BoundaryFunction& u, const BoundaryFunction& f);

struct NearbyDisc {
    AnalyticDisc disc;
    DiscParameters params;
    BoundaryFunction u;
    BoundaryFunction f;
    double residual = 0.0;
    double center_offset = 0.0;  // |A'_t(0) - A'(0)|, checked when all m_j >= 1
};

/// Assembles A' + G(u, phi(u)) for the given parameters and verifies
/// holomorphy (negative spectral mass < 1e-9), the attachment residual, and
/// the fixed center when every m_j >= 1.
NearbyDisc nearby_disc(const AttachmentTarget& target, const AnalyticDisc& base,
                       const ThetaFrame& theta, const DiscParameters& params,
                       const PhiOptions& opts = {});

using DiscFamily = std::function<NearbyDisc(const std::vector<double>&)>;

struct DerivativeEntry {
    std::string label;
    double err_rho = 0.0;   // against the leading term rho e^{i theta} Theta(0) e_j
    double err_half = 0.0;
    double ratio = 0.0;     // err_rho / err_half; ~4 under the O(rho^2) law
    double err_model = 0.0;  // against the full analytic u-part derivative:
                             // finite-difference noise when phi vanishes
};

struct DerivativeReport {
    std::vector<DerivativeEntry> entries;  // 2N parameter directions plus theta
    std::vector<cplx> a;                   // leading coefficients in the Theta(0) basis
};

/// Compares finite-difference derivatives of the step4 family at t = 0,
/// evaluated at zeta = rho e^{i theta}, against the leading terms
/// rho e^{i theta} Theta(0) e_j (and i e_j), and the theta derivative of the
/// base disc against rho e^{i theta} Theta(0) (i a). Errors are RMS over the
/// sampled angles, reported at rho and rho/2 with their ratio.
DerivativeReport derivative_check(const DiscFamily& family, const ThetaFrame& theta,
                                  double rho, const std::vector<double>& theta_samples);

struct FoliationReport {
    bool pass = false;
    double min_singular_value = 0.0;
    double threshold = 0.0;
    std::vector<double> per_angle_min_sv;
};

/// Rank of the real 2N x 2N Jacobian of (theta, t') -> A'_{t'}(rho_eps
/// e^{i theta}) at t' = 0 over sampled angles; PASS iff the smallest
/// singular value exceeds 1e-6 * rho_eps everywhere.
FoliationReport foliation_rank(const DiscFamily& family,
                               const std::vector<std::vector<double>>& slice_basis,
                               double rho_eps, std::size_t num_angles);

/// Slice of the 2N-dimensional step4 parameter space mapping onto the
/// orthogonal complement of Theta(0)(i a) under the leading-order map
/// t -> Theta(0) (t3 + i t4). Returns 2N-1 basis vectors.
std::vector<std::vector<double>> step4_slice_basis(const ThetaFrame& theta,
                                                   const AnalyticDisc& base);
/// A deliberately degenerate slice containing the theta-direction image.
std::vector<std::vector<double>> degenerate_slice_basis(const ThetaFrame& theta,
                                                        const AnalyticDisc& base);

struct RankReport {
    std::size_t rank = 0;
    std::vector<double> singular_values;
    double transversality_angle = 0.0;  // radians, between sweep image and base direction
    std::vector<double> base_direction;  // projected d/dtheta of the base disc
};

/// Measures the rank of v -> [dA/dtheta at theta=0] projected to the normal
/// quotient of the manifold at the origin, over a sweep family of discs.
RankReport rank_report(const std::function<AnalyticDisc(const std::vector<double>&)>& family,
                       const GraphManifold& mf, std::size_t v_dim);

}  // namespace adisc
