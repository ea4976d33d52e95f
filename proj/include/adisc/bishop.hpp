#pragma once

#include <string>
#include <vector>

#include "adisc/boundary.hpp"
#include "adisc/frames.hpp"
#include "adisc/poly.hpp"

namespace adisc {

/// Generic CR graph x = h(w, y): CR dimension m, codimension n, with h a
/// real polynomial map of total degree <= 6 in the 2m+n real variables
/// (Re w_1..Re w_m, Im w_1..Im w_m, y_1..y_n), vanishing to second order
/// at the origin. Both conditions are checked on the coefficients.
struct GraphManifold {
    int m = 0;
    int n = 0;
    std::vector<RealPolynomial> h;  // n entries over 2m+n variables

    GraphManifold(int m, int n, std::vector<RealPolynomial> h);

    int ambient_dim() const { return m + n; }
    std::size_t num_vars() const { return std::size_t(2 * m + n); }

    /// h evaluated at (w, y).
    std::vector<double> eval_h(const std::vector<cplx>& w, const std::vector<double>& y) const;

    static GraphManifold flat(int m, int n);

    std::string to_json() const;
    static GraphManifold from_json(const std::string& text);
};

/// Holomorphic map of the disc given by its boundary trace, components
/// ordered (w_1..w_m, z_1..z_n); center value cached from the extension.
struct AnalyticDisc {
    BoundaryFunction boundary;
    std::vector<cplx> center_value;

    /// Validates the holomorphy of the boundary (negative spectral mass per
    /// component below holo_tol) and caches the center.
    explicit AnalyticDisc(BoundaryFunction boundary_trace, double holo_tol = 1e-10);

    std::size_t dimension() const { return boundary.dimension(); }
    std::vector<cplx> at(cplx zeta) const;
};

struct BishopSolution {
    AnalyticDisc disc;
    int iterations = 0;
    double residual = 0.0;  // sup norm of Y - T1[h(W,Y)] - y0 over the grid
    BoundaryFunction w;     // the prescribed w-component
    BoundaryFunction y;     // solved imaginary part, real n-vector
    std::vector<double> y0;
};

struct BishopOptions {
    double tol = 1e-11;
    int max_iter = 200;
    /// Optional replacement for the default initial iterate Y == y0.
    const BoundaryFunction* initial_y = nullptr;
};

/// Picard iteration Y <- T1[h(W,Y)] + y0 from Y == y0. Fails loudly on
/// non-contraction (residual not reduced by a factor 0.9 over 10 consecutive
/// iterations), on iteration overflow, and when the assembled disc is not
/// numerically holomorphic.
BishopSolution solve_bishop(const GraphManifold& mf, const BoundaryFunction& w,
                            const std::vector<double>& y0, const BishopOptions& opts = {});

/// The reference disc: W(zeta) = (rho0 - rho0*zeta, 0, ..., 0), y0 = 0.
/// Checks W_1(1) = 0 and Re W_1 > 0 away from zeta = 1.
BishopSolution reference_disc(const GraphManifold& mf, double rho0, const BoundaryGrid& grid,
                              const BishopOptions& opts = {});

/// Shifted Bishop solve: the w-components 2..m get the constant complex
/// shifts u_star (2(m-1) reals, Re/Im interleaved per component) and the
/// right side gains y: Y = T1[h(W + (0,u*), Y)] + y0 + y.
BishopSolution perturbed_disc(const GraphManifold& mf, const BoundaryFunction& base_w,
                              const std::vector<double>& u_star, const std::vector<double>& y,
                              const std::vector<double>& y0, const BishopOptions& opts = {});

/// Frame of the maximally real manifold R1 swept by the perturbed discs:
/// column 1 is the theta-derivative of the base boundary, columns 2..m the
/// derivatives in the real u_k shifts, columns m+1..N the derivatives in
/// the y shifts. Parameter derivatives use central differences at step 1e-4
/// with one Richardson refinement at half step; the two estimates must
/// agree to 1e-6.
FrameLoop build_r1_frame(const GraphManifold& mf, const BishopSolution& base,
                         const BishopOptions& opts = {});

}  // namespace adisc
