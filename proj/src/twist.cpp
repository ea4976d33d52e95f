#include "adisc/twist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "adisc/conjugation.hpp"

namespace adisc {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 8;
    while (p < n) p <<= 1;
    return p;
}

// Quintic smoothstep: q(0)=0, q(1)=1, q'=q''=0 at both ends.
double smoothstep5(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }

// C-infinity step built from exp(-1/x), 0 at 0 and 1 at 1.
double smoothstep_inf(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

}  // namespace

std::size_t recommended_twist_grid(int ell, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("recommended_twist_grid: eps must be positive");
    const double structural = std::max(256.0, 64.0 * double(std::max(ell, 1)) / eps);
    // Peak phase slope of g: ell from zeta^ell plus the quintic ramp
    // 1.875 * 2*pi*ell / (eps/4); eight samples per radian of slope.
    const double slope = double(ell) * (1.0 + 15.0 * kPi / eps);
    const double winding_need = 8.0 * (slope + 16.0);
    std::size_t n = next_pow2(std::size_t(std::max(structural, winding_need)));
    if (ell >= 1) n = std::max<std::size_t>(n, 4096);  // keeps the carrier alias mass tiny
    return std::min<std::size_t>(n, 32768);
}

TwistFunction make_twist(int ell, double eps, const BoundaryGrid& grid) {
    if (ell < 0) throw std::invalid_argument("make_twist: ell must be nonnegative");
    if (eps <= 0.0 || eps / 8.0 >= kPi / 2.0)
        throw std::invalid_argument("make_twist: eps out of range");
    if (grid.size() < std::max<std::size_t>(256, std::size_t(64.0 * double(ell) / eps)))
        throw std::invalid_argument("make_twist: grid too small for ell/eps");

    const std::size_t n = grid.size();
    const double a = kPi - eps / 8.0;  // long arc is |theta| <= a
    std::vector<cplx> v_samples(n);
    for (std::size_t k = 0; k < n; ++k) {
        double th = grid.angle(k);
        if (th > kPi) th -= 2.0 * kPi;  // th in (-pi, pi]
        double v;
        if (std::abs(th) <= a) {
            v = -double(ell) * th;
        } else {
            // short arc around pi, width eps/4, in the unwrapped angle
            // theta_u in (a, 2*pi - a); the 2*pi*ell climb closes the period.
            const double theta_u = (th > 0.0) ? th : th + 2.0 * kPi;
            const double x = (theta_u - a) / (eps / 4.0);
            v = -double(ell) * theta_u + 2.0 * kPi * double(ell) * smoothstep5(x);
        }
        v_samples[k] = cplx(v, 0.0);
    }
    const BoundaryFunction v_fn =
        BoundaryFunction::from_component_samples({std::move(v_samples)}, grid);
    const BoundaryFunction t0v = conjugate(v_fn, ConjugationKind::AtCenter);

    // |h| = exp(-T0 v) swings over e^{4 ell log(1/eps)}-sized ranges; a
    // positive constant factor centers the log-range so downstream frames
    // stay numerically invertible. Scaling by e^c changes none of the
    // invariants (winding, realness on the long arc, nonvanishing).
    double t0v_min = 1e300, t0v_max = -1e300;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = t0v.value(0, k).real();
        t0v_min = std::min(t0v_min, x);
        t0v_max = std::max(t0v_max, x);
    }
    const double center = 0.5 * (t0v_min + t0v_max);

    std::vector<cplx> h_samples(n), g_samples(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx p(center - t0v.value(0, k).real(), v_fn.value(0, k).real());
        const cplx h = std::exp(p);
        h_samples[k] = h;
        g_samples[k] = std::polar(1.0, double(ell) * grid.angle(k)) * h;
    }
    TwistFunction tw{ell, eps,
                     BoundaryFunction::from_component_samples({std::move(g_samples)}, grid),
                     BoundaryFunction::from_component_samples({std::move(h_samples)}, grid)};

    // Invariants.
    double min_h = 1e300, max_g = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        min_h = std::min(min_h, std::abs(tw.h.value(0, k)));
        max_g = std::max(max_g, std::abs(tw.g.value(0, k)));
    }
    if (!(min_h > 0.0))
        throw std::runtime_error("make_twist: invariant violated: h vanishes on the grid");
    for (std::size_t k = 0; k < n; ++k) {
        double th = grid.angle(k);
        if (th > kPi) th -= 2.0 * kPi;
        if (std::abs(th) <= a && std::abs(tw.g.value(0, k).imag()) >= 1e-8 * std::max(1.0, max_g))
            throw std::runtime_error("make_twist: invariant violated: Im g too large on the long arc");
    }
    const int w = winding_number(tw.g, 0.5 * min_h);
    if (w != ell)
        throw std::runtime_error("make_twist: invariant violated: winding " + std::to_string(w) +
                                 " instead of " + std::to_string(ell));
    return tw;
}

GluedFamily::GluedFamily(std::vector<RealPolynomial> phi, std::vector<RealPolynomial> gamma_x,
                         double eps)
    : phi_(std::move(phi)), gamma_x_(std::move(gamma_x)), eps_(eps) {
    const std::size_t n = phi_.size();
    if (n == 0 || gamma_x_.size() != n)
        throw std::invalid_argument("GluedFamily: phi and gamma must both have N components");
    if (eps_ <= 0.0) throw std::invalid_argument("GluedFamily: eps must be positive");
    const std::vector<double> origin(n, 0.0);
    for (const auto& p : phi_) {
        if (p.num_vars() != n) throw std::invalid_argument("GluedFamily: phi arity mismatch");
        if (p.eval(origin) != 0.0)
            throw std::invalid_argument("GluedFamily: phi(0) must vanish");
        for (std::size_t v = 0; v < n; ++v)
            if (p.partial(v).eval(origin) != 0.0)
                throw std::invalid_argument("GluedFamily: dphi(0) must vanish");
    }
    for (const auto& g : gamma_x_)
        if (g.num_vars() != 1) throw std::invalid_argument("GluedFamily: gamma must be a curve in s");
}

double GluedFamily::chi(double s) const {
    const double t = (std::abs(s) - eps_ / 4.0) / (eps_ / 4.0);
    return smoothstep_inf(t);
}

std::vector<double> GluedFamily::gamma(double s) const {
    const std::size_t n = dimension();
    std::vector<double> p(2 * n);
    const double sv[1] = {s};
    for (std::size_t j = 0; j < n; ++j) p[j] = gamma_x_[j].eval(sv);
    std::vector<double> x(p.begin(), p.begin() + long(n));
    for (std::size_t j = 0; j < n; ++j) p[n + j] = phi_[j].eval(x);
    return p;
}

std::vector<double> GluedFamily::tangent_direction(double s, std::size_t dir) const {
    const std::size_t n = dimension();
    if (dir >= n) throw std::invalid_argument("GluedFamily::tangent_direction: bad direction");
    const double sv[1] = {s};
    std::vector<double> xs(n);
    for (std::size_t j = 0; j < n; ++j) xs[j] = gamma_x_[j].eval(sv);
    std::vector<double> t(2 * n, 0.0);
    t[dir] = 1.0;
    for (std::size_t j = 0; j < n; ++j) t[n + j] = phi_[j].partial(dir).eval(xs);
    return t;
}

std::vector<RealPolynomial> GluedFamily::defining_at(double s) const {
    const std::size_t n = dimension();
    const double sv[1] = {s};
    std::vector<double> xs(n);
    for (std::size_t j = 0; j < n; ++j) xs[j] = gamma_x_[j].eval(sv);
    std::vector<double> ys(n);
    for (std::size_t j = 0; j < n; ++j) ys[j] = phi_[j].eval(xs);

    const double cut = chi(s);
    std::vector<RealPolynomial> out;
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        // Taylor expansion of phi_j around x(s) in the shifted variable,
        // then back in x: shifted(center)(x - center) reproduces phi exactly.
        const RealPolynomial taylor = phi_[j].shifted(xs);  // in powers of (x - x(s))
        const RealPolynomial linear_part = taylor.truncate_above(1);   // value + gradient terms
        const RealPolynomial tail = taylor.truncate_below(2);          // |K| >= 2

        // Polynomials over (x, y): embed the x-only pieces.
        auto embed = [n](const RealPolynomial& p) {
            std::vector<PolyTerm> terms;
            for (const auto& t : p.terms()) {
                PolyTerm e;
                e.coeff = t.coeff;
                e.powers = t.powers;
                e.powers.resize(2 * n, 0);
                terms.push_back(std::move(e));
            }
            return RealPolynomial(2 * n, std::move(terms));
        };
        // The shifted polys live in the displacement u = x - x(s); substitute
        // back via another shift. linear_part carries the constant
        // phi_j(x(s)) = y_j(s), so r = y_j - linear - chi * tail is the
        // displayed formula.
        std::vector<double> neg_center(2 * n, 0.0);
        for (std::size_t v = 0; v < n; ++v) neg_center[v] = -xs[v];

        RealPolynomial r = RealPolynomial::variable(2 * n, n + j) -
                           embed(linear_part).shifted(neg_center) -
                           embed(tail).shifted(neg_center).scaled(cut);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RealPolynomial> GluedFamily::base_defining() const {
    const std::size_t n = dimension();
    std::vector<RealPolynomial> out;
    for (std::size_t j = 0; j < n; ++j) {
        auto embed = [n](const RealPolynomial& p) {
            std::vector<PolyTerm> terms;
            for (const auto& t : p.terms()) {
                PolyTerm e;
                e.coeff = t.coeff;
                e.powers = t.powers;
                e.powers.resize(2 * n, 0);
                terms.push_back(std::move(e));
            }
            return RealPolynomial(2 * n, std::move(terms));
        };
        out.push_back(RealPolynomial::variable(2 * n, n + j) - embed(phi_[j]));
    }
    return out;
}

GluedFamily glue_tangent_family(std::vector<RealPolynomial> phi,
                                std::vector<RealPolynomial> gamma_x, double eps) {
    GluedFamily fam(std::move(phi), std::move(gamma_x), eps);
    // Invariant probes: r(s, gamma(s)) = 0; plane zone matches the tangent
    // plane; outer zone reproduces the base functions exactly.
    const std::size_t n = fam.dimension();
    for (double s : {-eps * 0.45, -eps * 0.2, 0.0, eps * 0.1, eps * 0.3, eps * 0.49}) {
        const std::vector<RealPolynomial> r = fam.defining_at(s);
        const std::vector<double> on_curve = fam.gamma(s);
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(r[j].eval(on_curve)) > 1e-10)
                throw std::runtime_error("glue_tangent_family: invariant probe failed: r(s,gamma(s)) != 0");
    }
    const std::vector<RealPolynomial> base = fam.base_defining();
    for (double s : {eps * 0.5, eps * 0.75, eps}) {
        const std::vector<RealPolynomial> r = fam.defining_at(s);
        for (std::size_t j = 0; j < n; ++j)
            if (r[j].max_coeff_difference(base[j]) > 1e-10)
                throw std::runtime_error("glue_tangent_family: invariant probe failed: outer zone");
    }
    // Inside the plane zone the zero set must be the affine tangent plane:
    // probe along the tangent directions (e_k, dphi(x(s)) e_k).
    for (double s : {0.0, eps * 0.2, -eps * 0.2}) {
        const std::vector<RealPolynomial> r = fam.defining_at(s);
        const std::vector<double> center = fam.gamma(s);
        for (std::size_t dir = 0; dir < n; ++dir) {
            const std::vector<double> tan = fam.tangent_direction(s, dir);
            std::vector<double> probe = center;
            for (std::size_t i = 0; i < 2 * n; ++i) probe[i] += 0.1 * tan[i];
            for (std::size_t j = 0; j < n; ++j)
                if (std::abs(r[j].eval(probe)) > 1e-10)
                    throw std::runtime_error(
                        "glue_tangent_family: invariant probe failed: tangent plane");
        }
    }
    return fam;
}

namespace {

// Verifies that q sampled over the loop is holomorphic and invertible on the
// closed disc: per-column negative spectral mass below 1e-10, det winding 0,
// and |det| bounded away from zero.
void certify_carrier(const std::vector<BoundaryFunction>& q_cols, const BoundaryGrid& grid) {
    for (std::size_t j = 0; j < q_cols.size(); ++j) {
        const double mass = max_negative_spectrum_mass(q_cols[j]);
        if (mass >= 1e-10)
            throw std::runtime_error("twist_frame: carrier column " + std::to_string(j) +
                                     " is not numerically holomorphic (mass " +
                                     std::to_string(mass) + ")");
    }
    const std::size_t n = q_cols.size();
    std::vector<cplx> dets(grid.size());
    double max_abs = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CMat m(n, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) m(i, j) = q_cols[j].value(i, k);
        dets[k] = det(m);
        max_abs = std::max(max_abs, std::abs(dets[k]));
    }
    const BoundaryFunction det_fn = BoundaryFunction::from_component_samples({dets}, grid);
    double min_abs = 1e300;
    for (std::size_t k = 0; k < grid.size(); ++k)
        min_abs = std::min(min_abs, std::abs(det_fn.value(0, k)));
    (void)max_abs;
    if (!(min_abs > 1e-200))
        throw std::runtime_error("twist_frame: carrier determinant nearly vanishes");
    if (winding_number(det_fn, 0.5 * min_abs) != 0)
        throw std::runtime_error("twist_frame: carrier determinant has nonzero winding");
}

}  // namespace

ThetaFrame twist_theta_frame(const ThetaFrame& base, const std::vector<int>& ells, double eps) {
    const std::size_t n = base.dimension();
    if (ells.size() != n)
        throw std::invalid_argument("twist_frame: one ell per column required");
    if (base.powers.size() != n || base.powers[0] != 1)
        throw std::invalid_argument("twist_frame: base must have Theta*sqrt(Lambda) powers (1,0,...,0)");
    for (std::size_t j = 1; j < n; ++j)
        if (base.powers[j] != 0)
            throw std::invalid_argument("twist_frame: base must have Theta*sqrt(Lambda) powers (1,0,...,0)");

    std::size_t grid_size = base.grid().size();
    for (int ell : ells) grid_size = std::max(grid_size, recommended_twist_grid(ell, eps));
    // Determinant winding of the twisted loop needs the summed phase slopes resolved.
    double slope_sum = double(n);
    for (int ell : ells) slope_sum += double(ell) * (1.0 + 15.0 * kPi / eps);
    grid_size = std::max(grid_size, next_pow2(std::size_t(8.0 * (slope_sum + 16.0))));
    const BoundaryGrid grid(grid_size);

    ThetaFrame out;
    out.powers.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const TwistFunction tw = make_twist(ells[j], eps, grid);
        const BoundaryFunction theta_col = base.theta_cols[j].resampled(grid);
        out.theta_cols.push_back(theta_col.multiplied_by(tw.h));
        out.powers[j] = base.powers[j] + ells[j];
    }
    certify_carrier(out.theta_cols, grid);
    return out;
}

FrameLoop twist_frame(const ThetaFrame& base, const std::vector<int>& ells, double eps) {
    return twist_theta_frame(base, ells, eps).frame_loop();
}

}  // namespace adisc
