#include "adisc/globevnik.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "adisc/conjugation.hpp"

namespace adisc {

namespace {

std::vector<double> realify_point(const std::vector<cplx>& p) {
    std::vector<double> x(2 * p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        x[i] = p[i].real();
        x[p.size() + i] = p[i].imag();
    }
    return x;
}

double norm2(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    return std::sqrt(s);
}

double norm2r(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

AttachmentTarget::AttachmentTarget(FrameLoop frame,
                                   std::vector<std::vector<RealPolynomial>> defining,
                                   bool linear_flag)
    : frame_(std::move(frame)), defining_(std::move(defining)), linear_(linear_flag) {
    n_ = frame_.dimension();
    const std::size_t grid_n = frame_.grid().size();
    if (defining_.size() != grid_n)
        throw std::invalid_argument("AttachmentTarget: one defining set per sample");
    const std::vector<double> origin(2 * n_, 0.0);
    partials_.resize(grid_n);
    for (std::size_t k = 0; k < grid_n; ++k) {
        if (defining_[k].size() != n_)
            throw std::invalid_argument("AttachmentTarget: N defining functions per sample");
        partials_[k].resize(n_);
        CMat wirtinger(n_, n_);
        for (std::size_t j = 0; j < n_; ++j) {
            RealPolynomial& r = defining_[k][j];
            if (r.num_vars() != 2 * n_)
                throw std::invalid_argument("AttachmentTarget: polynomial arity must be 2N");
            if (std::abs(r.eval(origin)) > 1e-10)
                throw std::runtime_error("AttachmentTarget: r(zeta, 0) != 0 at sample " +
                                         std::to_string(k));
            // Unit gradient at p = 0.
            double g2 = 0.0;
            for (std::size_t v = 0; v < 2 * n_; ++v) {
                const double d = r.partial(v).eval(origin);
                g2 += d * d;
            }
            if (g2 <= 0.0)
                throw std::runtime_error("AttachmentTarget: vanishing differential at sample " +
                                         std::to_string(k));
            r = r.scaled(1.0 / std::sqrt(g2));
            partials_[k][j].reserve(2 * n_);
            for (std::size_t v = 0; v < 2 * n_; ++v) partials_[k][j].push_back(r.partial(v));
            for (std::size_t l = 0; l < n_; ++l) {
                const double dre = partials_[k][j][l].eval(origin);
                const double dim = partials_[k][j][n_ + l].eval(origin);
                wirtinger(j, l) = 0.5 * cplx(dre, -dim);
            }
        }
        const std::vector<double> sv = singular_values(realify(wirtinger));
        if (sv.front() == 0.0 || sv.back() <= 1e-8 * sv.front())
            throw std::runtime_error(
                "AttachmentTarget: zero set not maximally real at sample " + std::to_string(k));
    }
}

AttachmentTarget AttachmentTarget::linear(const FrameLoop& frame) {
    const std::size_t n = frame.dimension();
    const std::size_t grid_n = frame.grid().size();
    std::vector<std::vector<RealPolynomial>> defining(grid_n);
    for (std::size_t k = 0; k < grid_n; ++k) {
        const CMat m = CLu(frame.matrix(k)).inverse();
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<PolyTerm> terms;
            for (std::size_t l = 0; l < n; ++l) {
                PolyTerm t_re;
                t_re.coeff = m(j, l).imag();
                t_re.powers.assign(2 * n, 0);
                t_re.powers[l] = 1;
                if (t_re.coeff != 0.0) terms.push_back(t_re);
                PolyTerm t_im;
                t_im.coeff = m(j, l).real();
                t_im.powers.assign(2 * n, 0);
                t_im.powers[n + l] = 1;
                if (t_im.coeff != 0.0) terms.push_back(t_im);
            }
            defining[k].push_back(RealPolynomial(2 * n, std::move(terms)));
        }
    }
    return AttachmentTarget(frame, std::move(defining), true);
}

std::vector<double> AttachmentTarget::eval(std::size_t k, const std::vector<cplx>& p) const {
    const std::vector<double> x = realify_point(p);
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = defining_[k][j].eval(x);
    return out;
}

double AttachmentTarget::directional_derivative(std::size_t k, std::size_t j,
                                                const std::vector<cplx>& p,
                                                const std::vector<cplx>& q) const {
    const std::vector<double> x = realify_point(p);
    double s = 0.0;
    for (std::size_t l = 0; l < n_; ++l) {
        s += partials_[k][j][l].eval(x) * q[l].real();
        s += partials_[k][j][n_ + l].eval(x) * q[l].imag();
    }
    return s;
}

std::size_t param_space_dim(const IndexProfile& profile) {
    std::size_t dim = 0;
    for (int k : profile.partial) {
        if (k < 0)
            throw std::invalid_argument("param_space_dim: negative partial index " +
                                        std::to_string(k) +
                                        " (the kappa_j >= -1 extension is not implemented)");
        dim += std::size_t(k) + 1;
    }
    return dim;
}

DiscParameters::DiscParameters(std::vector<int> kappa_in, std::vector<double> t_in,
                               std::vector<bool> mask_in)
    : kappa(std::move(kappa_in)), t(std::move(t_in)), mask(std::move(mask_in)) {
    std::size_t expect = 0;
    for (int k : kappa) {
        if (k < 0 || k % 2 != 0)
            throw std::invalid_argument("DiscParameters: kappa_j must be even and nonnegative");
        expect += std::size_t(k) + 1;
    }
    if (t.size() != expect)
        throw std::invalid_argument("DiscParameters: need sum(kappa_j + 1) parameters");
    if (mask.empty()) mask.assign(t.size(), false);
    if (mask.size() != t.size())
        throw std::invalid_argument("DiscParameters: mask length mismatch");
    for (std::size_t i = 0; i < t.size(); ++i)
        if (mask[i] && t[i] != 0.0)
            throw std::invalid_argument("DiscParameters: masked entries must be exactly zero");
}

std::size_t DiscParameters::offset(std::size_t j) const {
    std::size_t off = 0;
    for (std::size_t i = 0; i < j; ++i) off += std::size_t(kappa[i]) + 1;
    return off;
}

std::size_t DiscParameters::free_count() const {
    std::size_t c = 0;
    for (bool m : mask)
        if (!m) ++c;
    return c;
}

DiscParameters DiscParameters::step4(std::size_t n_components, const std::vector<double>& t34) {
    if (t34.size() != 2 * n_components)
        throw std::invalid_argument("DiscParameters::step4: need 2N values");
    std::vector<int> kappa(n_components, 4);
    std::vector<double> t(5 * n_components, 0.0);
    std::vector<bool> mask(5 * n_components, false);
    for (std::size_t j = 0; j < n_components; ++j) {
        mask[5 * j + 0] = mask[5 * j + 1] = mask[5 * j + 4] = true;  // t1 = t2 = t5 = 0
        t[5 * j + 2] = t34[2 * j];
        t[5 * j + 3] = t34[2 * j + 1];
    }
    return DiscParameters(std::move(kappa), std::move(t), std::move(mask));
}

BoundaryFunction poly_h(const DiscParameters& params, std::size_t j, const BoundaryGrid& grid) {
    if (j >= params.kappa.size()) throw std::invalid_argument("poly_h: component out of range");
    const int kj = params.kappa[j];
    const int mj = kj / 2;
    const std::size_t off = params.offset(j);
    if (grid.size() < std::size_t(2 * kj + 2))
        throw std::invalid_argument("poly_h: grid does not resolve the polynomial");
    const long half = long(grid.size()) / 2;
    std::vector<cplx> coeffs(grid.size(), cplx(0.0, 0.0));
    auto slot = [half](long freq) { return std::size_t(freq + half); };
    for (int r = 0; r < mj; ++r) {
        const cplx c(params.t[off + std::size_t(2 * r)], params.t[off + std::size_t(2 * r) + 1]);
        coeffs[slot(r)] += c;
        coeffs[slot(kj - r)] += std::conj(c);
    }
    coeffs[slot(mj)] += params.t[off + std::size_t(kj)];
    return BoundaryFunction::from_coefficients({coeffs}, grid);
}

BoundaryFunction u_from_params(const DiscParameters& params, const std::vector<long>& m_powers,
                               const BoundaryGrid& grid) {
    const std::size_t n = params.kappa.size();
    if (m_powers.size() != n) throw std::invalid_argument("u_from_params: power count mismatch");
    std::vector<BoundaryFunction> parts;
    for (std::size_t j = 0; j < n; ++j) {
        if (params.kappa[j] != 2 * int(m_powers[j]))
            throw std::invalid_argument("u_from_params: kappa_j must equal 2 m_j");
        BoundaryFunction uj = poly_h(params, j, grid).multiplied_by_power(-m_powers[j]);
        if (!uj.real_valued(1e-10))
            throw std::runtime_error("u_from_params: u_j is not real (palindromic layout broken)");
        // store exactly real
        std::vector<cplx> vals(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) vals[k] = cplx(uj.value(0, k).real(), 0.0);
        parts.push_back(BoundaryFunction::from_component_samples({std::move(vals)}, grid));
    }
    return BoundaryFunction::join(parts);
}

BoundaryFunction variation_field(const std::vector<BoundaryFunction>& x_cols,
                                 const BoundaryFunction& u, const BoundaryFunction& f) {
    const std::size_t n = x_cols.size();
    const BoundaryGrid grid = u.grid();
    const std::size_t grid_n = grid.size();
    const std::size_t dim = x_cols.front().dimension();

    // T0 f per component through one FFT round trip (spectral multiplier
    // -i sign(n), zero constant and Nyquist), then the pointwise assembly
    // sum_j (u_j + i f_j - T0 f_j) X_j in a single pass.
    std::vector<std::vector<double>> t0f(n, std::vector<double>(grid_n));
    std::vector<cplx> work(grid_n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < grid_n; ++k) work[k] = f.value(j, k);
        fft_forward(work);
        const std::size_t half = grid_n / 2;
        work[0] = 0.0;
        work[half] = 0.0;
        for (std::size_t s = 1; s < half; ++s) {
            work[s] *= cplx(0.0, -1.0);
            work[grid_n - s] *= cplx(0.0, 1.0);
        }
        fft_inverse(work);
        for (std::size_t k = 0; k < grid_n; ++k) t0f[j][k] = work[k].real();
    }

    std::vector<std::vector<cplx>> total(dim, std::vector<cplx>(grid_n, cplx(0.0, 0.0)));
    for (std::size_t j = 0; j < n; ++j) {
        const std::vector<cplx>& fj = f.component_values(j);
        const std::vector<cplx>& uj = u.component_values(j);
        for (std::size_t k = 0; k < grid_n; ++k) {
            const cplx s(uj[k].real() - t0f[j][k], fj[k].real());
            for (std::size_t i = 0; i < dim; ++i) total[i][k] += s * x_cols[j].value(i, k);
        }
    }
    return BoundaryFunction::from_component_samples(std::move(total), grid);
}

BoundaryFunction solve_phi_in_frame(const AttachmentTarget& target,
                                    const std::vector<BoundaryFunction>& x_cols,
                                    const BoundaryFunction& u, const PhiOptions& opts) {
    const std::size_t n = target.dimension();
    const std::size_t grid_n = target.grid().size();
    if (x_cols.size() != n)
        throw std::invalid_argument("solve_phi: frame must have N columns");
    if (u.dimension() != n || !(u.grid() == target.grid()))
        throw std::invalid_argument("solve_phi: u must be a real N-vector on the target grid");
    if (!u.real_valued(1e-10)) throw std::invalid_argument("solve_phi: u must be real-valued");

    // Cached frame samples.
    std::vector<std::vector<std::vector<cplx>>> x(n);  // [j][k] -> C^N
    for (std::size_t j = 0; j < n; ++j) {
        x[j].resize(grid_n);
        for (std::size_t k = 0; k < grid_n; ++k) {
            x[j][k].resize(n);
            for (std::size_t i = 0; i < n; ++i) x[j][k][i] = x_cols[j].value(i, k);
        }
    }

    auto assemble = [&](const std::vector<std::vector<double>>& f) {
        std::vector<std::vector<cplx>> fvals(n, std::vector<cplx>(grid_n));
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < grid_n; ++k) fvals[j][k] = cplx(f[j][k], 0.0);
        const BoundaryFunction f_fn =
            BoundaryFunction::from_component_samples(std::move(fvals), target.grid());
        return variation_field(x_cols, u, f_fn);
    };

    std::vector<std::vector<double>> f(n, std::vector<double>(grid_n, 0.0));

    auto residual_of = [&](const BoundaryFunction& g, std::vector<std::vector<double>>& r_out) {
        double sup = 0.0;
        std::vector<cplx> p(n);
        for (std::size_t k = 0; k < grid_n; ++k) {
            for (std::size_t i = 0; i < n; ++i) p[i] = g.value(i, k);
            const std::vector<double> r = target.eval(k, p);
            for (std::size_t j = 0; j < n; ++j) {
                r_out[j][k] = r[j];
                sup = std::max(sup, std::abs(r[j]));
            }
        }
        return sup;
    };

    std::vector<std::vector<double>> res(n, std::vector<double>(grid_n, 0.0));
    double sup = residual_of(assemble(f), res);
    if (sup < opts.tol) {
        std::vector<std::vector<cplx>> zero(n, std::vector<cplx>(grid_n, cplx(0.0, 0.0)));
        return BoundaryFunction::from_component_samples(std::move(zero), target.grid());
    }
    const double sup0 = sup;

    // Frozen Jacobian at (u, f = 0): local pairing of dr with i X_j.
    std::vector<CLu> jac;
    jac.reserve(grid_n);
    {
        std::vector<cplx> p0(n);
        for (std::size_t k = 0; k < grid_n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                p0[i] = cplx(0.0, 0.0);
                for (std::size_t j = 0; j < n; ++j) p0[i] += u.value(j, k) * x[j][k][i];
            }
            CMat jk(n, n);
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t jp = 0; jp < n; ++jp) {
                    std::vector<cplx> q(n);
                    for (std::size_t i = 0; i < n; ++i) q[i] = cplx(0.0, 1.0) * x[jp][k][i];
                    jk(j, jp) = target.directional_derivative(k, j, p0, q);
                }
            try {
                jac.emplace_back(jk);
            } catch (const std::runtime_error&) {
                throw std::runtime_error("solve_phi: linearization singular at sample " +
                                         std::to_string(k));
            }
        }
    }

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        // Newton direction per sample against the frozen Jacobian.
        std::vector<std::vector<double>> delta(n, std::vector<double>(grid_n));
        std::vector<cplx> rhs(n);
        for (std::size_t k = 0; k < grid_n; ++k) {
            for (std::size_t j = 0; j < n; ++j) rhs[j] = cplx(res[j][k], 0.0);
            const std::vector<cplx> d = jac[k].solve(rhs);
            for (std::size_t j = 0; j < n; ++j) delta[j][k] = d[j].real();
        }
        double step = 1.0;
        for (int halving = 0;; ++halving) {
            std::vector<std::vector<double>> f_new = f;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < grid_n; ++k) f_new[j][k] -= step * delta[j][k];
            std::vector<std::vector<double>> res_new(n, std::vector<double>(grid_n));
            const double sup_new = residual_of(assemble(f_new), res_new);
            if (sup_new < sup || halving >= 4) {
                f = std::move(f_new);
                res = std::move(res_new);
                sup = sup_new;
                break;
            }
            step *= 0.5;
        }
        if (sup < opts.tol) {
            std::vector<std::vector<cplx>> out(n, std::vector<cplx>(grid_n));
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < grid_n; ++k) out[j][k] = cplx(f[j][k], 0.0);
            return BoundaryFunction::from_component_samples(std::move(out), target.grid());
        }
        if (sup > 10.0 * sup0 + 1.0)
            throw std::runtime_error("solve_phi: iteration diverged (residual " +
                                     std::to_string(sup) + ")");
    }
    throw std::runtime_error("solve_phi: no convergence within iteration budget (residual " +
                             std::to_string(sup) + ")");
}

BoundaryFunction solve_phi(const AttachmentTarget& target, const BoundaryFunction& u,
                           const PhiOptions& opts) {
    const std::size_t n = target.dimension();
    std::vector<BoundaryFunction> x_cols;
    std::vector<std::vector<cplx>> col(n, std::vector<cplx>(target.grid().size()));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < target.grid().size(); ++k) {
            const CMat& g = target.frame().matrix(k);
            for (std::size_t i = 0; i < n; ++i) col[i][k] = g(i, j);
        }
        x_cols.push_back(BoundaryFunction::from_component_samples(col, target.grid()));
    }
    return solve_phi_in_frame(target, x_cols, u, opts);
}

NearbyDisc nearby_disc(const AttachmentTarget& target, const AnalyticDisc& base,
                       const ThetaFrame& theta, const DiscParameters& params,
                       const PhiOptions& opts) {
    const std::size_t n = target.dimension();
    if (theta.dimension() != n)
        throw std::invalid_argument("nearby_disc: theta frame dimension mismatch");
    if (!(theta.grid() == target.grid()))
        throw std::invalid_argument("nearby_disc: theta frame and target must share the grid");
    for (std::size_t j = 0; j < n; ++j)
        if (params.kappa[j] != 2 * int(theta.powers[j]))
            throw std::invalid_argument("nearby_disc: parameter layout does not match Y powers");

    const BoundaryGrid grid = target.grid();
    const AnalyticDisc base_r = (base.boundary.grid() == grid)
                                    ? base
                                    : AnalyticDisc(base.boundary.resampled(grid));

    std::vector<BoundaryFunction> x_cols;
    for (std::size_t j = 0; j < n; ++j)
        x_cols.push_back(theta.theta_cols[j].multiplied_by_power(theta.powers[j]));

    // Consistency of the distinguished frame with the target at p = 0.
    const std::vector<double> origin_r(2 * n, 0.0);
    for (std::size_t k = 0; k < grid.size(); k += std::max<std::size_t>(1, grid.size() / 64)) {
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<cplx> xj(n);
            for (std::size_t i = 0; i < n; ++i) xj[i] = x_cols[j].value(i, k);
            const std::vector<cplx> zero(n, cplx(0.0, 0.0));
            double pair = 0.0;
            for (std::size_t jr = 0; jr < n; ++jr)
                pair = std::max(pair, std::abs(target.directional_derivative(k, jr, zero, xj)));
            if (pair > 1e-7 * (1.0 + norm2(xj)))
                throw std::invalid_argument(
                    "nearby_disc: theta frame is not tangent to the target at p = 0");
        }
    }

    const BoundaryFunction u = u_from_params(params, theta.powers, grid);
    const BoundaryFunction f = solve_phi_in_frame(target, x_cols, u, opts);
    const BoundaryFunction variation = variation_field(x_cols, u, f);

    double residual = 0.0;
    {
        std::vector<cplx> p(n);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            for (std::size_t i = 0; i < n; ++i) p[i] = variation.value(i, k);
            for (double r : target.eval(k, p)) residual = std::max(residual, std::abs(r));
        }
    }
    if (residual > opts.tol * (1.0 + 1e-9))
        throw std::runtime_error("nearby_disc: attachment residual " + std::to_string(residual) +
                                 " above tolerance");

    AnalyticDisc disc(base_r.boundary + variation, 1e-9);
    double center_offset = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        center_offset += std::norm(disc.center_value[i] - base_r.center_value[i]);
    center_offset = std::sqrt(center_offset);

    bool all_positive = true;
    for (long p : theta.powers)
        if (p < 1) all_positive = false;
    if (all_positive && center_offset > 1e-9)
        throw std::runtime_error("nearby_disc: fixed-center violation (offset " +
                                 std::to_string(center_offset) + ")");

    return NearbyDisc{std::move(disc), params, u, f, residual, center_offset};
}

DerivativeReport derivative_check(const DiscFamily& family, const ThetaFrame& theta,
                                  double rho, const std::vector<double>& theta_samples) {
    const std::size_t n = theta.dimension();
    const CMat theta0 = theta.theta_at_zero();
    const CLu theta0_lu(theta0);

    const std::vector<double> t0(2 * n, 0.0);
    const NearbyDisc base = family(t0);
    std::vector<cplx> c1(n);
    for (std::size_t i = 0; i < n; ++i) c1[i] = base.disc.boundary.coeff(i, 1);
    const std::vector<cplx> a = theta0_lu.solve(c1);

    const double delta = 1e-4;
    DerivativeReport report;
    report.a = a;

    auto eval_disc = [&](const NearbyDisc& d, double radius, double ang) {
        return holomorphic_extension(d.disc.boundary, std::polar(radius, ang), 1e-7);
    };

    auto rms_err = [&](const std::function<std::vector<cplx>(double, double)>& fd,
                       const std::function<std::vector<cplx>(double, double)>& model,
                       double radius) {
        double acc = 0.0;
        for (double ang : theta_samples) {
            const std::vector<cplx> d = fd(radius, ang);
            const std::vector<cplx> m = model(radius, ang);
            double e2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) e2 += std::norm(d[i] - m[i]);
            acc += e2;
        }
        return std::sqrt(acc / double(theta_samples.size()));
    };

    for (std::size_t dir = 0; dir < 2 * n; ++dir) {
        std::vector<double> tp = t0, tm = t0;
        tp[dir] += delta;
        tm[dir] -= delta;
        const NearbyDisc dp = family(tp);
        const NearbyDisc dm = family(tm);
        const std::size_t j = dir / 2;
        const bool re_dir = (dir % 2 == 0);

        auto fd = [&](double radius, double ang) {
            const std::vector<cplx> vp = eval_disc(dp, radius, ang);
            const std::vector<cplx> vm = eval_disc(dm, radius, ang);
            std::vector<cplx> out(n);
            for (std::size_t i = 0; i < n; ++i) out[i] = (vp[i] - vm[i]) / (2.0 * delta);
            return out;
        };
        auto model = [&](double radius, double ang) {
            std::vector<cplx> e(n, cplx(0.0, 0.0));
            e[j] = re_dir ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
            std::vector<cplx> v = theta0.apply(e);
            const cplx z = std::polar(radius, ang);
            for (cplx& x : v) x *= z;
            return v;
        };
        // Full analytic derivative of the u-part: Theta(zeta) d/dt h_j(zeta)
        // with d/dt3 h = zeta + zeta^{kappa-1}-pairing evaluated inside.
        const long mj = theta.powers[j];
        auto model_full = [&](double radius, double ang) {
            const cplx z = std::polar(radius, ang);
            const cplx tq = re_dir ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
            cplx dh(0.0, 0.0);
            if (mj >= 1) {
                dh = tq * std::pow(z, double(mj - 1)) +
                     std::conj(tq) * std::pow(z, double(mj + 1));
            }
            std::vector<cplx> v(n);
            const std::vector<cplx> th = holomorphic_extension(theta.theta_cols[j], z, 1e-7);
            for (std::size_t i = 0; i < n; ++i) v[i] = th[i] * dh;
            return v;
        };

        DerivativeEntry entry;
        entry.label = std::string(re_dir ? "t3_" : "t4_") + std::to_string(j + 1);
        entry.err_rho = rms_err(fd, model, rho);
        entry.err_half = rms_err(fd, model, rho / 2.0);
        entry.ratio = entry.err_half > 1e-14 ? entry.err_rho / entry.err_half : 0.0;
        entry.err_model = rms_err(fd, model_full, rho);
        report.entries.push_back(entry);
    }

    // theta derivative of the base disc against rho e^{i theta} Theta(0) (i a).
    {
        const double dth = 1e-4;
        auto fd = [&](double radius, double ang) {
            const std::vector<cplx> vp = eval_disc(base, radius, ang + dth);
            const std::vector<cplx> vm = eval_disc(base, radius, ang - dth);
            std::vector<cplx> out(n);
            for (std::size_t i = 0; i < n; ++i) out[i] = (vp[i] - vm[i]) / (2.0 * dth);
            return out;
        };
        auto model = [&](double radius, double ang) {
            std::vector<cplx> ia(n);
            for (std::size_t i = 0; i < n; ++i) ia[i] = cplx(0.0, 1.0) * a[i];
            std::vector<cplx> v = theta0.apply(ia);
            const cplx z = std::polar(radius, ang);
            for (cplx& x : v) x *= z;
            return v;
        };
        // Analytic theta derivative from the Taylor coefficients of the base.
        auto model_full = [&](double radius, double ang) {
            std::vector<cplx> out(n, cplx(0.0, 0.0));
            const long half = long(base.disc.boundary.size()) / 2;
            for (std::size_t i = 0; i < n; ++i) {
                double rp = 1.0;
                for (long m = 0; m < half; ++m) {
                    out[i] += base.disc.boundary.coeff(i, m) * cplx(0.0, double(m)) * rp *
                              std::polar(1.0, double(m) * ang);
                    rp *= radius;
                }
            }
            return out;
        };
        DerivativeEntry entry;
        entry.label = "theta";
        entry.err_rho = rms_err(fd, model, rho);
        entry.err_half = rms_err(fd, model, rho / 2.0);
        entry.ratio = entry.err_half > 1e-14 ? entry.err_rho / entry.err_half : 0.0;
        entry.err_model = rms_err(fd, model_full, rho);
        report.entries.push_back(entry);
    }
    return report;
}

FoliationReport foliation_rank(const DiscFamily& family,
                               const std::vector<std::vector<double>>& slice_basis,
                               double rho_eps, std::size_t num_angles) {
    if (slice_basis.empty()) throw std::invalid_argument("foliation_rank: empty slice");
    const std::size_t dim_t = slice_basis.front().size();
    const std::size_t n = dim_t / 2;
    if (slice_basis.size() != 2 * n - 1)
        throw std::invalid_argument("foliation_rank: slice must have 2N-1 directions");

    const std::vector<double> t0(dim_t, 0.0);
    const NearbyDisc base = family(t0);
    const double delta = 1e-4;

    // One solve per slice direction; every angle reuses it.
    std::vector<NearbyDisc> plus, minus;
    for (const auto& b : slice_basis) {
        std::vector<double> tp = t0, tm = t0;
        for (std::size_t i = 0; i < dim_t; ++i) {
            tp[i] += delta * b[i];
            tm[i] -= delta * b[i];
        }
        plus.push_back(family(tp));
        minus.push_back(family(tm));
    }

    FoliationReport report;
    report.threshold = 1e-6 * rho_eps;
    report.min_singular_value = 1e300;
    const double dth = 1e-4;
    for (std::size_t ai = 0; ai < num_angles; ++ai) {
        const double ang = 2.0 * std::numbers::pi * double(ai) / double(num_angles);
        RMat jac(2 * n, 2 * n);
        // theta column
        {
            const std::vector<cplx> vp =
                holomorphic_extension(base.disc.boundary, std::polar(rho_eps, ang + dth), 1e-7);
            const std::vector<cplx> vm =
                holomorphic_extension(base.disc.boundary, std::polar(rho_eps, ang - dth), 1e-7);
            for (std::size_t i = 0; i < n; ++i) {
                const cplx d = (vp[i] - vm[i]) / (2.0 * dth);
                jac(i, 0) = d.real();
                jac(i + n, 0) = d.imag();
            }
        }
        for (std::size_t c = 0; c < slice_basis.size(); ++c) {
            const std::vector<cplx> vp =
                holomorphic_extension(plus[c].disc.boundary, std::polar(rho_eps, ang), 1e-7);
            const std::vector<cplx> vm =
                holomorphic_extension(minus[c].disc.boundary, std::polar(rho_eps, ang), 1e-7);
            for (std::size_t i = 0; i < n; ++i) {
                const cplx d = (vp[i] - vm[i]) / (2.0 * delta);
                jac(i, c + 1) = d.real();
                jac(i + n, c + 1) = d.imag();
            }
        }
        const double sv = smallest_singular_value(jac);
        report.per_angle_min_sv.push_back(sv);
        report.min_singular_value = std::min(report.min_singular_value, sv);
    }
    report.pass = report.min_singular_value > report.threshold;
    return report;
}

namespace {

// Orthonormal basis of the orthogonal complement of w in R^{2N}.
std::vector<std::vector<double>> orthocomplement(const std::vector<double>& w) {
    const std::size_t d = w.size();
    std::vector<std::vector<double>> basis;
    std::vector<std::vector<double>> ortho;
    const double wn = norm2r(w);
    if (wn == 0.0) throw std::invalid_argument("orthocomplement: zero vector");
    std::vector<double> w0 = w;
    for (double& x : w0) x /= wn;
    ortho.push_back(w0);
    for (std::size_t i = 0; i < d && basis.size() < d - 1; ++i) {
        std::vector<double> v(d, 0.0);
        v[i] = 1.0;
        for (const auto& o : ortho) {
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) dot += o[j] * v[j];
            for (std::size_t j = 0; j < d; ++j) v[j] -= dot * o[j];
        }
        const double nv = norm2r(v);
        if (nv < 1e-8) continue;
        for (double& x : v) x /= nv;
        ortho.push_back(v);
        basis.push_back(v);
    }
    return basis;
}

std::vector<cplx> leading_direction(const ThetaFrame& theta, const AnalyticDisc& base) {
    const std::size_t n = theta.dimension();
    const CMat theta0 = theta.theta_at_zero();
    std::vector<cplx> c1(n);
    for (std::size_t i = 0; i < n; ++i) c1[i] = base.boundary.coeff(i, 1);
    const std::vector<cplx> a = CLu(theta0).solve(c1);
    std::vector<cplx> ia(n);
    for (std::size_t i = 0; i < n; ++i) ia[i] = cplx(0.0, 1.0) * a[i];
    return theta0.apply(ia);  // = i c1
}

std::vector<double> pull_back(const ThetaFrame& theta, const std::vector<double>& h_real) {
    const std::size_t n = theta.dimension();
    std::vector<cplx> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = cplx(h_real[i], h_real[n + i]);
    const std::vector<cplx> v = CLu(theta.theta_at_zero()).solve(h);
    std::vector<double> t(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        t[2 * j] = v[j].real();
        t[2 * j + 1] = v[j].imag();
    }
    return t;
}

}  // namespace

std::vector<std::vector<double>> step4_slice_basis(const ThetaFrame& theta,
                                                   const AnalyticDisc& base) {
    const std::size_t n = theta.dimension();
    const std::vector<cplx> w = leading_direction(theta, base);
    std::vector<double> wr(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        wr[i] = w[i].real();
        wr[n + i] = w[i].imag();
    }
    std::vector<std::vector<double>> out;
    for (const auto& h : orthocomplement(wr)) out.push_back(pull_back(theta, h));
    return out;
}

std::vector<std::vector<double>> degenerate_slice_basis(const ThetaFrame& theta,
                                                        const AnalyticDisc& base) {
    const std::size_t n = theta.dimension();
    const std::vector<cplx> w = leading_direction(theta, base);
    std::vector<double> wr(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        wr[i] = w[i].real();
        wr[n + i] = w[i].imag();
    }
    std::vector<std::vector<double>> out;
    out.push_back(pull_back(theta, wr));  // forces collinearity with the theta column
    const std::vector<std::vector<double>> h = orthocomplement(wr);
    for (std::size_t i = 0; i + 1 < h.size(); ++i) out.push_back(pull_back(theta, h[i]));
    return out;
}

RankReport rank_report(const std::function<AnalyticDisc(const std::vector<double>&)>& family,
                       const GraphManifold& mf, std::size_t v_dim) {
    const std::size_t n = std::size_t(mf.n);
    const std::size_t m = std::size_t(mf.m);

    // Quotient T_0 M / T_0^c M realized as the z-imaginary directions: with
    // dh(0) = 0 the complex tangent is exactly the w-plane and the
    // orthogonal complement inside T_0 M is (0, i R^n).
    auto project = [&](const std::vector<cplx>& v) {
        std::vector<double> out(n);
        for (std::size_t j = 0; j < n; ++j) out[j] = v[m + j].imag();
        return out;
    };

    const std::vector<double> v0(v_dim, 0.0);
    const AnalyticDisc base = family(v0);
    const std::vector<cplx> dbase = [&] {
        const BoundaryFunction d = base.boundary.derivative_theta();
        std::vector<cplx> v(base.dimension());
        for (std::size_t i = 0; i < base.dimension(); ++i) v[i] = d.value(i, 0);
        return v;
    }();
    const std::vector<double> b = project(dbase);

    const double delta = 1e-4;
    RMat jac(n, v_dim == 0 ? 1 : v_dim);
    for (std::size_t c = 0; c < v_dim; ++c) {
        std::vector<double> vp = v0, vm = v0;
        vp[c] += delta;
        vm[c] -= delta;
        const BoundaryFunction dp = family(vp).boundary.derivative_theta();
        const BoundaryFunction dm = family(vm).boundary.derivative_theta();
        std::vector<cplx> dv(base.dimension());
        for (std::size_t i = 0; i < base.dimension(); ++i)
            dv[i] = (dp.value(i, 0) - dm.value(i, 0)) / (2.0 * delta);
        const std::vector<double> col = project(dv);
        for (std::size_t i = 0; i < n; ++i) jac(i, c) = col[i];
    }

    RankReport report;
    report.base_direction = b;
    report.singular_values = singular_values(jac);
    report.rank = 0;
    if (!report.singular_values.empty() && report.singular_values.front() > 0.0) {
        const double cutoff = 1e-8 * report.singular_values.front();
        for (double s : report.singular_values)
            if (s > cutoff) ++report.rank;
    }

    // Principal angle between the sweep image and the base direction.
    const double bn = norm2r(b);
    if (bn < 1e-14 || report.rank == 0) {
        report.transversality_angle = (bn < 1e-14) ? 0.0 : std::numbers::pi / 2.0;
        return report;
    }
    // Gram-Schmidt of the Jacobian columns, then project b.
    std::vector<std::vector<double>> q;
    for (std::size_t c = 0; c < v_dim; ++c) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = jac(i, c);
        for (const auto& o : q) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += o[i] * v[i];
            for (std::size_t i = 0; i < n; ++i) v[i] -= dot * o[i];
        }
        const double nv = norm2r(v);
        if (nv > 1e-12 * report.singular_values.front()) {
            for (double& x : v) x /= nv;
            q.push_back(v);
        }
    }
    std::vector<double> residual = b;
    for (const auto& o : q) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += o[i] * residual[i];
        for (std::size_t i = 0; i < n; ++i) residual[i] -= dot * o[i];
    }
    report.transversality_angle = std::asin(std::min(1.0, norm2r(residual) / bn));
    return report;
}

}  // namespace adisc
