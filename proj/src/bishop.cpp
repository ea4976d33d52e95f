#include "adisc/bishop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "adisc/conjugation.hpp"
#include "json.hpp"

namespace adisc {

namespace {

constexpr double kHoloTol = 1e-10;

void validate_manifold(const GraphManifold& mf) {
    if (mf.m < 1 || mf.n < 1) throw std::invalid_argument("GraphManifold: need m >= 1, n >= 1");
    if (mf.m + mf.n < 2) throw std::invalid_argument("GraphManifold: ambient dimension >= 2");
    if (mf.h.size() != std::size_t(mf.n))
        throw std::invalid_argument("GraphManifold: one defining polynomial per codimension");
    const std::vector<double> origin(mf.num_vars(), 0.0);
    for (const auto& p : mf.h) {
        if (p.num_vars() != mf.num_vars())
            throw std::invalid_argument("GraphManifold: polynomial arity mismatch");
        if (p.total_degree() > 6)
            throw std::invalid_argument("GraphManifold: total degree must be <= 6");
        if (std::abs(p.eval(origin)) != 0.0)
            throw std::invalid_argument("GraphManifold: h(0) must vanish");
        for (std::size_t v = 0; v < mf.num_vars(); ++v)
            if (std::abs(p.partial(v).eval(origin)) != 0.0)
                throw std::invalid_argument("GraphManifold: dh(0) must vanish");
    }
}

// h(W(theta_k), Y(theta_k)) sampled over the grid, as a real n-vector function.
BoundaryFunction eval_h_on_grid(const GraphManifold& mf, const BoundaryFunction& w,
                                const BoundaryFunction& y) {
    const std::size_t grid_n = w.size();
    std::vector<std::vector<cplx>> comps(std::size_t(mf.n), std::vector<cplx>(grid_n));
    std::vector<double> point(mf.num_vars());
    for (std::size_t k = 0; k < grid_n; ++k) {
        for (int j = 0; j < mf.m; ++j) {
            point[std::size_t(j)] = w.value(std::size_t(j), k).real();
            point[std::size_t(mf.m + j)] = w.value(std::size_t(j), k).imag();
        }
        for (int j = 0; j < mf.n; ++j)
            point[std::size_t(2 * mf.m + j)] = y.value(std::size_t(j), k).real();
        for (int j = 0; j < mf.n; ++j)
            comps[std::size_t(j)][k] = cplx(mf.h[std::size_t(j)].eval(point), 0.0);
    }
    return BoundaryFunction::from_component_samples(std::move(comps), w.grid());
}

double sup_abs(const BoundaryFunction& f) {
    double m = 0.0;
    for (std::size_t j = 0; j < f.dimension(); ++j)
        for (std::size_t k = 0; k < f.size(); ++k)
            m = std::max(m, std::abs(f.value(j, k)));
    return m;
}

}  // namespace

GraphManifold::GraphManifold(int m_in, int n_in, std::vector<RealPolynomial> h_in)
    : m(m_in), n(n_in), h(std::move(h_in)) {
    validate_manifold(*this);
}

std::vector<double> GraphManifold::eval_h(const std::vector<cplx>& w,
                                          const std::vector<double>& y) const {
    if (w.size() != std::size_t(m) || y.size() != std::size_t(n))
        throw std::invalid_argument("GraphManifold::eval_h: arity mismatch");
    std::vector<double> point(num_vars(), 0.0);
    for (int j = 0; j < m; ++j) {
        point[std::size_t(j)] = w[std::size_t(j)].real();
        point[std::size_t(m + j)] = w[std::size_t(j)].imag();
    }
    for (int j = 0; j < n; ++j) point[std::size_t(2 * m + j)] = y[std::size_t(j)];
    std::vector<double> out(std::size_t(n), 0.0);
    for (int j = 0; j < n; ++j) out[std::size_t(j)] = h[std::size_t(j)].eval(point);
    return out;
}

GraphManifold GraphManifold::flat(int m, int n) {
    std::vector<RealPolynomial> h(std::size_t(n), RealPolynomial(std::size_t(2 * m + n)));
    return GraphManifold(m, n, std::move(h));
}

std::string GraphManifold::to_json() const {
    nlohmann::json j;
    j["m"] = m;
    j["n"] = n;
    auto term_list = [](const RealPolynomial& p) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& t : p.terms()) {
            nlohmann::json jt;
            jt["coeff"] = t.coeff;
            jt["powers"] = t.powers;
            terms.push_back(jt);
        }
        return terms;
    };
    if (n == 1) {
        j["terms"] = term_list(h[0]);
    } else {
        nlohmann::json nested = nlohmann::json::array();
        for (const auto& p : h) nested.push_back(term_list(p));
        j["terms"] = nested;
    }
    return j.dump();
}

GraphManifold GraphManifold::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const int m = j.at("m").get<int>();
    const int n = j.at("n").get<int>();
    const std::size_t vars = std::size_t(2 * m + n);
    auto parse_terms = [vars](const nlohmann::json& arr) {
        std::vector<PolyTerm> terms;
        for (const auto& jt : arr) {
            PolyTerm t;
            t.coeff = jt.at("coeff").get<double>();
            t.powers = jt.at("powers").get<std::vector<unsigned>>();
            if (t.powers.size() != vars)
                throw std::runtime_error("GraphManifold::from_json: powers arity mismatch");
            terms.push_back(std::move(t));
        }
        return RealPolynomial(vars, std::move(terms));
    };
    const auto& terms = j.at("terms");
    std::vector<RealPolynomial> h;
    const bool nested = !terms.empty() && terms.front().is_array();
    if (nested) {
        for (const auto& comp : terms) h.push_back(parse_terms(comp));
    } else {
        h.push_back(parse_terms(terms));
        for (int c = 1; c < n; ++c) h.push_back(RealPolynomial(vars));
        if (n != 1 && !terms.empty())
            throw std::runtime_error("GraphManifold::from_json: flat term list needs n == 1");
    }
    if (h.size() != std::size_t(n))
        throw std::runtime_error("GraphManifold::from_json: component count mismatch");
    return GraphManifold(m, n, std::move(h));
}

AnalyticDisc::AnalyticDisc(BoundaryFunction boundary_trace, double holo_tol)
    : boundary(std::move(boundary_trace)) {
    const double mass = max_negative_spectrum_mass(boundary);
    if (mass >= holo_tol)
        throw std::runtime_error("AnalyticDisc: negative spectral mass " + std::to_string(mass) +
                                 " exceeds holomorphy tolerance");
    center_value = boundary.mean();
}

std::vector<cplx> AnalyticDisc::at(cplx zeta) const {
    return holomorphic_extension(boundary, zeta);
}

BishopSolution solve_bishop(const GraphManifold& mf, const BoundaryFunction& w,
                            const std::vector<double>& y0, const BishopOptions& opts) {
    if (w.dimension() != std::size_t(mf.m))
        throw std::invalid_argument("solve_bishop: w must have m components");
    if (y0.size() != std::size_t(mf.n))
        throw std::invalid_argument("solve_bishop: y0 must have n components");
    if (opts.tol <= 0.0) throw std::invalid_argument("solve_bishop: tol must be positive");
    if (max_negative_spectrum_mass(w) >= kHoloTol)
        throw std::invalid_argument("solve_bishop: w is not numerically holomorphic");

    std::vector<cplx> y0c(y0.begin(), y0.end());
    const BoundaryFunction y0_fn =
        BoundaryFunction::constant(y0c, w.grid());

    BoundaryFunction y = opts.initial_y ? *opts.initial_y : y0_fn;
    if (opts.initial_y &&
        (!(opts.initial_y->grid() == w.grid()) || opts.initial_y->dimension() != std::size_t(mf.n)))
        throw std::invalid_argument("solve_bishop: initial iterate has wrong shape");

    std::vector<double> history;
    int iterations = 0;
    double residual = 0.0;
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        const BoundaryFunction rhs =
            conjugate(eval_h_on_grid(mf, w, y), ConjugationKind::AtOne) + y0_fn;
        residual = sup_abs(y - rhs);
        iterations = iter;
        if (residual < opts.tol) break;
        history.push_back(residual);
        const std::size_t h = history.size();
        if (h >= 11 && history[h - 1] > 0.9 * history[h - 11])
            throw std::runtime_error(
                "solve_bishop: iteration is not contracting (residual " +
                std::to_string(residual) + ")");
        if (iter == opts.max_iter)
            throw std::runtime_error("solve_bishop: max_iter exceeded (residual " +
                                     std::to_string(residual) + ")");
        y = rhs;
    }

    // Assemble the disc (W, h(W,Y) + iY) and verify holomorphy.
    const BoundaryFunction x = eval_h_on_grid(mf, w, y);
    std::vector<BoundaryFunction> parts;
    for (int j = 0; j < mf.m; ++j) parts.push_back(w.component(std::size_t(j)));
    for (int j = 0; j < mf.n; ++j)
        parts.push_back(x.component(std::size_t(j)) +
                        y.component(std::size_t(j)).scaled(cplx(0.0, 1.0)));
    BoundaryFunction trace = BoundaryFunction::join(parts);
    AnalyticDisc disc(std::move(trace), kHoloTol);

    return BishopSolution{std::move(disc), iterations, residual, w, y, y0};
}

BishopSolution reference_disc(const GraphManifold& mf, double rho0, const BoundaryGrid& grid,
                              const BishopOptions& opts) {
    if (rho0 <= 0.0) throw std::invalid_argument("reference_disc: rho0 must be positive");
    std::vector<std::vector<cplx>> comps(std::size_t(mf.m), std::vector<cplx>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k)
        comps[0][k] = rho0 - rho0 * grid.point(k);
    for (int j = 1; j < mf.m; ++j)
        std::fill(comps[std::size_t(j)].begin(), comps[std::size_t(j)].end(), cplx(0.0, 0.0));
    const BoundaryFunction w = BoundaryFunction::from_component_samples(std::move(comps), grid);
    BishopSolution sol = solve_bishop(mf, w, std::vector<double>(std::size_t(mf.n), 0.0), opts);

    if (std::abs(sol.w.value(0, 0)) > 1e-12)
        throw std::runtime_error("reference_disc: W_1(1) does not vanish");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (sol.w.value(0, k).real() <= 0.0)
            throw std::runtime_error("reference_disc: Re W_1 not positive away from zeta = 1");
    return sol;
}

BishopSolution perturbed_disc(const GraphManifold& mf, const BoundaryFunction& base_w,
                              const std::vector<double>& u_star, const std::vector<double>& y,
                              const std::vector<double>& y0, const BishopOptions& opts) {
    if (u_star.size() != std::size_t(2 * (mf.m - 1)))
        throw std::invalid_argument("perturbed_disc: u_star must have 2(m-1) entries");
    if (y.size() != std::size_t(mf.n) || y0.size() != std::size_t(mf.n))
        throw std::invalid_argument("perturbed_disc: y and y0 must have n entries");
    std::vector<cplx> shift(std::size_t(mf.m), cplx(0.0, 0.0));
    for (int j = 1; j < mf.m; ++j)
        shift[std::size_t(j)] = cplx(u_star[std::size_t(2 * (j - 1))],
                                     u_star[std::size_t(2 * (j - 1) + 1)]);
    const BoundaryFunction w =
        base_w + BoundaryFunction::constant(shift, base_w.grid());
    std::vector<double> rhs0(std::size_t(mf.n));
    for (int j = 0; j < mf.n; ++j) rhs0[std::size_t(j)] = y0[std::size_t(j)] + y[std::size_t(j)];
    return solve_bishop(mf, w, rhs0, opts);
}

FrameLoop build_r1_frame(const GraphManifold& mf, const BishopSolution& base,
                         const BishopOptions& opts) {
    const std::size_t n_amb = std::size_t(mf.m + mf.n);
    if (base.disc.dimension() != n_amb)
        throw std::invalid_argument("build_r1_frame: disc dimension mismatch");
    const BoundaryGrid grid = base.disc.boundary.grid();
    const std::size_t grid_n = grid.size();

    std::vector<BoundaryFunction> columns;
    columns.reserve(n_amb);
    columns.push_back(base.disc.boundary.derivative_theta());

    const double step = 1e-4;
    const std::size_t num_params = std::size_t(mf.m - 1 + mf.n);
    for (std::size_t p = 0; p < num_params; ++p) {
        auto solve_at = [&](double delta) {
            std::vector<double> u_star(std::size_t(2 * (mf.m - 1)), 0.0);
            std::vector<double> y(std::size_t(mf.n), 0.0);
            if (p < std::size_t(mf.m - 1)) {
                u_star[2 * p] = delta;  // real direction of u_{p+2}
            } else {
                y[p - std::size_t(mf.m - 1)] = delta;
            }
            return perturbed_disc(mf, base.w, u_star, y, base.y0, opts).disc.boundary;
        };
        auto central = [&](double delta) {
            return (solve_at(delta) - solve_at(-delta)).scaled(1.0 / (2.0 * delta));
        };
        const BoundaryFunction d1 = central(step);
        const BoundaryFunction d2 = central(step / 2.0);
        double disagreement = 0.0;
        for (std::size_t j = 0; j < n_amb; ++j)
            for (std::size_t k = 0; k < grid_n; ++k)
                disagreement = std::max(disagreement, std::abs(d1.value(j, k) - d2.value(j, k)));
        if (disagreement > 1e-6)
            throw std::runtime_error(
                "build_r1_frame: parameter derivative not converged (difference " +
                std::to_string(disagreement) + ")");
        columns.push_back(d2.scaled(4.0 / 3.0) - d1.scaled(1.0 / 3.0));
    }

    std::vector<CMat> mats(grid_n, CMat(n_amb, n_amb));
    for (std::size_t k = 0; k < grid_n; ++k)
        for (std::size_t j = 0; j < n_amb; ++j)
            for (std::size_t i = 0; i < n_amb; ++i) mats[k](i, j) = columns[j].value(i, k);
    return FrameLoop(grid, std::move(mats));
}

}  // namespace adisc
