#include <cmath>
#include <numbers>

#include "adisc/bishop.hpp"
#include "adisc/conjugation.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace adisc;
using testing::Rng;

namespace {

// m = 1, n = 1, h(w, y) = |w|^2 (+ beta (Re w)^2 + eta y^2): variables are
// (Re w, Im w, y).
GraphManifold quadric(double beta = 0.0, double eta = 0.0) {
    std::vector<PolyTerm> terms;
    terms.push_back({1.0 + beta, {2, 0, 0}});
    terms.push_back({1.0, {0, 2, 0}});
    if (eta != 0.0) terms.push_back({eta, {0, 0, 2}});
    return GraphManifold(1, 1, {RealPolynomial(3, std::move(terms))});
}

BoundaryFunction reference_w(double rho0, const BoundaryGrid& grid, int m) {
    std::vector<std::vector<cplx>> comps(std::size_t(m),
                                         std::vector<cplx>(grid.size(), cplx(0.0, 0.0)));
    for (std::size_t k = 0; k < grid.size(); ++k) comps[0][k] = rho0 - rho0 * grid.point(k);
    return BoundaryFunction::from_component_samples(std::move(comps), grid);
}

double sup_diff(const BoundaryFunction& f, std::size_t comp, auto&& expected) {
    double worst = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        worst = std::max(worst, std::abs(f.value(comp, k) - expected(f.grid().angle(k))));
    return worst;
}

}  // namespace

TEST_CASE("GraphManifold validation") {
    CHECK_THROWS(GraphManifold(1, 1, {RealPolynomial::constant(3, 1.0)}));  // h(0) != 0
    CHECK_THROWS(GraphManifold(1, 1, {RealPolynomial::variable(3, 0)}));    // dh(0) != 0
    std::vector<PolyTerm> high{{1.0, {7, 0, 0}}};
    CHECK_THROWS(GraphManifold(1, 1, {RealPolynomial(3, high)}));  // degree > 6
    CHECK_NOTHROW(quadric());
}

TEST_CASE("GraphManifold json round trip") {
    const GraphManifold q = quadric(0.5);
    const GraphManifold q2 = GraphManifold::from_json(q.to_json());
    CHECK(q2.m == 1);
    CHECK(q2.n == 1);
    CHECK(q2.h[0].max_coeff_difference(q.h[0]) == 0.0);

    // n = 2 uses nested term lists
    std::vector<PolyTerm> t1{{1.0, {2, 0, 0, 0}}};
    std::vector<PolyTerm> t2{{0.5, {0, 2, 0, 0}}};
    const GraphManifold two(1, 2, {RealPolynomial(4, t1), RealPolynomial(4, t2)});
    const GraphManifold two2 = GraphManifold::from_json(two.to_json());
    CHECK(two2.h[0].max_coeff_difference(two.h[0]) == 0.0);
    CHECK(two2.h[1].max_coeff_difference(two.h[1]) == 0.0);
}

TEST_CASE("flat manifold: one iteration, exact") {
    const GraphManifold flat = GraphManifold::flat(2, 2);
    const BoundaryGrid grid(64);
    const BoundaryFunction w = reference_w(0.1, grid, 2);
    const BishopSolution sol = solve_bishop(flat, w, {0.25, -0.5});
    CHECK(sol.iterations == 1);
    CHECK(sol.residual == doctest::Approx(0.0));
    CHECK(sup_diff(sol.y, 0, [](double) { return cplx(0.25, 0.0); }) < 1e-15);
    CHECK(sup_diff(sol.y, 1, [](double) { return cplx(-0.5, 0.0); }) < 1e-15);
    // disc z-components are i*y0 exactly
    CHECK(sup_diff(sol.disc.boundary, 2, [](double) { return cplx(0.0, 0.25); }) < 1e-15);
}

TEST_CASE("quadric closed form: Y = -2 rho0^2 sin theta") {
    const double rho0 = 0.1;
    const BoundaryGrid grid(256);
    const BishopSolution sol = reference_disc(quadric(), rho0, grid);
    CHECK(sup_diff(sol.y, 0, [&](double th) {
              return cplx(-2.0 * rho0 * rho0 * std::sin(th), 0.0);
          }) < 1e-12);
    CHECK(sol.residual < 1e-12);
    // z-component: x + iy with x = rho0^2 (2 - 2 cos theta)
    CHECK(sup_diff(sol.disc.boundary, 1, [&](double th) {
              return cplx(rho0 * rho0 * (2.0 - 2.0 * std::cos(th)),
                          -2.0 * rho0 * rho0 * std::sin(th));
          }) < 1e-12);
}

TEST_CASE("quadric with y-coupling against damped fixed-point oracle at 4x grid") {
    const double rho0 = 0.1;
    const GraphManifold mf = quadric(0.0, 0.1);
    const BoundaryGrid grid(256);
    const BishopSolution sol = reference_disc(mf, rho0, grid);
    CHECK(sol.residual < 1e-11);

    // independent oracle: damped iteration y <- y + 0.5 (T1[h] + y0 - y) on
    // a 1024 grid
    const BoundaryGrid fine(1024);
    const BoundaryFunction w = reference_w(rho0, fine, 1);
    BoundaryFunction y = BoundaryFunction::zero(1, fine);
    for (int it = 0; it < 400; ++it) {
        std::vector<cplx> h_vals(fine.size());
        for (std::size_t k = 0; k < fine.size(); ++k) {
            const double re = w.value(0, k).real(), im = w.value(0, k).imag();
            const double yy = y.value(0, k).real();
            h_vals[k] = cplx(re * re + im * im + 0.1 * yy * yy, 0.0);
        }
        const BoundaryFunction t1h = conjugate(
            BoundaryFunction::from_component_samples({h_vals}, fine), ConjugationKind::AtOne);
        y = y + (t1h - y).scaled(0.5);
    }
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(std::abs(sol.y.value(0, k) - y.value(0, 4 * k)) < 1e-8);
}

TEST_CASE("solver determinism and uniqueness of the fixed point") {
    const GraphManifold mf = quadric(0.3, 0.2);
    const BoundaryGrid grid(128);
    const BoundaryFunction w = reference_w(0.08, grid, 1);
    const BishopSolution a = solve_bishop(mf, w, {0.01});
    const BishopSolution b = solve_bishop(mf, w, {0.01});
    CHECK(a.iterations == b.iterations);
    CHECK(a.residual == b.residual);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(a.y.value(0, k) == b.y.value(0, k));

    // perturbed initial iterate converges to the same solution
    std::vector<cplx> pert(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        pert[k] = cplx(0.01 + 0.002 * std::cos(grid.angle(k)), 0.0);
    BishopOptions opts;
    const BoundaryFunction init = BoundaryFunction::from_component_samples({pert}, grid);
    opts.initial_y = &init;
    const BishopSolution c = solve_bishop(mf, w, {0.01}, opts);
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(std::abs(c.y.value(0, k) - a.y.value(0, k)) < 10.0 * 1e-11);
}

TEST_CASE("attachment invariant |X - h(W,Y)| small") {
    const GraphManifold mf = quadric(0.4, 0.15);
    const BoundaryGrid grid(128);
    const BishopSolution sol = reference_disc(mf, 0.09, grid);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::vector<cplx> wv{sol.w.value(0, k)};
        const std::vector<double> yv{sol.y.value(0, k).real()};
        const double x = sol.disc.boundary.value(1, k).real();
        worst = std::max(worst, std::abs(x - mf.eval_h(wv, yv)[0]));
    }
    CHECK(worst < 10.0 * 1e-11);
}

TEST_CASE("non-contraction is detected for large data") {
    const GraphManifold mf = quadric(0.0, 40.0);
    const BoundaryGrid grid(64);
    const BoundaryFunction w = reference_w(0.5, grid, 1);
    CHECK_THROWS(solve_bishop(mf, w, {0.9}));
}

TEST_CASE("reference disc boundary geometry") {
    const BoundaryGrid grid(128);
    const BishopSolution sol = reference_disc(GraphManifold::flat(1, 2), 0.1, grid);
    CHECK(std::abs(sol.w.value(0, 0)) < 1e-12);
    for (std::size_t k = 1; k < grid.size(); ++k) CHECK(sol.w.value(0, k).real() > 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(std::abs(sol.disc.boundary.value(0, k) - (0.1 - 0.1 * grid.point(k))) < 1e-13);
}

TEST_CASE("perturbed disc") {
    const BoundaryGrid grid(64);
    SUBCASE("zero shifts reproduce the base bitwise") {
        const GraphManifold mf = quadric(0.2);
        const BoundaryFunction w = reference_w(0.1, grid, 1);
        const BishopSolution base = solve_bishop(mf, w, {0.0});
        const BishopSolution same = perturbed_disc(mf, w, {}, {0.0}, {0.0});
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < grid.size(); ++k)
                CHECK(base.disc.boundary.value(j, k) == same.disc.boundary.value(j, k));
    }
    SUBCASE("flat manifold gives the affine family exactly") {
        const GraphManifold flat = GraphManifold::flat(2, 1);
        const BoundaryFunction w = reference_w(0.1, grid, 2);
        const BishopSolution sol = perturbed_disc(flat, w, {0.03, -0.02}, {0.05}, {0.1});
        CHECK(sup_diff(sol.disc.boundary, 1, [](double) { return cplx(0.03, -0.02); }) < 1e-14);
        CHECK(sup_diff(sol.disc.boundary, 2, [](double) { return cplx(0.0, 0.15); }) < 1e-14);
    }
    SUBCASE("quadric m=2 shift against 4x resolution solve") {
        std::vector<PolyTerm> terms{{1.0, {2, 0, 0, 0, 0}}, {1.0, {0, 0, 2, 0, 0}}};
        const GraphManifold mf(2, 1, {RealPolynomial(5, terms)});  // |w_1|^2
        const BoundaryFunction w = reference_w(0.1, grid, 2);
        const BishopSolution coarse = perturbed_disc(mf, w, {0.01, 0.0}, {0.0}, {0.0});
        const BishopSolution fine =
            perturbed_disc(mf, reference_w(0.1, BoundaryGrid(256), 2), {0.01, 0.0}, {0.0}, {0.0});
        for (std::size_t k = 0; k < grid.size(); ++k)
            CHECK(std::abs(coarse.y.value(0, k) - fine.y.value(0, 4 * k)) < 1e-8);
    }
}

TEST_CASE("R1 frame for the flat manifold is computable by hand") {
    const GraphManifold flat = GraphManifold::flat(2, 2);
    const BoundaryGrid grid(64);
    const BishopSolution base = reference_disc(flat, 0.1, grid);
    const FrameLoop frame = build_r1_frame(flat, base);
    REQUIRE(frame.dimension() == 4);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const CMat& g = frame.matrix(k);
        const cplx z = grid.point(k);
        CHECK(std::abs(g(0, 0) - cplx(0.0, -0.1) * z) < 1e-10);  // d/dtheta of -0.1 e^{i theta}
        CHECK(std::abs(g(1, 1) - cplx(1.0, 0.0)) < 1e-9);        // u_2 direction
        CHECK(std::abs(g(2, 2) - cplx(0.0, 1.0)) < 1e-9);        // i e_j in the y directions
        CHECK(std::abs(g(3, 3) - cplx(0.0, 1.0)) < 1e-9);
        CHECK(std::abs(g(0, 1)) + std::abs(g(0, 2)) + std::abs(g(2, 3)) < 1e-9);
    }
}

TEST_CASE("quadric R1 frame: det nonvanishing, total index 2") {
    const BoundaryGrid grid(256);
    const BishopSolution base = reference_disc(quadric(), 0.1, grid);
    const FrameLoop frame = build_r1_frame(quadric(), base);
    CHECK(total_index(frame) == 2);
}
