#include <algorithm>
#include <cmath>
#include <numbers>

#include "adisc/conjugation.hpp"
#include "adisc/twist.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace adisc;

namespace {
constexpr double kPi = std::numbers::pi;

// Structured flat base of dimension n: Theta = diag(-i*rho0, i, ..., i),
// powers (1, 0, ..., 0) -- the frame of the flat-manifold R1 written in
// Theta*sqrt(Lambda) form.
ThetaFrame flat_theta(std::size_t n, const BoundaryGrid& grid, double rho0 = 0.1) {
    ThetaFrame theta;
    theta.powers.assign(n, 0);
    theta.powers[0] = 1;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::vector<cplx>> col(n, std::vector<cplx>(grid.size(), cplx(0.0, 0.0)));
        const cplx v = (j == 0) ? cplx(0.0, -rho0) : cplx(0.0, 1.0);
        for (std::size_t k = 0; k < grid.size(); ++k) col[j][k] = v;
        theta.theta_cols.push_back(BoundaryFunction::from_component_samples(col, grid));
    }
    return theta;
}

}  // namespace

TEST_CASE("make_twist: ell = 0 gives the constant 1") {
    const TwistFunction tw = make_twist(0, 0.4, BoundaryGrid(256));
    for (std::size_t k = 0; k < tw.g.size(); ++k)
        CHECK(std::abs(tw.g.value(0, k) - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("make_twist: ell = 1 invariants") {
    const BoundaryGrid grid(recommended_twist_grid(1, 0.4));
    const TwistFunction tw = make_twist(1, 0.4, grid);
    CHECK(winding_number(tw.g, 1e-10) == 1);
    double max_im = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double th = grid.angle(k);
        if (th > kPi) th -= 2.0 * kPi;
        if (std::abs(th) <= kPi - 0.4 / 8.0)
            max_im = std::max(max_im, std::abs(tw.g.value(0, k).imag()));
    }
    CHECK(max_im < 1e-8);
}

TEST_CASE("make_twist: ell = 3 against direct evaluation at 4x resolution") {
    const double eps = 0.4;
    const BoundaryGrid grid(recommended_twist_grid(3, eps));
    const TwistFunction tw = make_twist(3, eps, grid);
    double min_h = 1e300;
    for (std::size_t k = 0; k < grid.size(); ++k)
        min_h = std::min(min_h, std::abs(tw.h.value(0, k)));
    CHECK(min_h > 0.0);
    CHECK(winding_number(tw.g, 1e-12) == 3);

    const BoundaryGrid fine(grid.size() * 4);
    const TwistFunction fine_tw = make_twist(3, eps, fine);
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        worst = std::max(worst, std::abs(tw.g.value(0, k) - fine_tw.g.value(0, 4 * k)));
        scale = std::max(scale, std::abs(tw.g.value(0, k)));
    }
    CHECK(worst < 1e-6 * scale);
}

TEST_CASE("make_twist guards") {
    CHECK_THROWS(make_twist(-1, 0.4, BoundaryGrid(256)));
    CHECK_THROWS(make_twist(3, 0.01, BoundaryGrid(256)));  // grid below 64*ell/eps
}

TEST_CASE("winding additivity of twists") {
    const double eps = 0.5;
    const BoundaryGrid grid(recommended_twist_grid(3, eps));
    const TwistFunction a = make_twist(1, eps, grid);
    const TwistFunction b = make_twist(2, eps, grid);
    const BoundaryFunction prod = a.g.multiplied_by(b.g);
    double max_abs = 0.0, min_abs = 1e300;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        max_abs = std::max(max_abs, std::abs(prod.value(0, k)));
        min_abs = std::min(min_abs, std::abs(prod.value(0, k)));
    }
    CHECK(winding_number(prod, 0.5 * min_abs) == 3);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double th = grid.angle(k);
        if (th > kPi) th -= 2.0 * kPi;
        if (std::abs(th) <= kPi - eps / 8.0)
            CHECK(std::abs(prod.value(0, k).imag()) < 1e-7 * max_abs);
    }
}

TEST_CASE("twist_frame: zero twists leave the frame unchanged") {
    const BoundaryGrid grid(256);
    const ThetaFrame base = flat_theta(2, grid);
    const FrameLoop twisted = twist_frame(base, {0, 0}, 0.4);
    const FrameLoop plain = base.frame_loop();
    REQUIRE(twisted.grid().size() >= plain.grid().size());
    const std::size_t stride = twisted.grid().size() / plain.grid().size();
    for (std::size_t k = 0; k < plain.grid().size(); ++k)
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                CHECK(std::abs(twisted.matrix(stride * k)(i, j) - plain.matrix(k)(i, j)) < 1e-12);
}

TEST_CASE("index-raising law over small ell sweeps") {
    const double eps = 0.4;
    for (std::size_t n : {2u, 3u}) {
        for (int l1 = 0; l1 <= 3; ++l1)
            for (int l2 = 0; l2 <= 3; ++l2)
                for (int l3 = 0; l3 <= (n == 3 ? 3 : 0); ++l3) {
                    std::vector<int> ells{l1, l2};
                    if (n == 3) ells.push_back(l3);
                    const ThetaFrame base = flat_theta(n, BoundaryGrid(256));
                    const FrameLoop twisted = twist_frame(base, ells, eps);
                    REQUIRE(twisted.carrier().has_value());

                    std::vector<int> expect{2 + 2 * l1};
                    for (std::size_t j = 1; j < n; ++j) expect.push_back(2 * ells[j]);
                    std::sort(expect.begin(), expect.end(), std::greater<int>());

                    const IndexProfile p = partial_indices(twisted);
                    CHECK(p.partial == expect);

                    int expect_total = 0;
                    for (int e : expect) expect_total += e;
                    CHECK(total_index(twisted) == expect_total);
                }
    }
}

TEST_CASE("glue_tangent_family") {
    // R = {y = phi(x)} in C^2 with quadratic phi.
    const std::size_t n = 2;
    std::vector<PolyTerm> p1{{0.7, {2, 0}}, {-0.3, {1, 1}}};
    std::vector<PolyTerm> p2{{0.4, {0, 2}}};
    std::vector<RealPolynomial> phi{RealPolynomial(n, p1), RealPolynomial(n, p2)};
    // curve x(s) = (s, s - 0.5 s^2)
    std::vector<PolyTerm> g1{{1.0, {1}}};
    std::vector<PolyTerm> g2{{1.0, {1}}, {-0.5, {2}}};
    std::vector<RealPolynomial> gamma{RealPolynomial(1, g1), RealPolynomial(1, g2)};
    const double eps = 0.8;

    SUBCASE("flat phi: r independent of s") {
        std::vector<RealPolynomial> flat{RealPolynomial(n), RealPolynomial(n)};
        const GluedFamily fam = glue_tangent_family(flat, gamma, eps);
        const std::vector<RealPolynomial> base = fam.base_defining();
        for (double s : {-0.3, 0.0, 0.2, 0.5}) {
            const std::vector<RealPolynomial> r = fam.defining_at(s);
            for (std::size_t j = 0; j < n; ++j)
                CHECK(r[j].max_coeff_difference(base[j]) < 1e-12);
        }
    }

    const GluedFamily fam = glue_tangent_family(phi, gamma, eps);

    SUBCASE("outer zone reproduces y - phi(x) exactly (coefficients)") {
        const std::vector<RealPolynomial> base = fam.base_defining();
        for (double s : {0.5 * eps, -0.7 * eps, eps}) {
            const std::vector<RealPolynomial> r = fam.defining_at(s);
            for (std::size_t j = 0; j < n; ++j)
                CHECK(r[j].max_coeff_difference(base[j]) < 1e-12);
        }
    }
    SUBCASE("curve stays in the zero set") {
        for (double s = -0.99 * eps; s < eps; s += 0.13 * eps) {
            const std::vector<RealPolynomial> r = fam.defining_at(s);
            const std::vector<double> on_curve = fam.gamma(s);
            for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(r[j].eval(on_curve)) < 1e-10);
        }
    }
    SUBCASE("plane zone equals the tangent plane, explicit-gradient oracle") {
        for (double s : {0.0, 0.1 * eps, -0.2 * eps}) {
            const std::vector<RealPolynomial> r = fam.defining_at(s);
            // normal probe must NOT vanish
            std::vector<double> off = fam.gamma(s);
            off[n] += 0.05;  // move along y_1
            CHECK(std::abs(r[0].eval(off)) > 1e-3);
            // tangent probes vanish: explicit gradient evaluation
            const double sv[1] = {s};
            std::vector<double> xs(n);
            for (std::size_t j = 0; j < n; ++j) xs[j] = gamma[j].eval(sv);
            for (std::size_t dir = 0; dir < n; ++dir) {
                std::vector<double> probe = fam.gamma(s);
                probe[dir] += 0.2;
                for (std::size_t j = 0; j < n; ++j)
                    probe[n + j] += 0.2 * phi[j].partial(dir).eval(xs);
                for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(r[j].eval(probe)) < 1e-10);
            }
        }
    }
    SUBCASE("invalid phi rejected") {
        std::vector<PolyTerm> bad{{1.0, {1, 0}}};  // dphi(0) != 0
        std::vector<RealPolynomial> badphi{RealPolynomial(n, bad), RealPolynomial(n)};
        CHECK_THROWS(glue_tangent_family(badphi, gamma, eps));
    }
}
