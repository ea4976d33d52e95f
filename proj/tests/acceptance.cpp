// Acceptance suite: one criterion per invocation (or all), one PASS/FAIL
// line each, nonzero exit on any failure. Criteria pin the tolerances in
// code; timings are wall-clock and part of the criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "adisc/conjugation.hpp"
#include "adisc/globevnik.hpp"
#include "adisc/scenarios.hpp"
#include "adisc/twist.hpp"
#include "support.hpp"

using namespace adisc;
using testing::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

struct CriterionResult {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

double sup_abs(const BoundaryFunction& f) {
    double m = 0.0;
    for (std::size_t j = 0; j < f.dimension(); ++j)
        for (std::size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(f.value(j, k)));
    return m;
}

// ---------------------------------------------------------------------- 1
CriterionResult conjugation_identities() {
    CriterionResult r;
    Rng rng(1001);
    const BoundaryGrid grid(256);
    double worst_double = 0.0, worst_norm = 0.0, worst_holo = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const BoundaryFunction u = testing::random_real_function(rng, grid, 64);
        const BoundaryFunction tu = conjugate(u, ConjugationKind::AtCenter);
        const BoundaryFunction ttu = conjugate(tu, ConjugationKind::AtCenter);
        const cplx mean = u.mean()[0];
        for (std::size_t k = 0; k < grid.size(); ++k)
            worst_double = std::max(worst_double, std::abs(ttu.value(0, k) + u.value(0, k) - mean));
        worst_norm = std::max(worst_norm, std::abs(conjugate(u, ConjugationKind::AtOne).value(0, 0)));
        worst_norm = std::max(worst_norm, std::abs(tu.mean()[0]));
        for (auto kind : {ConjugationKind::AtCenter, ConjugationKind::AtOne}) {
            const BoundaryFunction analytic =
                u + conjugate(u, kind).scaled(cplx(0.0, 1.0));
            worst_holo = std::max(worst_holo, negative_spectrum_mass(analytic));
        }
    }
    r.require(worst_double < 1e-10, "double conjugation " + std::to_string(worst_double));
    r.require(worst_norm < 1e-10, "normalization " + std::to_string(worst_norm));
    r.require(worst_holo < 1e-10, "holomorphy of u + iTu " + std::to_string(worst_holo));
    return r;
}

// ---------------------------------------------------------------------- 2
CriterionResult bishop_closed_form() {
    CriterionResult r;
    const double rho0 = 0.1;
    const BoundaryGrid grid(256);
    const GraphManifold quadric = scenarios::quadric_beta(0.0);
    const BishopSolution sol = reference_disc(quadric, rho0, grid, {1e-12, 200, nullptr});
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        worst = std::max(worst, std::abs(sol.y.value(0, k).real() +
                                         2.0 * rho0 * rho0 * std::sin(grid.angle(k))));
    double attach = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::vector<cplx> wv{sol.w.value(0, k)};
        const std::vector<double> yv{sol.y.value(0, k).real()};
        attach = std::max(attach, std::abs(sol.disc.boundary.value(1, k).real() -
                                           quadric.eval_h(wv, yv)[0]));
    }
    r.require(worst < 1e-10, "pointwise Y error " + std::to_string(worst));
    r.require(attach < 1e-10, "attachment residual " + std::to_string(attach));
    return r;
}

// ---------------------------------------------------------------------- 3
CriterionResult r1_index_table() {
    CriterionResult r;
    for (auto [m, n] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}}) {
        const GraphManifold flat = GraphManifold::flat(m, n);
        const BishopSolution base = reference_disc(flat, 0.1, BoundaryGrid(256));
        const IndexProfile profile = partial_indices(build_r1_frame(flat, base));
        std::vector<int> expect(std::size_t(m + n), 0);
        expect[0] = 2;
        r.require(profile.partial == expect && profile.total == 2,
                  "(m,n)=(" + std::to_string(m) + "," + std::to_string(n) + ")");
    }
    return r;
}

// ---------------------------------------------------------------------- 4
CriterionResult twisted_index_law() {
    CriterionResult r;
    const double eps = 0.4;
    auto check_one = [&](std::size_t n, const std::vector<int>& ells) {
        const ThetaFrame base = scenarios::structured_base_theta(
            GraphManifold::flat(1, int(n) - 1), 0.1, BoundaryGrid(256));
        const FrameLoop twisted = twist_frame(base, ells, eps);
        std::vector<int> expect{2 + 2 * ells[0]};
        for (std::size_t j = 1; j < n; ++j) expect.push_back(2 * ells[j]);
        std::sort(expect.begin(), expect.end(), std::greater<int>());
        int expect_total = 0;
        for (int e : expect) expect_total += e;
        const IndexProfile profile = partial_indices(twisted);
        std::string label = "ells=(";
        for (int e : ells) label += std::to_string(e) + ",";
        label += ")";
        r.require(profile.partial == expect, label + " indices");
        r.require(total_index(twisted) == expect_total, label + " determinant total");
    };
    for (int l1 = 0; l1 <= 2; ++l1)
        for (int l2 = 0; l2 <= 2; ++l2) check_one(2, {l1, l2});
    Rng rng(44);
    for (int rep = 0; rep < 10; ++rep)
        check_one(3, {rng.uniform_int(0, 2), rng.uniform_int(0, 2), rng.uniform_int(0, 2)});
    return r;
}

// ---------------------------------------------------------------------- 5
CriterionResult twist_invariants() {
    CriterionResult r;
    const double eps = 0.4;
    for (int ell : {0, 1, 2, 3, 5}) {
        const BoundaryGrid grid(recommended_twist_grid(ell, eps));
        const TwistFunction tw = make_twist(ell, eps, grid);
        double min_h = 1e300, max_g = 0.0, main_im = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            min_h = std::min(min_h, std::abs(tw.h.value(0, k)));
            max_g = std::max(max_g, std::abs(tw.g.value(0, k)));
            double th = grid.angle(k);
            if (th > kPi) th -= 2.0 * kPi;
            if (std::abs(th) <= kPi - eps / 8.0)
                main_im = std::max(main_im, std::abs(tw.g.value(0, k).imag()));
        }
        const std::string label = "ell=" + std::to_string(ell);
        r.require(winding_number(tw.g, 0.5 * min_h) == ell, label + " winding");
        r.require(main_im < 1e-8, label + " Im g on the long arc");
        r.require(min_h > 0.0, label + " min |h|");
    }
    return r;
}

// ---------------------------------------------------------------------- 6
CriterionResult dimension_law() {
    CriterionResult r;
    const BoundaryGrid grid(64);
    for (std::size_t n : {2u, 3u}) {
        std::vector<int> k_j(n, 0);
        for (;;) {
            std::vector<CMat> mats;
            std::size_t expect = 0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                CMat m(n, n);
                for (std::size_t j = 0; j < n; ++j)
                    m(j, j) = std::polar(1.0, double(k_j[j]) * grid.angle(k));
                mats.push_back(std::move(m));
            }
            for (std::size_t j = 0; j < n; ++j) expect += std::size_t(2 * k_j[j] + 1);
            const FrameLoop loop(grid, std::move(mats));
            r.require(holomorphic_section_dim(loop, 8) == expect,
                      "diag loop dimension (N=" + std::to_string(n) + ")");
            std::size_t i = 0;
            for (; i < n; ++i) {
                if (++k_j[i] <= 2) break;
                k_j[i] = 0;
            }
            if (i == n) break;
        }
    }
    // twisted (4,...,4) frames have dimension 5N
    for (std::size_t n : {2u, 3u}) {
        std::vector<int> ells(n, 2);
        ells[0] = 1;
        const ThetaFrame base = scenarios::structured_base_theta(
            GraphManifold::flat(1, int(n) - 1), 0.1, BoundaryGrid(256));
        const FrameLoop twisted = twist_frame(base, ells, 0.4);
        r.require(holomorphic_section_dim(twisted, 8) == 5 * n,
                  "twisted frame dimension 5N (N=" + std::to_string(n) + ")");
    }
    return r;
}

// ---------------------------------------------------------------------- 7
CriterionResult implicit_solver() {
    CriterionResult r;
    const BoundaryGrid grid(256);
    const ThetaFrame theta =
        scenarios::structured_base_theta(GraphManifold::flat(1, 1), 0.1, grid);
    const FrameLoop loop = theta.frame_loop();
    const AttachmentTarget linear = AttachmentTarget::linear(loop);

    Rng rng(777);
    double worst_phi = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<BoundaryFunction> parts;
        for (std::size_t j = 0; j < 2; ++j)
            parts.push_back(testing::random_real_function(rng, grid, 6).scaled(0.01));
        const BoundaryFunction u = BoundaryFunction::join(parts);
        worst_phi = std::max(worst_phi, sup_abs(solve_phi(linear, u)));
    }
    r.require(worst_phi < 1e-12, "phi on linear targets " + std::to_string(worst_phi));

    // quadratic target: residual below tolerance and vanishing differential
    const std::size_t n = 2;
    std::vector<std::vector<RealPolynomial>> defining(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const CMat inv = CLu(loop.matrix(k)).inverse();
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<PolyTerm> terms;
            for (std::size_t l = 0; l < n; ++l) {
                PolyTerm tre{inv(j, l).imag(), std::vector<unsigned>(2 * n, 0)};
                tre.powers[l] = 1;
                if (tre.coeff != 0.0) terms.push_back(std::move(tre));
                PolyTerm tim{inv(j, l).real(), std::vector<unsigned>(2 * n, 0)};
                tim.powers[n + l] = 1;
                if (tim.coeff != 0.0) terms.push_back(std::move(tim));
            }
            PolyTerm q{0.5, std::vector<unsigned>(2 * n, 0)};
            q.powers[j] = 2;
            terms.push_back(std::move(q));
            PolyTerm q2{0.3, std::vector<unsigned>(2 * n, 0)};
            q2.powers[n + j] = 2;
            terms.push_back(std::move(q2));
            defining[k].push_back(RealPolynomial(2 * n, std::move(terms)));
        }
    }
    const AttachmentTarget quad(loop, std::move(defining), false);
    std::vector<BoundaryFunction> parts;
    for (std::size_t j = 0; j < 2; ++j)
        parts.push_back(testing::random_real_function(rng, grid, 5));
    const BoundaryFunction u0 = BoundaryFunction::join(parts);

    const BoundaryFunction f = solve_phi(quad, u0.scaled(0.01), {1e-10, 80});
    const std::vector<BoundaryFunction> x_cols = [&] {
        std::vector<BoundaryFunction> cols;
        for (std::size_t j = 0; j < n; ++j)
            cols.push_back(theta.theta_cols[j].multiplied_by_power(theta.powers[j]));
        return cols;
    }();
    const BoundaryFunction g = variation_field(x_cols, u0.scaled(0.01), f);
    double resid = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const std::vector<cplx> p{g.value(0, k), g.value(1, k)};
        for (double v : quad.eval(k, p)) resid = std::max(resid, std::abs(v));
    }
    r.require(resid < 1e-10, "quadratic residual " + std::to_string(resid));

    double worst_dphi = 0.0;
    for (double delta : {1e-3, 1e-4}) {
        const BoundaryFunction fp = solve_phi(quad, u0.scaled(delta), {1e-12, 80});
        const BoundaryFunction fm = solve_phi(quad, u0.scaled(-delta), {1e-12, 80});
        worst_dphi = std::max(worst_dphi, sup_abs((fp - fm).scaled(1.0 / (2.0 * delta))));
    }
    r.require(worst_dphi < 1e-5, "||D phi(0)|| " + std::to_string(worst_dphi));
    return r;
}

// ---------------------------------------------------------------------- 8
CriterionResult fixed_center() {
    CriterionResult r;
    scenarios::Step4Config cfg{scenarios::quadric_beta(0.5), 0.1, {}, 0.8, 1e-11};
    const scenarios::Step4Setup setup = scenarios::build_step4(cfg);
    const double radius = 0.01;
    const std::size_t per_axis = 5;
    double worst = 0.0;
    std::vector<std::size_t> idx(4, 0);
    for (;;) {
        std::vector<double> t(4);
        double norm2 = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            t[i] = -radius + 2.0 * radius * double(idx[i]) / double(per_axis - 1);
            norm2 += t[i] * t[i];
        }
        const double nrm = std::sqrt(norm2);
        if (nrm > radius)
            for (double& x : t) x *= radius / nrm;
        worst = std::max(worst, setup.family(t).center_offset);
        std::size_t i = 0;
        for (; i < 4; ++i) {
            if (++idx[i] < per_axis) break;
            idx[i] = 0;
        }
        if (i == 4) break;
    }
    r.require(worst < 1e-9, "max |A'_t(0) - q| = " + std::to_string(worst));
    return r;
}

// ---------------------------------------------------------------------- 9
CriterionResult leading_order_ratios() {
    CriterionResult r;
    scenarios::Step4Config cfg{scenarios::quadric_beta(0.5), 0.1, {}, 0.8, 1e-11};
    const scenarios::Step4Setup setup = scenarios::build_step4(cfg);
    std::vector<double> angles;
    for (int i = 0; i < 8; ++i) angles.push_back(2.0 * kPi * i / 8.0);
    const DerivativeReport report =
        derivative_check(setup.family, setup.twisted_theta, 0.1, angles);
    for (const auto& e : report.entries) {
        r.require(e.err_rho > 1e-9, e.label + " above noise");
        r.require(e.ratio >= 3.0 && e.ratio <= 5.0,
                  e.label + " ratio " + std::to_string(e.ratio));
    }
    return r;
}

// --------------------------------------------------------------------- 10
CriterionResult foliation() {
    CriterionResult r;
    for (int n_codim : {1, 2}) {  // N = 2 and N = 3 over flat manifolds
        scenarios::Step4Config cfg{scenarios::flat_manifold(1, n_codim), 0.1, {}, 0.4, 1e-11};
        const scenarios::Step4Setup setup = scenarios::build_step4(cfg);
        const auto slice = step4_slice_basis(setup.twisted_theta, *setup.base_disc);
        const FoliationReport report = foliation_rank(setup.family, slice, 0.05, 16);
        r.require(report.pass, "N=" + std::to_string(1 + n_codim) + " min sv " +
                                   std::to_string(report.min_singular_value));
    }
    return r;
}

// --------------------------------------------------------------------- 11
CriterionResult index_invariances() {
    CriterionResult r;
    Rng rng(2024);
    const BoundaryGrid grid(256);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 2 + std::size_t(rep % 2);
        std::vector<int> half(n);
        for (auto& h : half) h = rng.uniform_int(0, 2);
        const FrameLoop loop = testing::random_loop_with_indices(rng, grid, half);
        const IndexProfile base = partial_indices(loop);

        CMat gauge(n, n);
        for (;;) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) gauge(i, j) = rng.uniform(-1.0, 1.0);
            for (std::size_t i = 0; i < n; ++i) gauge(i, i) += 1.5;
            if (smallest_singular_value(gauge) > 0.2) break;
        }
        r.require(partial_indices(loop.right_multiplied(gauge)).partial == base.partial,
                  "gauge rep " + std::to_string(rep));

        CMat perm(n, n);
        for (std::size_t j = 0; j < n; ++j) perm((j + 1) % n, j) = 1.0;
        r.require(partial_indices(loop.right_multiplied(perm)).partial == base.partial,
                  "permutation rep " + std::to_string(rep));

        const long shift = rng.uniform_int(-1, 2);
        std::vector<int> expect = base.partial;
        for (int& x : expect) x += int(2 * shift);
        r.require(partial_indices(loop.shifted(shift)).partial == expect,
                  "shift rep " + std::to_string(rep));
    }
    return r;
}

// --------------------------------------------------------------------- 12
CriterionResult cli_determinism() {
    CriterionResult r;
    namespace fs = std::filesystem;
    const fs::path tmp =
        fs::temp_directory_path() / ("adisc_accept_" + std::to_string(std::rand()));
    fs::create_directories(tmp);
    {
        std::ofstream cfg(tmp / "cfg.json");
        cfg << R"({"manifold": {"preset": "flat", "m": 1, "n": 1}, "rho0": 0.1})";
    }
    auto run = [&](const std::string& out) {
        const std::string cmd = std::string(ADISC_CLI_PATH) + " full-pipeline " +
                                (tmp / "cfg.json").string() + " --out " + (tmp / out).string() +
                                " > /dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    const int code_a = run("a");
    const int code_b = run("b");
    r.require(code_a == 0 && code_b == 0,
              "exit codes " + std::to_string(code_a) + "," + std::to_string(code_b));
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(tmp / "a" / "results.json");
    const std::string b = slurp(tmp / "b" / "results.json");
    r.require(!a.empty() && a == b, "results.json byte-identical");
    fs::remove_all(tmp);
    return r;
}

struct Criterion {
    int number;
    const char* description;
    double time_limit_s;
    std::function<CriterionResult()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list{
        {1, "conjugation identities on 100 random band-limited functions", 1.0,
         conjugation_identities},
        {2, "Bishop solver matches the quadric closed form", 1.0, bishop_closed_form},
        {3, "flat-manifold R1 partial indices are (2,0,...,0)", 10.0, r1_index_table},
        {4, "twisted-frame index law (2+2l1, 2l2, ..., 2lN)", 60.0, twisted_index_law},
        {5, "twist invariants: winding, realness, nonvanishing", 5.0, twist_invariants},
        {6, "section dimension law kappa + N", 30.0, dimension_law},
        {7, "implicit solver: phi = 0 on linear targets, D phi(0) = 0", 30.0, implicit_solver},
        {8, "fixed center of the step4 family over a parameter ball", 60.0, fixed_center},
        {9, "leading-order O(rho^2) ratios in [3, 5]", 30.0, leading_order_ratios},
        {10, "foliation rank 2N on flat linear targets, N = 2, 3", 30.0, foliation},
        {11, "gauge/permutation/shift invariance of partial indices", 60.0, index_invariances},
        {12, "CLI full-pipeline determinism", 120.0, cli_determinism},
    };
    return list;
}

int run_criterion(const Criterion& c) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    try {
        result = c.run();
    } catch (const std::exception& e) {
        result.pass = false;
        result.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = elapsed < c.time_limit_s;
    const bool pass = result.pass && in_time;
    std::printf("%s criterion %2d: %s (%.2fs%s)%s%s\n", pass ? "PASS" : "FAIL", c.number,
                c.description, elapsed, in_time ? "" : " OVER LIMIT",
                result.detail.empty() ? "" : " -- ", result.detail.c_str());
    std::fflush(stdout);
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) {
        const int want = std::atoi(argv[1]);
        for (const Criterion& c : criteria())
            if (c.number == want) return run_criterion(c);
        std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
        return 2;
    }
    int failures = 0;
    for (const Criterion& c : criteria()) failures += run_criterion(c);
    return failures == 0 ? 0 : 1;
}
