#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "adisc/boundary.hpp"
#include "adisc/frames.hpp"
#include "adisc/linalg.hpp"

namespace adisc::testing {

/// Deterministic RNG independent of the standard library distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // xorshift64*
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dull;
    }

    double uniform(double lo = 0.0, double hi = 1.0) {
        const double u = double(next_u64() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    int uniform_int(int lo, int hi) {  // inclusive
        return lo + int(next_u64() % std::uint64_t(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

/// Random real band-limited scalar function: cosine/sine modes up to
/// `bandwidth` with coefficients in [-1, 1].
inline BoundaryFunction random_real_function(Rng& rng, const BoundaryGrid& grid,
                                             std::size_t bandwidth) {
    std::vector<double> a(bandwidth + 1), b(bandwidth + 1);
    for (std::size_t m = 0; m <= bandwidth; ++m) {
        a[m] = rng.uniform(-1.0, 1.0);
        b[m] = rng.uniform(-1.0, 1.0);
    }
    std::vector<cplx> vals(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double s = a[0];
        for (std::size_t m = 1; m <= bandwidth; ++m)
            s += a[m] * std::cos(double(m) * grid.angle(k)) +
                 b[m] * std::sin(double(m) * grid.angle(k));
        vals[k] = cplx(s, 0.0);
    }
    return BoundaryFunction::from_component_samples({std::move(vals)}, grid);
}

/// Random loop with known partial indices 2*k_j: G = F(zeta) diag(zeta^{k_j}) C
/// with F a small holomorphic matrix polynomial (invertible on the closed
/// disc by diagonal dominance) and C a fixed real invertible matrix.
inline FrameLoop random_loop_with_indices(Rng& rng, const BoundaryGrid& grid,
                                          const std::vector<int>& half_indices) {
    const std::size_t n = half_indices.size();
    // F(zeta) = I + sum_{d=1}^{3} A_d zeta^d, ||A_d|| small
    std::vector<CMat> a_coeffs;
    for (int d = 1; d <= 3; ++d) {
        CMat a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                a(i, j) = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) * (0.12 / double(d));
        a_coeffs.push_back(a);
    }
    CMat c(n, n);
    for (;;) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) c(i, j) = rng.uniform(-1.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) c(i, i) += 2.0;  // keep well conditioned
        if (smallest_singular_value(c) > 0.3) break;
    }
    std::vector<CMat> mats;
    mats.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const cplx z = grid.point(k);
        CMat f = CMat::identity(n);
        cplx zp = 1.0;
        for (const auto& a : a_coeffs) {
            zp *= z;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) f(i, j) += a(i, j) * zp;
        }
        CMat diag(n, n);
        for (std::size_t j = 0; j < n; ++j)
            diag(j, j) = std::polar(1.0, double(half_indices[j]) * grid.angle(k));
        mats.push_back(f * diag * c);
    }
    return FrameLoop(grid, std::move(mats));
}

}  // namespace adisc::testing
