#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adisc/boundary.hpp"
#include "adisc/linalg.hpp"

namespace adisc {

/// Known factorization G(zeta_k) = q[k] * diag(zeta_k^powers[j]) attached to
/// a loop by the operation that built it (index-raising twists). The q part
/// is certified holomorphic and invertible on the closed disc, which lets
/// the section solver work in the carrier basis where sections are honest
/// polynomials. Serialization drops this; only construction provides it.
struct FrameCarrier {
    std::vector<CMat> q;      // per sample
    std::vector<long> powers; // per column
};

/// Loop of maximally real frames: one invertible N x N complex matrix per
/// grid sample, columns a real basis of L(zeta_k). Construction verifies
/// invertibility (smallest singular value relative to the largest, per
/// sample, above `kFrameRankTol`).
class FrameLoop {
public:
    FrameLoop(BoundaryGrid grid, std::vector<CMat> matrices,
              std::optional<FrameCarrier> carrier = std::nullopt);

    const BoundaryGrid& grid() const { return grid_; }
    std::size_t dimension() const { return n_; }
    const CMat& matrix(std::size_t k) const { return mats_[k]; }
    const std::vector<CMat>& matrices() const { return mats_; }
    const std::optional<FrameCarrier>& carrier() const { return carrier_; }

    /// det G as a scalar boundary function.
    BoundaryFunction determinant() const;

    /// Loop with every sample multiplied by zeta^k.
    FrameLoop shifted(long k) const;
    /// Right-multiplied by a fixed matrix (real gauge when r is real).
    FrameLoop right_multiplied(const CMat& r) const;

    std::string to_json() const;
    static FrameLoop from_json(const std::string& text);

private:
    BoundaryGrid grid_;
    std::size_t n_;
    std::vector<CMat> mats_;
    std::optional<FrameCarrier> carrier_;
};

inline constexpr double kFrameRankTol = 1e-8;

/// Partial indices kappa_1 >= ... >= kappa_N plus their sum.
struct IndexProfile {
    std::vector<int> partial;
    int total = 0;
};

/// Structured frame data X_j(zeta) = zeta^{m_j} * Theta_j(zeta) with Theta
/// holomorphic and invertible: the distinguished basis used by the twist
/// and the nearby-disc machinery.
struct ThetaFrame {
    std::vector<BoundaryFunction> theta_cols;  // N columns, each C^N valued
    std::vector<long> powers;                  // m_j per column

    std::size_t dimension() const { return theta_cols.size(); }
    const BoundaryGrid& grid() const { return theta_cols.front().grid(); }

    CMat theta_matrix(std::size_t k) const;
    /// X_j(zeta_k) columns assembled into the frame matrix.
    CMat frame_matrix(std::size_t k) const;
    FrameLoop frame_loop() const;
    /// Theta(0) via the mean (c_0) of each holomorphic column.
    CMat theta_at_zero() const;
};

/// B(zeta_k) = G * conj(G)^{-1} per sample.
std::vector<CMat> b_loop(const FrameLoop& f);

/// Twice the winding number of det G.
int total_index(const FrameLoop& f);

/// Real dimension of the space of polynomial maps u(zeta) = sum_{0<=n<=degree}
/// c_n zeta^n with Im(G(zeta_k)^{-1} u(zeta_k)) = 0 at all samples, from a
/// rank-revealing factorization with relative singular-value cutoff 1e-8.
/// When the loop carries its structured factorization, u ranges over
/// carrier * (polynomials) instead, where the section space really lives.
/// Throws if the dimension has not stabilized between degree and degree+2.
std::size_t holomorphic_section_dim(const FrameLoop& f, std::size_t degree);

/// Partial indices recovered from the staircase of section dimensions of
/// the shifted loops zeta^{-k} G; consistency with total_index is enforced.
IndexProfile partial_indices(const FrameLoop& f);

}  // namespace adisc
