#include "adisc/frames.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>

#include "adisc/conjugation.hpp"
#include "json.hpp"

namespace adisc {

namespace {

constexpr double kSectionRankTol = 1e-8;

}  // namespace

FrameLoop::FrameLoop(BoundaryGrid grid, std::vector<CMat> matrices,
                     std::optional<FrameCarrier> carrier)
    : grid_(grid), mats_(std::move(matrices)), carrier_(std::move(carrier)) {
    if (mats_.size() != grid_.size())
        throw std::invalid_argument("FrameLoop: one matrix per grid sample required");
    n_ = mats_.front().rows();
    if (n_ < 1) throw std::invalid_argument("FrameLoop: empty matrices");
    for (std::size_t k = 0; k < mats_.size(); ++k) {
        if (mats_[k].rows() != n_ || mats_[k].cols() != n_)
            throw std::invalid_argument("FrameLoop: matrices must be square of equal size");
        const std::vector<double> sv = singular_values(realify(mats_[k]));
        if (sv.front() == 0.0 || sv.back() <= kFrameRankTol * sv.front())
            throw std::runtime_error(
                "FrameLoop: near-singular frame at angle " + std::to_string(grid_.angle(k)) +
                " (smallest singular value " + std::to_string(sv.back()) + ")");
    }
    if (carrier_) {
        if (carrier_->q.size() != mats_.size() || carrier_->powers.size() != n_)
            throw std::invalid_argument("FrameLoop: malformed carrier");
    }
}

BoundaryFunction FrameLoop::determinant() const {
    std::vector<cplx> d(grid_.size());
    for (std::size_t k = 0; k < grid_.size(); ++k) d[k] = det(mats_[k]);
    return BoundaryFunction::from_component_samples({d}, grid_);
}

FrameLoop FrameLoop::shifted(long p) const {
    std::vector<CMat> out = mats_;
    for (std::size_t k = 0; k < out.size(); ++k) {
        const cplx z = std::polar(1.0, double(p) * grid_.angle(k));
        out[k] = out[k].scaled(z);
    }
    std::optional<FrameCarrier> c = carrier_;
    if (c) {
        for (long& pw : c->powers) pw += p;
    }
    return FrameLoop(grid_, std::move(out), std::move(c));
}

FrameLoop FrameLoop::right_multiplied(const CMat& r) const {
    std::vector<CMat> out;
    out.reserve(mats_.size());
    for (const auto& m : mats_) out.push_back(m * r);
    // A general right factor invalidates the diagonal carrier structure.
    return FrameLoop(grid_, std::move(out));
}

std::string FrameLoop::to_json() const {
    nlohmann::json j;
    j["grid_size"] = grid_.size();
    j["N"] = n_;
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& m : mats_) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t c = 0; c < n_; ++c) {
                rows.push_back(m(i, c).real());
                rows.push_back(m(i, c).imag());
            }
        samples.push_back(rows);
    }
    j["samples"] = samples;
    return j.dump();
}

FrameLoop FrameLoop::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const std::size_t size = j.at("grid_size").get<std::size_t>();
    const std::size_t n = j.at("N").get<std::size_t>();
    const auto& samples = j.at("samples");
    if (samples.size() != size) throw std::runtime_error("FrameLoop::from_json: sample count");
    std::vector<CMat> mats;
    mats.reserve(size);
    for (const auto& row : samples) {
        if (row.size() != 2 * n * n) throw std::runtime_error("FrameLoop::from_json: matrix size");
        CMat m(n, n);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < n; ++c) {
                const double re = row[idx++].get<double>();
                const double im = row[idx++].get<double>();
                m(i, c) = cplx(re, im);
            }
        mats.push_back(std::move(m));
    }
    return FrameLoop(BoundaryGrid(size), std::move(mats));
}

CMat ThetaFrame::theta_matrix(std::size_t k) const {
    const std::size_t n = dimension();
    CMat m(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) m(i, j) = theta_cols[j].value(i, k);
    return m;
}

CMat ThetaFrame::frame_matrix(std::size_t k) const {
    const std::size_t n = dimension();
    CMat m = theta_matrix(k);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx z = std::polar(1.0, double(powers[j]) * grid().angle(k));
        for (std::size_t i = 0; i < n; ++i) m(i, j) *= z;
    }
    return m;
}

FrameLoop ThetaFrame::frame_loop() const {
    std::vector<CMat> mats;
    mats.reserve(grid().size());
    FrameCarrier carrier;
    carrier.powers.assign(powers.begin(), powers.end());
    for (std::size_t k = 0; k < grid().size(); ++k) {
        carrier.q.push_back(theta_matrix(k));
        mats.push_back(frame_matrix(k));
    }
    return FrameLoop(grid(), std::move(mats), std::move(carrier));
}

CMat ThetaFrame::theta_at_zero() const {
    const std::size_t n = dimension();
    CMat m(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::vector<cplx> c0 = theta_cols[j].mean();
        for (std::size_t i = 0; i < n; ++i) m(i, j) = c0[i];
    }
    return m;
}

std::vector<CMat> b_loop(const FrameLoop& f) {
    std::vector<CMat> out;
    out.reserve(f.grid().size());
    for (std::size_t k = 0; k < f.grid().size(); ++k) {
        const CMat conj_inv = [&] {
            try {
                return CLu(f.matrix(k).conjugated()).inverse();
            } catch (const std::runtime_error&) {
                throw std::runtime_error("b_loop: near-singular conjugate at sample " +
                                         std::to_string(k));
            }
        }();
        out.push_back(f.matrix(k) * conj_inv);
    }
    return out;
}

int total_index(const FrameLoop& f) {
    const BoundaryFunction d = f.determinant();
    // Twisted loops have determinants with huge but harmless dynamic range;
    // near-vanishing is caught by the pi/2 increment guard inside
    // winding_number rather than by a max-relative floor.
    double min_abs = 1e300;
    for (std::size_t k = 0; k < d.size(); ++k)
        min_abs = std::min(min_abs, std::abs(d.value(0, k)));
    return 2 * winding_number(d, std::max(0.5 * min_abs, 1e-300));
}

namespace {

// Real linear system for sections at shift `shift` and polynomial degree
// `degree`: rows Im(M_k u(zeta_k)) = 0 where M_k = zeta^shift G^{-1} in the
// monomial basis, or diag(zeta^{shift - p_j}) against the carrier basis.
// Rows are subsampled: polynomial content is low and uniform strides keep
// the residual geometry.
RMat section_matrix(const FrameLoop& f, long shift, std::size_t degree) {
    const std::size_t n = f.dimension();
    const std::size_t grid_n = f.grid().size();
    const std::size_t cols = 2 * n * (degree + 1);

    std::size_t want_rows = std::max<std::size_t>(96, 6 * (degree + 1));
    std::size_t stride = 1;
    while (grid_n / (stride * 2) >= want_rows) stride *= 2;

    std::vector<std::size_t> rows_idx;
    for (std::size_t k = 0; k < grid_n; k += stride) rows_idx.push_back(k);

    RMat a(rows_idx.size() * n, cols);
    for (std::size_t r = 0; r < rows_idx.size(); ++r) {
        const std::size_t k = rows_idx[r];
        CMat m(n, n);
        if (f.carrier()) {
            // M = (G^{-1} q) * zeta^shift; algebraically diag(zeta^{shift-p_j}).
            m = CLu(f.matrix(k)).inverse() * f.carrier()->q[k];
        } else {
            m = CLu(f.matrix(k)).inverse();
        }
        const cplx zshift = std::polar(1.0, double(shift) * f.grid().angle(k));
        for (std::size_t deg = 0; deg <= degree; ++deg) {
            const cplx zn = std::polar(1.0, double(deg) * f.grid().angle(k)) * zshift;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t j = 0; j < n; ++j) {
                    const cplx e = m(j, p) * zn;
                    // real part of coefficient c_{deg,p}
                    a(r * n + j, 2 * (deg * n + p)) = e.imag();
                    // imaginary part: Im(i*e) = Re(e)
                    a(r * n + j, 2 * (deg * n + p) + 1) = e.real();
                }
        }
    }
    return a;
}

std::size_t section_dim_once(const FrameLoop& f, long shift, std::size_t degree) {
    if (degree < 1) throw std::invalid_argument("holomorphic_section_dim: degree >= 1 required");
    if (f.grid().size() < 2 * degree)
        throw std::invalid_argument("holomorphic_section_dim: grid does not resolve 2*degree modes");
    const RMat a = section_matrix(f, shift, degree);
    const std::size_t rank = numerical_rank(a, kSectionRankTol);
    return a.cols() - rank;
}

// Stabilized dimension: identical at degree and degree+2, else throws.
std::size_t section_dim_stable(const FrameLoop& f, long shift, std::size_t degree) {
    const std::size_t d0 = section_dim_once(f, shift, degree);
    const std::size_t d1 = section_dim_once(f, shift, degree + 2);
    if (d0 != d1)
        throw std::runtime_error("holomorphic_section_dim: dimension not stabilized (" +
                                 std::to_string(d0) + " at degree " + std::to_string(degree) +
                                 ", " + std::to_string(d1) + " at degree " +
                                 std::to_string(degree + 2) + ")");
    return d0;
}

// Expected staircase value for a candidate multiset.
long staircase_value(const std::vector<int>& kappa, long k) {
    long s = 0;
    for (int x : kappa) s += std::max<long>(0, long(x) - 2 * k + 1);
    return s;
}

}  // namespace

std::size_t holomorphic_section_dim(const FrameLoop& f, std::size_t degree) {
    return section_dim_stable(f, 0, degree);
}

// The staircase D(k) at integer shifts determines the multiset of EVEN
// partial indices uniquely; parity-mixed multisets can share a staircase
// (e.g. (1,1) and (2,0) are indistinguishable), so the fit prefers the even
// solution and reports genuine ambiguity otherwise.
IndexProfile partial_indices(const FrameLoop& f) {
    const int total = total_index(f);
    const std::size_t n = f.dimension();
    const long degree_cap = long(f.grid().size()) / 2 - 2;

    std::map<std::pair<long, long>, long> memo;
    auto dim_at_degree = [&](long k, long degree) -> long {
        degree = std::min(degree, degree_cap);
        if (degree < 4)
            throw std::runtime_error("partial_indices: grid too small for the shift scan");
        const auto key = std::make_pair(k, degree);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        const long d = long(section_dim_once(f, k, std::size_t(degree)));
        memo[key] = d;
        return d;
    };

    std::map<long, long> dims;        // certified staircase values
    std::map<long, long> degree_used;

    // Upward scan to the first vanishing dimension, certified at a generous
    // degree so a shortfall cannot fake it. D(k0) = 0 proves every index is
    // at most 2 k0 - 1, hence D vanishes for all larger shifts too.
    long k_hi = 0;
    for (long k = 0;; ++k) {
        long deg = std::max<long>(6, long(total) - 2 * k * long(n) + 6);
        long d = dim_at_degree(k, deg);
        if (d == 0 && deg < 16) {
            deg = 16;
            d = dim_at_degree(k, deg);
        }
        dims[k] = d;
        degree_used[k] = std::min(deg, degree_cap);
        k_hi = k;
        if (d == 0) break;
        if (k > 24) throw std::runtime_error("partial_indices: no stabilization at high shifts");
    }
    const long kappa_bound = 2 * k_hi - 1;

    // Downward scan until the staircase saturates at slope 2N, which proves
    // every index exceeds 2k. Degrees now come with the certified bound.
    long k_lo = 0;
    for (long k = -1;; --k) {
        const long deg = std::max<long>(6, kappa_bound - 2 * k + 8);
        dims[k] = dim_at_degree(k, deg);
        degree_used[k] = std::min(deg, degree_cap);
        k_lo = k;
        if (dims[k] - dims[k + 1] == 2 * long(n)) break;
        if (k < -24) throw std::runtime_error("partial_indices: no saturation at low shifts");
    }

    // Stabilization certificate at shift 0: the dimension must agree between
    // the degree used and degree + 2.
    if (dim_at_degree(0, degree_used[0] + 2) != dims[0])
        throw std::runtime_error("partial_indices: section dimension not stabilized at shift 0");

    auto matches_staircase = [&](const std::vector<int>& kappa) {
        for (const auto& [k, d] : dims)
            if (staircase_value(kappa, k) != d) return false;
        return true;
    };
    auto enumerate = [&](int lo, int hi, int step) {
        std::vector<std::vector<int>> matches;
        std::vector<int> cur(n);
        std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int maxv) {
            if (pos == n) {
                if (matches_staircase(cur)) matches.push_back(cur);
                return;
            }
            for (int v = maxv; v >= lo; v -= step) {
                cur[pos] = v;
                rec(pos + 1, v);
            }
        };
        int top = hi;
        if (step == 2 && (top - lo) % 2 != 0) --top;
        rec(0, top);
        return matches;
    };

    const int lo = int(2 * k_lo + 1), hi = int(kappa_bound);
    const int lo_even = lo + (lo % 2 == 0 ? 0 : 1);
    std::vector<std::vector<int>> matches = enumerate(lo_even, hi - (hi % 2), 2);
    if (matches.empty()) matches = enumerate(lo, hi, 1);
    if (matches.empty())
        throw std::runtime_error(
            "partial_indices: no index multiset matches the dimension profile");
    if (matches.size() > 1)
        throw std::runtime_error("partial_indices: dimension profile is ambiguous");

    IndexProfile profile;
    profile.partial = matches.front();
    profile.total = 0;
    for (int x : profile.partial) profile.total += x;
    if (profile.total != total)
        throw std::runtime_error("partial_indices: sum of partial indices " +
                                 std::to_string(profile.total) +
                                 " disagrees with determinant total " + std::to_string(total));

    // Post-verification: re-check any staircase value whose scan degree was
    // below what the recovered indices require.
    const int kappa_max = profile.partial.front();
    for (const auto& [k, d] : dims) {
        const long needed = std::max<long>(6, long(kappa_max) - 2 * k + 6);
        if (degree_used[k] < std::min(needed, degree_cap)) {
            if (dim_at_degree(k, needed) != d)
                throw std::runtime_error(
                    "partial_indices: dimension profile failed post-verification at shift " +
                    std::to_string(k));
        }
    }
    return profile;
}

}  // namespace adisc
