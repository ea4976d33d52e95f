#include "adisc/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace adisc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_core(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft: length must be a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 1.0 : -1.0) * kTwoPi / double(len);
        const cplx wstep = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wstep;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / double(n);
        for (cplx& x : a) x *= inv;
    }
}

}  // namespace

void fft_forward(std::vector<cplx>& data) { fft_core(data, false); }
void fft_inverse(std::vector<cplx>& data) { fft_core(data, true); }

BoundaryGrid::BoundaryGrid(std::size_t size) : size_(size) {
    if (!is_pow2(size) || size < 8)
        throw std::invalid_argument("BoundaryGrid: size must be a power of two >= 8");
}

double BoundaryGrid::angle(std::size_t k) const { return kTwoPi * double(k % size_) / double(size_); }

cplx BoundaryGrid::point(std::size_t k) const { return std::polar(1.0, angle(k)); }

BoundaryFunction::BoundaryFunction(BoundaryGrid grid, std::vector<std::vector<cplx>> values,
                                   std::vector<std::vector<cplx>> coeffs)
    : grid_(grid), values_(std::move(values)), coeffs_(std::move(coeffs)) {}

BoundaryFunction BoundaryFunction::from_samples(const std::vector<std::vector<cplx>>& samples,
                                                const BoundaryGrid& grid) {
    if (samples.size() != grid.size())
        throw std::invalid_argument("from_samples: sample count does not match grid size");
    if (samples.empty() || samples.front().empty())
        throw std::invalid_argument("from_samples: empty sample vectors");
    const std::size_t d = samples.front().size();
    std::vector<std::vector<cplx>> comps(d, std::vector<cplx>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (samples[k].size() != d)
            throw std::invalid_argument("from_samples: inconsistent component count");
        for (std::size_t j = 0; j < d; ++j) comps[j][k] = samples[k][j];
    }
    return from_component_samples(std::move(comps), grid);
}

BoundaryFunction BoundaryFunction::from_component_samples(std::vector<std::vector<cplx>> comps,
                                                          const BoundaryGrid& grid) {
    if (comps.empty()) throw std::invalid_argument("from_component_samples: no components");
    for (const auto& c : comps) {
        if (c.size() != grid.size())
            throw std::invalid_argument("from_component_samples: sample count mismatch");
        for (const cplx& v : c)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw std::invalid_argument("from_component_samples: non-finite entry");
    }
    std::vector<std::vector<cplx>> coeffs = comps;
    for (auto& c : coeffs) {
        fft_forward(c);
        const double inv = 1.0 / double(grid.size());
        for (cplx& x : c) x *= inv;
    }
    return BoundaryFunction(grid, std::move(comps), std::move(coeffs));
}

BoundaryFunction BoundaryFunction::from_coefficients(
    const std::vector<std::vector<cplx>>& coeffs_by_comp, const BoundaryGrid& grid) {
    if (coeffs_by_comp.empty()) throw std::invalid_argument("from_coefficients: no components");
    const std::size_t n = grid.size();
    std::vector<std::vector<cplx>> coeffs(coeffs_by_comp.size(), std::vector<cplx>(n));
    for (std::size_t j = 0; j < coeffs_by_comp.size(); ++j) {
        if (coeffs_by_comp[j].size() != n)
            throw std::invalid_argument("from_coefficients: need exactly size coefficients");
        // input order: n = -size/2 .. size/2-1 ; storage: FFT order
        for (std::size_t i = 0; i < n; ++i) {
            const long freq = long(i) - long(n / 2);
            const std::size_t slot = std::size_t((freq + long(n)) % long(n));
            coeffs[j][slot] = coeffs_by_comp[j][i];
        }
    }
    std::vector<std::vector<cplx>> values = coeffs;
    for (auto& v : values) {
        for (cplx& x : v) x *= double(n);
        fft_inverse(v);
    }
    return BoundaryFunction(grid, std::move(values), std::move(coeffs));
}

BoundaryFunction BoundaryFunction::zero(std::size_t dimension, const BoundaryGrid& grid) {
    return constant(std::vector<cplx>(dimension, cplx(0.0, 0.0)), grid);
}

BoundaryFunction BoundaryFunction::constant(const std::vector<cplx>& value,
                                            const BoundaryGrid& grid) {
    std::vector<std::vector<cplx>> comps(value.size(),
                                         std::vector<cplx>(grid.size()));
    for (std::size_t j = 0; j < value.size(); ++j)
        std::fill(comps[j].begin(), comps[j].end(), value[j]);
    return from_component_samples(std::move(comps), grid);
}

cplx BoundaryFunction::coeff(std::size_t comp, long n) const {
    const long half = long(size()) / 2;
    if (n < -half || n >= half)
        throw std::invalid_argument("coeff: frequency outside [-size/2, size/2)");
    const std::size_t slot = std::size_t((n + long(size())) % long(size()));
    return coeffs_[comp][slot];
}

std::vector<cplx> BoundaryFunction::eval(double theta) const {
    const std::size_t n = size();
    const long half = long(n) / 2;
    std::vector<cplx> out(dimension());
    // e^{i n theta} accumulated by recurrence per sign
    const cplx w = std::polar(1.0, theta);
    const cplx wc = std::conj(w);
    for (std::size_t j = 0; j < dimension(); ++j) {
        cplx sum = coeffs_[j][0];
        cplx wp = 1.0, wm = 1.0;
        for (long m = 1; m < half; ++m) {
            wp *= w;
            wm *= wc;
            sum += coeff(j, m) * wp + coeff(j, -m) * wm;
        }
        sum += coeff(j, -half) * std::cos(double(half) * theta);
        out[j] = sum;
    }
    return out;
}

cplx BoundaryFunction::eval_scalar(double theta) const {
    if (dimension() != 1) throw std::invalid_argument("eval_scalar: function is not scalar");
    return eval(theta)[0];
}

bool BoundaryFunction::real_valued(double tol) const {
    for (const auto& comp : values_)
        for (const cplx& v : comp)
            if (std::abs(v.imag()) > tol) return false;
    return true;
}

BoundaryFunction BoundaryFunction::component(std::size_t comp) const {
    return BoundaryFunction(grid_, {values_[comp]}, {coeffs_[comp]});
}

BoundaryFunction BoundaryFunction::join(const std::vector<BoundaryFunction>& parts) {
    if (parts.empty()) throw std::invalid_argument("join: no parts");
    std::vector<std::vector<cplx>> values, coeffs;
    for (const auto& p : parts) {
        if (!(p.grid() == parts.front().grid()))
            throw std::invalid_argument("join: grid mismatch");
        for (std::size_t j = 0; j < p.dimension(); ++j) {
            values.push_back(p.values_[j]);
            coeffs.push_back(p.coeffs_[j]);
        }
    }
    return BoundaryFunction(parts.front().grid_, std::move(values), std::move(coeffs));
}

BoundaryFunction BoundaryFunction::operator+(const BoundaryFunction& rhs) const {
    if (!(grid_ == rhs.grid_) || dimension() != rhs.dimension())
        throw std::invalid_argument("BoundaryFunction add: shape mismatch");
    std::vector<std::vector<cplx>> values = values_, coeffs = coeffs_;
    for (std::size_t j = 0; j < dimension(); ++j)
        for (std::size_t k = 0; k < size(); ++k) {
            values[j][k] += rhs.values_[j][k];
            coeffs[j][k] += rhs.coeffs_[j][k];
        }
    return BoundaryFunction(grid_, std::move(values), std::move(coeffs));
}

BoundaryFunction BoundaryFunction::operator-(const BoundaryFunction& rhs) const {
    return *this + rhs.scaled(-1.0);
}

BoundaryFunction BoundaryFunction::scaled(cplx s) const {
    std::vector<std::vector<cplx>> values = values_, coeffs = coeffs_;
    for (std::size_t j = 0; j < dimension(); ++j)
        for (std::size_t k = 0; k < size(); ++k) {
            values[j][k] *= s;
            coeffs[j][k] *= s;
        }
    return BoundaryFunction(grid_, std::move(values), std::move(coeffs));
}

BoundaryFunction BoundaryFunction::multiplied_by(const BoundaryFunction& scalar) const {
    if (scalar.dimension() != 1 || !(scalar.grid() == grid_))
        throw std::invalid_argument("multiplied_by: need scalar function on same grid");
    std::vector<std::vector<cplx>> comps = values_;
    for (auto& c : comps)
        for (std::size_t k = 0; k < size(); ++k) c[k] *= scalar.values_[0][k];
    return from_component_samples(std::move(comps), grid_);
}

BoundaryFunction BoundaryFunction::multiplied_by_power(long p) const {
    std::vector<std::vector<cplx>> comps = values_;
    for (std::size_t k = 0; k < size(); ++k) {
        const cplx z = std::polar(1.0, double(p) * grid_.angle(k));
        for (auto& c : comps) c[k] *= z;
    }
    return from_component_samples(std::move(comps), grid_);
}

BoundaryFunction BoundaryFunction::conjugated_samples() const {
    std::vector<std::vector<cplx>> comps = values_;
    for (auto& c : comps)
        for (cplx& v : c) v = std::conj(v);
    return from_component_samples(std::move(comps), grid_);
}

BoundaryFunction BoundaryFunction::derivative_theta() const {
    const std::size_t n = size();
    const long half = long(n) / 2;
    std::vector<std::vector<cplx>> coeffs = coeffs_;
    for (auto& c : coeffs) {
        for (std::size_t slot = 0; slot < n; ++slot) {
            long freq = long(slot);
            if (freq >= half) freq -= long(n);
            c[slot] *= (freq == -half) ? cplx(0.0, 0.0) : cplx(0.0, double(freq));
        }
    }
    std::vector<std::vector<cplx>> values = coeffs;
    for (auto& v : values) {
        for (cplx& x : v) x *= double(n);
        fft_inverse(v);
    }
    return BoundaryFunction(grid_, std::move(values), std::move(coeffs));
}

std::vector<cplx> BoundaryFunction::mean() const {
    std::vector<cplx> m(dimension());
    for (std::size_t j = 0; j < dimension(); ++j) m[j] = coeffs_[j][0];
    return m;
}

BoundaryFunction BoundaryFunction::resampled(const BoundaryGrid& new_grid, double drop_tol) const {
    const std::size_t n = size(), m = new_grid.size();
    if (m == n) return *this;
    std::vector<std::vector<cplx>> out(dimension(), std::vector<cplx>(m, cplx(0.0, 0.0)));
    const long old_half = long(n) / 2, new_half = long(m) / 2;
    for (std::size_t j = 0; j < dimension(); ++j) {
        double total = 0.0, dropped = 0.0;
        for (long f = -old_half; f < old_half; ++f) {
            const double e = std::norm(coeff(j, f));
            total += e;
            if (f < -new_half || f >= new_half) {
                dropped += e;
                continue;
            }
            out[j][std::size_t((f + long(m)) % long(m))] = coeff(j, f);
        }
        if (total > 0.0 && dropped > drop_tol * drop_tol * total)
            throw std::runtime_error("resampled: truncation would drop non-negligible spectrum");
    }
    std::vector<std::vector<cplx>> values = out;
    for (auto& v : values) {
        for (cplx& x : v) x *= double(m);
        fft_inverse(v);
    }
    return BoundaryFunction(new_grid, std::move(values), std::move(out));
}

SmoothnessReport BoundaryFunction::smoothness_report() const {
    SmoothnessReport rep;
    for (const auto& comp : values_)
        for (const cplx& v : comp) rep.sup_norm = std::max(rep.sup_norm, std::abs(v));

    const std::size_t n = size();
    const long half = long(n) / 2;
    const long top_start = (3 * long(n)) / 8;  // |freq| >= 3n/8 is the top quarter
    double total = 0.0, top = 0.0;
    for (std::size_t j = 0; j < dimension(); ++j)
        for (long f = -half; f < half; ++f) {
            const double e = std::norm(coeff(j, f));
            total += e;
            if (std::abs(f) >= top_start) top += e;
        }
    rep.tail_energy = (total > 0.0) ? top / total : 0.0;

    const double dt = kTwoPi / double(n);
    for (std::size_t j = 0; j < dimension(); ++j)
        for (std::size_t k = 0; k < n; ++k) {
            const cplx second = values_[j][(k + 1) % n] - 2.0 * values_[j][k] +
                                values_[j][(k + n - 1) % n];
            rep.difference_quotient_bound =
                std::max(rep.difference_quotient_bound, std::abs(second) / (dt * dt));
        }
    return rep;
}

void BoundaryFunction::write_csv(std::ostream& os) const {
    os << "theta";
    for (std::size_t j = 0; j < dimension(); ++j)
        os << ",re_" << (j + 1) << ",im_" << (j + 1);
    os << "\n";
    char buf[64];
    for (std::size_t k = 0; k < size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", grid_.angle(k));
        os << buf;
        for (std::size_t j = 0; j < dimension(); ++j) {
            std::snprintf(buf, sizeof(buf), ",%.17g", values_[j][k].real());
            os << buf;
            std::snprintf(buf, sizeof(buf), ",%.17g", values_[j][k].imag());
            os << buf;
        }
        os << "\n";
    }
}

BoundaryFunction BoundaryFunction::read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_csv: missing header");
    std::size_t d = 0;
    for (char c : line)
        if (c == ',') ++d;
    if (d == 0 || d % 2 != 0) throw std::runtime_error("read_csv: malformed header");
    d /= 2;
    std::vector<std::vector<cplx>> comps(d);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != 1 + 2 * d) throw std::runtime_error("read_csv: malformed row");
        for (std::size_t j = 0; j < d; ++j)
            comps[j].push_back(cplx(row[1 + 2 * j], row[2 + 2 * j]));
    }
    if (comps[0].empty()) throw std::runtime_error("read_csv: no data rows");
    return from_component_samples(std::move(comps), BoundaryGrid(comps[0].size()));
}

}  // namespace adisc
