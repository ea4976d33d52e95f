#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace adisc {

using cplx = std::complex<double>;

/// Uniform sample grid on the unit circle: theta_k = 2*pi*k/size,
/// zeta_k = exp(i*theta_k). Sizes are powers of two, at least 8, so the
/// discrete transforms below are exact radix-2 FFTs.
class BoundaryGrid {
public:
    explicit BoundaryGrid(std::size_t size);

    std::size_t size() const { return size_; }
    double angle(std::size_t k) const;
    cplx point(std::size_t k) const;

    bool operator==(const BoundaryGrid& rhs) const { return size_ == rhs.size_; }

private:
    std::size_t size_;
};

/// Grid diagnostics standing in for Hoelder norms: sup norm, fraction of
/// spectral mass in the top quarter of frequencies, and the max second
/// difference quotient as a curvature proxy.
struct SmoothnessReport {
    double sup_norm = 0.0;
    double tail_energy = 0.0;
    double difference_quotient_bound = 0.0;
};

/// Vector-valued function on the circle held as samples plus discrete
/// Fourier coefficients, kept mutually consistent. Instances are immutable
/// after construction; all operations return new objects, so values can be
/// shared freely across threads.
class BoundaryFunction {
public:
    /// samples[k] is the value in C^d at theta_k. Throws on length
    /// mismatch or non-finite entries.
    static BoundaryFunction from_samples(const std::vector<std::vector<cplx>>& samples,
                                         const BoundaryGrid& grid);

    /// Same data laid out per component: comps[j][k].
    static BoundaryFunction from_component_samples(std::vector<std::vector<cplx>> comps,
                                                   const BoundaryGrid& grid);

    /// Build directly from coefficients c_n, n in [-size/2, size/2), given
    /// per component in that order.
    static BoundaryFunction from_coefficients(const std::vector<std::vector<cplx>>& coeffs_by_comp,
                                              const BoundaryGrid& grid);

    static BoundaryFunction zero(std::size_t dimension, const BoundaryGrid& grid);
    static BoundaryFunction constant(const std::vector<cplx>& value, const BoundaryGrid& grid);

    const BoundaryGrid& grid() const { return grid_; }
    std::size_t dimension() const { return values_.size(); }
    std::size_t size() const { return grid_.size(); }

    cplx value(std::size_t comp, std::size_t k) const { return values_[comp][k]; }
    const std::vector<cplx>& component_values(std::size_t comp) const { return values_[comp]; }

    /// Coefficient c_n for n in [-size/2, size/2).
    cplx coeff(std::size_t comp, long n) const;

    /// Trigonometric interpolation through the samples; theta wraps mod 2*pi.
    /// The unpaired Nyquist mode is evaluated as a cosine so real data
    /// interpolates to real values.
    std::vector<cplx> eval(double theta) const;
    cplx eval_scalar(double theta) const;

    bool real_valued(double tol = 1e-12) const;

    BoundaryFunction component(std::size_t comp) const;
    static BoundaryFunction join(const std::vector<BoundaryFunction>& parts);

    BoundaryFunction operator+(const BoundaryFunction& rhs) const;
    BoundaryFunction operator-(const BoundaryFunction& rhs) const;
    BoundaryFunction scaled(cplx s) const;
    /// Pointwise product with a scalar (d == 1) function.
    BoundaryFunction multiplied_by(const BoundaryFunction& scalar) const;
    /// Pointwise multiplication by zeta^k.
    BoundaryFunction multiplied_by_power(long k) const;
    BoundaryFunction conjugated_samples() const;

    /// Spectral d/d(theta); the unpaired Nyquist mode is zeroed.
    BoundaryFunction derivative_theta() const;

    /// Mean value (c_0) per component.
    std::vector<cplx> mean() const;

    /// Spectral resampling to another power-of-two grid. Growing pads with
    /// zeros (exact); shrinking requires the dropped mass to be below
    /// `drop_tol` relative, else throws.
    BoundaryFunction resampled(const BoundaryGrid& new_grid, double drop_tol = 1e-12) const;

    SmoothnessReport smoothness_report() const;

    /// CSV with header "theta,re_1,im_1,...": one row per grid angle,
    /// 17 significant digits, exact round trip.
    void write_csv(std::ostream& os) const;
    static BoundaryFunction read_csv(std::istream& is);

private:
    BoundaryFunction(BoundaryGrid grid, std::vector<std::vector<cplx>> values,
                     std::vector<std::vector<cplx>> coeffs);

    BoundaryGrid grid_;
    std::vector<std::vector<cplx>> values_;  // [comp][k]
    std::vector<std::vector<cplx>> coeffs_;  // [comp][k], FFT order
};

/// In-place radix-2 FFT helpers (power-of-two lengths).
void fft_forward(std::vector<cplx>& data);
void fft_inverse(std::vector<cplx>& data);

}  // namespace adisc
