#include "adisc/conjugation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adisc {

BoundaryFunction conjugate(const BoundaryFunction& u, ConjugationKind kind) {
    if (!u.real_valued())
        throw std::invalid_argument("conjugate: input must be real-valued");
    const std::size_t n = u.size();
    const long half = long(n) / 2;
    std::vector<std::vector<cplx>> coeffs(u.dimension(), std::vector<cplx>(n));
    for (std::size_t j = 0; j < u.dimension(); ++j) {
        for (long f = -half; f < half; ++f) {
            cplx c = u.coeff(j, f);
            if (f == 0 || f == -half) {
                c = 0.0;  // constant has no conjugate; Nyquist is unpaired
            } else {
                c *= cplx(0.0, f > 0 ? -1.0 : 1.0);  // multiplier -i*sign(n)
            }
            coeffs[j][std::size_t(f + half)] = c;
        }
    }
    BoundaryFunction v = BoundaryFunction::from_coefficients(coeffs, u.grid());
    if (kind == ConjugationKind::AtOne) {
        // subtract the value at zeta = 1 (grid point k = 0)
        std::vector<cplx> at_one(u.dimension());
        for (std::size_t j = 0; j < u.dimension(); ++j) at_one[j] = v.value(j, 0);
        v = v - BoundaryFunction::constant(at_one, u.grid());
    }
    // Imaginary parts are zero up to FFT roundoff; re-sample as exactly real.
    std::vector<std::vector<cplx>> comps(v.dimension(), std::vector<cplx>(n));
    for (std::size_t j = 0; j < v.dimension(); ++j)
        for (std::size_t k = 0; k < n; ++k) comps[j][k] = cplx(v.value(j, k).real(), 0.0);
    return BoundaryFunction::from_component_samples(std::move(comps), u.grid());
}

double negative_spectrum_mass_component(const BoundaryFunction& f, std::size_t comp) {
    const long half = long(f.size()) / 2;
    double total = 0.0, neg = 0.0;
    for (long n = -half; n < half; ++n) {
        const double e = std::norm(f.coeff(comp, n));
        total += e;
        if (n < 0) neg += e;
    }
    return total > 0.0 ? neg / total : 0.0;
}

double negative_spectrum_mass(const BoundaryFunction& f) {
    const long half = long(f.size()) / 2;
    double total = 0.0, neg = 0.0;
    for (std::size_t j = 0; j < f.dimension(); ++j)
        for (long n = -half; n < half; ++n) {
            const double e = std::norm(f.coeff(j, n));
            total += e;
            if (n < 0) neg += e;
        }
    return total > 0.0 ? neg / total : 0.0;
}

double max_negative_spectrum_mass(const BoundaryFunction& f) {
    double worst = 0.0;
    for (std::size_t j = 0; j < f.dimension(); ++j)
        worst = std::max(worst, negative_spectrum_mass_component(f, j));
    return worst;
}

std::vector<cplx> holomorphic_extension(const BoundaryFunction& f, cplx zeta,
                                        double neg_mass_tol) {
    if (std::abs(zeta) > 1.0 - 1e-6)
        throw std::invalid_argument("holomorphic_extension: |zeta| too close to 1");
    const double mass = negative_spectrum_mass(f);
    if (mass > neg_mass_tol)
        throw std::runtime_error("holomorphic_extension: substantial negative spectrum (mass " +
                                 std::to_string(mass) + ")");
    const long half = long(f.size()) / 2;
    std::vector<cplx> out(f.dimension());
    for (std::size_t j = 0; j < f.dimension(); ++j) {
        cplx sum = 0.0, zp = 1.0;
        for (long n = 0; n < half; ++n) {
            sum += f.coeff(j, n) * zp;
            zp *= zeta;
        }
        out[j] = sum;
    }
    return out;
}

int winding_number(const BoundaryFunction& f, double tol) {
    if (f.dimension() != 1)
        throw std::invalid_argument("winding_number: input must be scalar");
    if (tol <= 0.0) throw std::invalid_argument("winding_number: tol must be positive");
    const std::size_t n = f.size();
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(f.value(0, k)) <= tol)
            throw std::runtime_error("winding_number: |f| <= tol at sample " + std::to_string(k));
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const cplx ratio = f.value(0, (k + 1) % n) / f.value(0, k);
        const double inc = std::arg(ratio);
        if (std::abs(inc) >= std::numbers::pi / 2.0)
            throw std::runtime_error(
                "winding_number: argument increment >= pi/2 at sample " + std::to_string(k) +
                " (loop under-resolved)");
        total += inc;
    }
    const double w = total / (2.0 * std::numbers::pi);
    const long r = std::lround(w);
    if (std::abs(w - double(r)) > 1e-6)
        throw std::runtime_error("winding_number: total increment is not an integer multiple");
    return int(r);
}

}  // namespace adisc
