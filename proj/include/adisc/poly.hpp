#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace adisc {

/// One monomial: coeff * prod_i x_i^powers[i].
struct PolyTerm {
    double coeff = 0.0;
    std::vector<unsigned> powers;
};

/// Real polynomial in a fixed number of variables, stored as a combined,
/// sorted term list. Degrees stay tiny (<= 6 in this library), so the
/// representation is deliberately simple.
class RealPolynomial {
public:
    RealPolynomial() = default;
    explicit RealPolynomial(std::size_t num_vars) : num_vars_(num_vars) {}
    RealPolynomial(std::size_t num_vars, std::vector<PolyTerm> terms);

    static RealPolynomial constant(std::size_t num_vars, double c);
    static RealPolynomial variable(std::size_t num_vars, std::size_t index);

    std::size_t num_vars() const { return num_vars_; }
    const std::vector<PolyTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    unsigned total_degree() const;

    double eval(std::span<const double> x) const;
    RealPolynomial partial(std::size_t var) const;

    /// Re-expand around a new center: returns q with q(y) = p(center + y).
    RealPolynomial shifted(std::span<const double> center) const;

    /// Drop the terms of total degree < min_degree (used to split off
    /// constant/linear parts).
    RealPolynomial truncate_below(unsigned min_degree) const;
    RealPolynomial truncate_above(unsigned max_degree) const;

    RealPolynomial operator+(const RealPolynomial& rhs) const;
    RealPolynomial operator-(const RealPolynomial& rhs) const;
    RealPolynomial operator*(const RealPolynomial& rhs) const;
    RealPolynomial scaled(double s) const;

    /// Max |coefficient difference| against another polynomial.
    double max_coeff_difference(const RealPolynomial& rhs) const;

private:
    void normalize();

    std::size_t num_vars_ = 0;
    std::vector<PolyTerm> terms_;
};

}  // namespace adisc
