#include "adisc/poly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace adisc {

namespace {

double int_pow(double x, unsigned e) {
    double r = 1.0;
    while (e > 0) {
        if (e & 1u) r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

double binomial(unsigned n, unsigned k) {
    double r = 1.0;
    for (unsigned i = 0; i < k; ++i) r = r * double(n - i) / double(i + 1);
    return r;
}

}  // namespace

RealPolynomial::RealPolynomial(std::size_t num_vars, std::vector<PolyTerm> terms)
    : num_vars_(num_vars), terms_(std::move(terms)) {
    for (auto& t : terms_) {
        if (t.powers.size() != num_vars_)
            throw std::invalid_argument("RealPolynomial: term arity mismatch");
    }
    normalize();
}

RealPolynomial RealPolynomial::constant(std::size_t num_vars, double c) {
    RealPolynomial p(num_vars);
    if (c != 0.0) p.terms_.push_back({c, std::vector<unsigned>(num_vars, 0)});
    return p;
}

RealPolynomial RealPolynomial::variable(std::size_t num_vars, std::size_t index) {
    if (index >= num_vars) throw std::invalid_argument("RealPolynomial::variable: bad index");
    RealPolynomial p(num_vars);
    std::vector<unsigned> pw(num_vars, 0);
    pw[index] = 1;
    p.terms_.push_back({1.0, std::move(pw)});
    return p;
}

unsigned RealPolynomial::total_degree() const {
    unsigned d = 0;
    for (const auto& t : terms_) {
        unsigned s = 0;
        for (unsigned e : t.powers) s += e;
        d = std::max(d, s);
    }
    return d;
}

double RealPolynomial::eval(std::span<const double> x) const {
    if (x.size() != num_vars_) throw std::invalid_argument("RealPolynomial::eval: arity mismatch");
    double sum = 0.0;
    for (const auto& t : terms_) {
        double v = t.coeff;
        for (std::size_t i = 0; i < num_vars_; ++i)
            if (t.powers[i] > 0) v *= int_pow(x[i], t.powers[i]);
        sum += v;
    }
    return sum;
}

RealPolynomial RealPolynomial::partial(std::size_t var) const {
    if (var >= num_vars_) throw std::invalid_argument("RealPolynomial::partial: bad variable");
    RealPolynomial out(num_vars_);
    for (const auto& t : terms_) {
        if (t.powers[var] == 0) continue;
        PolyTerm d = t;
        d.coeff *= double(d.powers[var]);
        d.powers[var] -= 1;
        out.terms_.push_back(std::move(d));
    }
    out.normalize();
    return out;
}

RealPolynomial RealPolynomial::shifted(std::span<const double> center) const {
    if (center.size() != num_vars_)
        throw std::invalid_argument("RealPolynomial::shifted: arity mismatch");
    // Expand term by term: (c_i + y_i)^e via the binomial theorem, one
    // variable at a time.
    RealPolynomial out(num_vars_);
    for (const auto& t : terms_) {
        std::vector<PolyTerm> acc{{t.coeff, std::vector<unsigned>(num_vars_, 0)}};
        for (std::size_t v = 0; v < num_vars_; ++v) {
            const unsigned e = t.powers[v];
            if (e == 0) continue;
            std::vector<PolyTerm> next;
            for (const auto& partial : acc)
                for (unsigned k = 0; k <= e; ++k) {
                    PolyTerm nt = partial;
                    nt.coeff *= binomial(e, k) * int_pow(center[v], e - k);
                    if (nt.coeff == 0.0) continue;
                    nt.powers[v] += k;
                    next.push_back(std::move(nt));
                }
            acc = std::move(next);
        }
        for (auto& a : acc) out.terms_.push_back(std::move(a));
    }
    out.normalize();
    return out;
}

RealPolynomial RealPolynomial::truncate_below(unsigned min_degree) const {
    RealPolynomial out(num_vars_);
    for (const auto& t : terms_) {
        unsigned s = 0;
        for (unsigned e : t.powers) s += e;
        if (s >= min_degree) out.terms_.push_back(t);
    }
    return out;
}

RealPolynomial RealPolynomial::truncate_above(unsigned max_degree) const {
    RealPolynomial out(num_vars_);
    for (const auto& t : terms_) {
        unsigned s = 0;
        for (unsigned e : t.powers) s += e;
        if (s <= max_degree) out.terms_.push_back(t);
    }
    return out;
}

RealPolynomial RealPolynomial::operator+(const RealPolynomial& rhs) const {
    if (num_vars_ != rhs.num_vars_) throw std::invalid_argument("RealPolynomial add: arity");
    RealPolynomial out(num_vars_);
    out.terms_ = terms_;
    out.terms_.insert(out.terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
    out.normalize();
    return out;
}

RealPolynomial RealPolynomial::operator-(const RealPolynomial& rhs) const {
    return *this + rhs.scaled(-1.0);
}

RealPolynomial RealPolynomial::operator*(const RealPolynomial& rhs) const {
    if (num_vars_ != rhs.num_vars_) throw std::invalid_argument("RealPolynomial mul: arity");
    RealPolynomial out(num_vars_);
    for (const auto& a : terms_)
        for (const auto& b : rhs.terms_) {
            PolyTerm t;
            t.coeff = a.coeff * b.coeff;
            t.powers.resize(num_vars_);
            for (std::size_t i = 0; i < num_vars_; ++i) t.powers[i] = a.powers[i] + b.powers[i];
            out.terms_.push_back(std::move(t));
        }
    out.normalize();
    return out;
}

RealPolynomial RealPolynomial::scaled(double s) const {
    RealPolynomial out(num_vars_);
    if (s == 0.0) return out;
    out.terms_ = terms_;
    for (auto& t : out.terms_) t.coeff *= s;
    return out;
}

double RealPolynomial::max_coeff_difference(const RealPolynomial& rhs) const {
    if (num_vars_ != rhs.num_vars_)
        throw std::invalid_argument("RealPolynomial::max_coeff_difference: arity");
    std::map<std::vector<unsigned>, double> diff;
    for (const auto& t : terms_) diff[t.powers] += t.coeff;
    for (const auto& t : rhs.terms_) diff[t.powers] -= t.coeff;
    double m = 0.0;
    for (const auto& [pw, c] : diff) m = std::max(m, std::abs(c));
    return m;
}

void RealPolynomial::normalize() {
    std::map<std::vector<unsigned>, double> combined;
    for (const auto& t : terms_) combined[t.powers] += t.coeff;
    terms_.clear();
    for (const auto& [pw, c] : combined)
        if (c != 0.0) terms_.push_back({c, pw});
}

}  // namespace adisc
