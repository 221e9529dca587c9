#include "pjd/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pjd {

MultiIndex::MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) {
    for (int e : exps_) {
        if (e < 0) throw Error("MultiIndex: negative exponent");
        degree_ += e;
    }
}

MultiIndex MultiIndex::unit(int dim, int var) {
    std::vector<int> e(dim, 0);
    e[var] = 1;
    return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::plus(const MultiIndex& o) const {
    if (dim() != o.dim()) throw DimensionMismatch("MultiIndex::plus: dimension mismatch");
    std::vector<int> e(exps_);
    for (int i = 0; i < dim(); ++i) e[i] += o.exps_[i];
    return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::minus_unit(int var) const {
    std::vector<int> e(exps_);
    if (e[var] <= 0) throw Error("MultiIndex::minus_unit: exponent already zero");
    --e[var];
    return MultiIndex(std::move(e));
}

std::string MultiIndex::str() const {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < dim(); ++i) os << (i ? "," : "") << exps_[i];
    os << ")";
    return os.str();
}

bool GradedLexLess::operator()(const MultiIndex& a, const MultiIndex& b) const {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    // Within a degree, lexicographically larger exponent vector comes first.
    return a.exps() > b.exps();
}

Poly::Poly(int dim, TermMap terms) : dim_(dim), terms_(std::move(terms)) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->first.dim() != dim_) throw DimensionMismatch("Poly: term dimension mismatch");
        if (it->second == 0.0)
            it = terms_.erase(it);
        else
            ++it;
    }
}

Poly Poly::constant(int dim, double c) {
    Poly p(dim);
    if (c != 0.0) p.terms_.emplace(MultiIndex::zero(dim), c);
    return p;
}

Poly Poly::monomial(MultiIndex alpha, double c) {
    Poly p(alpha.dim());
    if (c != 0.0) p.terms_.emplace(std::move(alpha), c);
    return p;
}

Poly Poly::variable(int dim, int var) { return monomial(MultiIndex::unit(dim, var)); }

int Poly::degree() const {
    int deg = 0;
    for (const auto& [alpha, c] : terms_) deg = std::max(deg, alpha.degree());
    return deg;
}

double Poly::coeff(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? 0.0 : it->second;
}

void Poly::add_term(const MultiIndex& alpha, double c) {
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(alpha, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

Poly Poly::operator+(const Poly& o) const {
    if (dim_ != o.dim_) throw DimensionMismatch("Poly::+: dimension mismatch");
    Poly r(*this);
    for (const auto& [alpha, c] : o.terms_) r.add_term(alpha, c);
    return r.prune();
}

Poly Poly::operator-(const Poly& o) const {
    if (dim_ != o.dim_) throw DimensionMismatch("Poly::-: dimension mismatch");
    Poly r(*this);
    for (const auto& [alpha, c] : o.terms_) r.add_term(alpha, -c);
    return r.prune();
}

Poly& Poly::operator+=(const Poly& o) {
    *this = *this + o;
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    *this = *this - o;
    return *this;
}

Poly Poly::operator*(const Poly& o) const {
    if (dim_ != o.dim_) throw DimensionMismatch("Poly::*: dimension mismatch");
    Poly r(dim_);
    for (const auto& [a, ca] : terms_)
        for (const auto& [b, cb] : o.terms_) r.add_term(a.plus(b), ca * cb);
    return r.prune();
}

Poly Poly::operator*(double s) const {
    Poly r(dim_);
    if (s == 0.0) return r;
    for (const auto& [alpha, c] : terms_) r.terms_.emplace(alpha, c * s);
    return r;
}

Poly Poly::pow(int k) const {
    Poly r = Poly::constant(dim_, 1.0);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
}

Poly Poly::derivative(int var) const {
    Poly r(dim_);
    for (const auto& [alpha, c] : terms_) {
        if (alpha[var] == 0) continue;
        r.add_term(alpha.minus_unit(var), c * alpha[var]);
    }
    return r;
}

double Poly::eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw DimensionMismatch("Poly::eval: point dimension mismatch");
    double sum = 0.0;
    for (const auto& [alpha, c] : terms_) {
        double term = c;
        for (int i = 0; i < dim_; ++i)
            for (int k = 0; k < alpha[i]; ++k) term *= x[i];
        sum += term;
    }
    return sum;
}

Poly Poly::substitute(int var, double value) const {
    Poly r(dim_);
    for (const auto& [alpha, c] : terms_) {
        double factor = 1.0;
        for (int k = 0; k < alpha[var]; ++k) factor *= value;
        if (factor == 0.0) continue;
        std::vector<int> e = alpha.exps();
        e[var] = 0;
        r.add_term(MultiIndex(std::move(e)), c * factor);
    }
    return r;
}

Poly Poly::embed(int new_dim, int offset) const {
    if (offset + dim_ > new_dim) throw DimensionMismatch("Poly::embed: target too small");
    Poly r(new_dim);
    for (const auto& [alpha, c] : terms_) {
        std::vector<int> e(new_dim, 0);
        for (int i = 0; i < dim_; ++i) e[offset + i] = alpha[i];
        r.terms_.emplace(MultiIndex(std::move(e)), c);
    }
    return r;
}

Poly& Poly::prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) < kPruneTol)
            it = terms_.erase(it);
        else
            ++it;
    }
    return *this;
}

bool Poly::same_terms(const Poly& o, double tol) const {
    Poly diff = *this - o;
    for (const auto& [alpha, c] : diff.terms_)
        if (std::abs(c) > tol) return false;
    return true;
}

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [alpha, c] : terms_) {
        if (!first) os << " + ";
        os << c;
        for (int i = 0; i < dim_; ++i) {
            if (alpha[i] == 0) continue;
            os << "*x" << (i + 1);
            if (alpha[i] > 1) os << "^" << alpha[i];
        }
        first = false;
    }
    return os.str();
}

Poly binomial_shift(const Poly& p) {
    const int d = p.dim();
    Poly r(2 * d);
    for (const auto& [alpha, c] : p.terms()) {
        Poly term = Poly::constant(2 * d, c);
        for (int i = 0; i < d; ++i) {
            Poly xi_plus = Poly::variable(2 * d, i) + Poly::variable(2 * d, d + i);
            term = term * xi_plus.pow(alpha[i]);
        }
        r += term;
    }
    return r;
}

namespace {

void enumerate_degree(int dim, int var, int remaining, std::vector<int>& current,
                      std::vector<MultiIndex>& out) {
    if (var == dim - 1) {
        current[var] = remaining;
        out.emplace_back(current);
        current[var] = 0;
        return;
    }
    // Larger exponent on the earlier variable first (graded lex within a degree).
    for (int e = remaining; e >= 0; --e) {
        current[var] = e;
        enumerate_degree(dim, var + 1, remaining - e, current, out);
    }
    current[var] = 0;
}

} // namespace

GradedBasis::GradedBasis(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1) throw Error("GradedBasis: dimension must be positive");
    if (degree < 0) throw Error("GradedBasis: degree must be nonnegative");
    std::vector<int> current(dim, 0);
    for (int k = 0; k <= degree; ++k) enumerate_degree(dim, 0, k, current, order_);
    for (int i = 0; i < size(); ++i) index_.emplace(order_[i], i);
}

GradedBasis::GradedBasis(int dim, int degree, std::vector<MultiIndex> order)
    : dim_(dim), degree_(degree), order_(std::move(order)) {
    if (order_.empty() || !order_.front().is_zero())
        throw Error("GradedBasis: explicit order must start with the constant monomial");
    for (int i = 0; i < size(); ++i) {
        if (order_[i].dim() != dim_) throw DimensionMismatch("GradedBasis: element dimension mismatch");
        if (!index_.emplace(order_[i], i).second) throw Error("GradedBasis: duplicate basis element");
    }
}

int GradedBasis::index_of(const MultiIndex& alpha) const {
    auto it = index_.find(alpha);
    if (it == index_.end())
        throw DegreeViolation("GradedBasis::index_of: " + alpha.str() + " not in basis of degree " +
                              std::to_string(degree_));
    return it->second;
}

std::vector<double> GradedBasis::eval_monomials(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw DimensionMismatch("GradedBasis::eval_monomials: point dimension mismatch");
    std::vector<double> h(size());
    for (int i = 0; i < size(); ++i) {
        double v = 1.0;
        const MultiIndex& alpha = order_[i];
        for (int j = 0; j < dim_; ++j)
            for (int k = 0; k < alpha[j]; ++k) v *= x[j];
        h[i] = v;
    }
    return h;
}

std::vector<double> to_coordinates(const Poly& p, const GradedBasis& basis) {
    if (p.dim() != basis.dim()) throw DimensionMismatch("to_coordinates: dimension mismatch");
    std::vector<double> v(basis.size(), 0.0);
    for (const auto& [alpha, c] : p.terms()) v[basis.index_of(alpha)] = c;
    return v;
}

Poly from_coordinates(std::span<const double> v, const GradedBasis& basis) {
    if (static_cast<int>(v.size()) != basis.size())
        throw DimensionMismatch("from_coordinates: vector length mismatch");
    Poly p(basis.dim());
    for (int i = 0; i < basis.size(); ++i) p.add_term(basis[i], v[i]);
    return p;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

double multi_factorial(const MultiIndex& alpha) {
    double r = 1.0;
    for (int i = 0; i < alpha.dim(); ++i)
        for (int k = 2; k <= alpha[i]; ++k) r *= k;
    return r;
}

} // namespace pjd
