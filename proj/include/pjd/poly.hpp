#ifndef PJD_POLY_HPP
#define PJD_POLY_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pjd/errors.hpp"

namespace pjd {

/// Exponent vector of a monomial x^alpha = x_1^{a_1} ... x_d^{a_d}.
/// Degree |alpha| is cached at construction.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exps);
    static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }
    static MultiIndex unit(int dim, int var);

    int dim() const { return static_cast<int>(exps_.size()); }
    int degree() const { return degree_; }
    int operator[](int i) const { return exps_[i]; }
    const std::vector<int>& exps() const { return exps_; }

    bool is_zero() const { return degree_ == 0; }
    MultiIndex plus(const MultiIndex& o) const;
    /// Decrement variable `var` by one; requires exps[var] > 0.
    MultiIndex minus_unit(int var) const;

    bool operator==(const MultiIndex& o) const { return exps_ == o.exps_; }
    bool operator!=(const MultiIndex& o) const { return exps_ != o.exps_; }

    std::string str() const;

private:
    std::vector<int> exps_;
    int degree_ = 0;
};

/// Graded-lexicographic order: lower total degree first; within a degree,
/// lexicographically larger exponent vector first, so that d=2 enumerates
/// 1, x1, x2, x1^2, x1*x2, x2^2, ...
struct GradedLexLess {
    bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

/// Sparse real polynomial on R^d. No zero coefficients are stored; the zero
/// polynomial has an empty term map and degree 0 by convention.
class Poly {
public:
    using TermMap = std::map<MultiIndex, double, GradedLexLess>;

    Poly() = default;
    explicit Poly(int dim) : dim_(dim) {}
    Poly(int dim, TermMap terms);

    static Poly constant(int dim, double c);
    static Poly monomial(MultiIndex alpha, double c = 1.0);
    /// The coordinate polynomial x_var in dimension dim.
    static Poly variable(int dim, int var);

    int dim() const { return dim_; }
    int degree() const;
    bool is_zero() const { return terms_.empty(); }
    const TermMap& terms() const { return terms_; }
    double coeff(const MultiIndex& alpha) const;

    /// In-place add of c * x^alpha, dropping the term if it cancels out.
    void add_term(const MultiIndex& alpha, double c);

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(double s) const;
    Poly operator-() const { return *this * -1.0; }
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);

    Poly pow(int k) const;
    Poly derivative(int var) const;

    double eval(std::span<const double> x) const;

    /// Partial evaluation: substitute x_var = value. Dimension is unchanged;
    /// the variable simply no longer appears.
    Poly substitute(int var, double value) const;

    /// Embed into `new_dim` variables, shifting variable indices by `offset`.
    Poly embed(int new_dim, int offset) const;

    /// Drop terms with |coeff| below the sparsity threshold (1e-14). Applied
    /// automatically after + and *.
    Poly& prune();

    bool same_terms(const Poly& o, double tol = 0.0) const;

    std::string str() const;

    static constexpr double kPruneTol = 1e-14;

private:
    int dim_ = 0;
    TermMap terms_;
};

inline Poly operator*(double s, const Poly& p) { return p * s; }

/// Expansion of p(x + xi) as a polynomial in the 2d variables
/// (x_1..x_d, xi_1..xi_d).
Poly binomial_shift(const Poly& p);

/// Ordered monomial basis. The default construction enumerates all
/// |alpha| <= n in d variables in graded-lex order; an explicit enumeration
/// can be supplied instead (used by the augmentation machinery, whose basis
/// is a graded subset of monomials in the joint variables). The first
/// element is always the constant monomial.
class GradedBasis {
public:
    GradedBasis(int dim, int degree);
    GradedBasis(int dim, int degree, std::vector<MultiIndex> order);

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    int size() const { return static_cast<int>(order_.size()); }
    const std::vector<MultiIndex>& order() const { return order_; }
    const MultiIndex& operator[](int i) const { return order_[i]; }
    /// Position of alpha in the basis; throws DegreeViolation if absent.
    int index_of(const MultiIndex& alpha) const;
    bool contains(const MultiIndex& alpha) const { return index_.count(alpha) > 0; }

    /// Row vector (x^{alpha_0}, ..., x^{alpha_N}) evaluated at x.
    std::vector<double> eval_monomials(std::span<const double> x) const;

private:
    int dim_;
    int degree_;
    std::vector<MultiIndex> order_;
    std::map<MultiIndex, int, GradedLexLess> index_;
};

std::vector<double> to_coordinates(const Poly& p, const GradedBasis& basis);
Poly from_coordinates(std::span<const double> v, const GradedBasis& basis);

/// Binomial coefficient as a double (exact for the small arguments used here).
double binomial(int n, int k);
/// alpha! = prod_i alpha_i!
double multi_factorial(const MultiIndex& alpha);

} // namespace pjd

#endif
