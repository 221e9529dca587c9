#ifndef PJD_TRANSFORM_HPP
#define PJD_TRANSFORM_HPP

#include <Eigen/Dense>
#include <map>
#include <utility>
#include <vector>

#include "pjd/generator.hpp"
#include "pjd/poly.hpp"

namespace pjd {

/// Power transformation H(X) = all monomials of X up to degree n. The
/// generator of H(X) on polynomials of degree m is represented by the base
/// generator matrix on degree n*m, re-read through the pullback: the induced
/// basis element for exponent alpha (|alpha| <= n*m) is the class of
/// x^alpha on H(E).
struct PowerAugmented {
    GeneratorSpec base;
    int n = 1;
    GradedBasis components;  // GradedBasis(d, n); entries 1.. are the components of H

    /// Matrix representing the induced generator on Pol_m(H(E)).
    GeneratorMatrix matrix(int m) const;

    /// Drift of each H component as a polynomial of degree <= 1 in the
    /// N = C(n+d,d)-1 transformed variables (index 0 of `components` is the
    /// constant and carries no drift).
    std::vector<Poly> drift() const;
};

PowerAugmented power_augment(const GeneratorSpec& spec, int n);

struct PairGradedLexLess {
    bool operator()(const std::pair<MultiIndex, MultiIndex>& a,
                    const std::pair<MultiIndex, MultiIndex>& b) const {
        GradedLexLess less;
        if (a.first != b.first) return less(a.first, b.first);
        return less(a.second, b.second);
    }
};

/// Joint generator of Z = (X, Y) where Y is conditional Levy given the
/// factor X: all coefficients are polynomials in x subject to the degree
/// bounds that make (H(X), Y) polynomial. Mixed jump moments
/// M_{alpha,beta}(x) = int xi^alpha eta^beta nu(x, .) are stored for
/// beta != 0; pure-X moments live in `base`.
struct AugmentedSpec {
    GeneratorSpec base;  // X block, dim d
    int n = 1;           // augmentation degree
    int e = 0;           // Y dimension
    std::vector<Poly> bY;                   // e, deg <= n, polynomials in x
    std::vector<std::vector<Poly>> modAY;   // e x e symmetric, deg <= 2n
    std::vector<std::vector<Poly>> modAXY;  // d x e, deg <= 1+n
    std::map<std::pair<MultiIndex, MultiIndex>, Poly, PairGradedLexLess> mixed_moments;
    int max_mixed_order = 0;   // 0 = infer (joint kernel, or all-zero, or max declared)
    bool joint_kernel = false; // base.kernel streams carry the Y jump loadings (size_y)

    int zdim() const { return base.dim + e; }
};

/// Degree conditions of the conditional-Levy augmentation; throws
/// DegreeViolation / MomentMismatch. Returns the spec for fluent use.
const AugmentedSpec& validate_augmented(const AugmentedSpec& aug);

int mixed_moment_budget(const AugmentedSpec& aug);

/// M_{alpha,beta}(x) for |alpha| + |beta| >= 3 (beta = 0 delegates to the
/// base spec). Throws MissingJumpMoments past the budget.
Poly mixed_moment(const AugmentedSpec& aug, const MultiIndex& alpha, const MultiIndex& beta);

/// Basis of the space V_m = span{ p(x) y^beta : deg p <= n(m - |beta|) },
/// ordered by (|beta|, n|beta| + |alpha|, graded-lex).
struct VmBasis {
    int n = 1, m = 0, d = 1, e = 0;
    std::vector<std::pair<MultiIndex, MultiIndex>> pairs;

    int size() const { return static_cast<int>(pairs.size()); }
    /// The same enumeration as combined monomials in the d+e joint variables.
    GradedBasis joint() const;
};

VmBasis build_vm_basis(int n, int m, int d, int e);

/// Symbolic application of the joint generator to a polynomial in the d+e
/// variables (x, y).
Poly apply_augmented_generator(const AugmentedSpec& aug, const Poly& f);

/// Same operator evaluated through the joint kernel (direct expectation of
/// the shifted polynomial instead of the moment-map route); requires a joint
/// kernel. Used as an independent cross-check of the moment plumbing.
Poly apply_augmented_via_kernel(const AugmentedSpec& aug, const Poly& f);

/// Matrix of the joint generator on the V_m basis. Throws ClosureViolation
/// if any image leaves V_m.
GeneratorMatrix build_augmented_matrix(const AugmentedSpec& aug, int m);

/// Augmentation for the path functionals dY = (P(X) dt, Q(X-) dX) with
/// P in Pol_n, Q in Pol_{n-1}. Mixed jump moments are materialized up to
/// total order `max_order`.
AugmentedSpec functional_augment(const GeneratorSpec& spec, const std::vector<Poly>& P,
                                 const std::vector<std::vector<Poly>>& Q, int max_order = 8);

/// P/Q rows for tracking the quadratic co-variation [X_i, X_j]: the
/// compensator Gamma(x_i, x_j) enters through P and the two stochastic
/// integrals X_j dX_i, X_i dX_j through Q.
struct CovariationComponents {
    Poly compensator;                   // P entry
    std::vector<std::vector<Poly>> q_rows;  // two Q rows
};
CovariationComponents quadratic_covariation_components(const GeneratorSpec& spec, int i, int j);

/// Linear image (X, PY) of the augmented state; pushes every coefficient
/// through P. A rank-deficient P is legal (information is lost, not
/// corrupted); the optional report row records the rank check.
AugmentedSpec project(const AugmentedSpec& aug, const Eigen::MatrixXd& P,
                      CheckRow* rank_warning = nullptr);

} // namespace pjd

#endif
