#ifndef PJD_TIMECHANGE_HPP
#define PJD_TIMECHANGE_HPP

#include <optional>
#include <vector>

#include "pjd/generator.hpp"
#include "pjd/report.hpp"

namespace pjd {

/// Levy subordinator: drift bZ >= 0, finitely many jump atoms, and an
/// optional gamma-kernel continuous part with Levy density
/// weight * zeta^{shape-1} e^{-rate zeta} dzeta on (0, inf).
struct SubordinatorSpec {
    struct Atom {
        double lambda = 0.0;  // rate
        double zeta = 0.0;    // jump size, > 0
    };
    struct GammaPart {
        double weight = 1.0;
        double shape = 1.0;
        double rate = 1.0;
        int nodes = 64;  // Gauss-Laguerre nodes
    };

    double drift = 0.0;
    std::vector<Atom> atoms;
    std::optional<GammaPart> continuous;

    /// E[Z_1] = bZ + sum lambda_j zeta_j + continuous mean.
    double mean_rate() const;
};

const SubordinatorSpec& validate_subordinator(const SubordinatorSpec& sub);

/// Exponential-moment feasibility of the subordination: the Levy measure
/// must integrate e^{zeta lambda*} where lambda* is the largest real part
/// among the eigenvalues of G. Report-valued, never throws.
ValidationReport check_exponential_moments(const SubordinatorSpec& sub, const GeneratorMatrix& gm);

/// G~ = bZ G + sum_j lambda_j (e^{zeta_j G} - I) + gamma quadrature.
/// Throws ExponentialMomentFailure when the feasibility check fails.
GeneratorMatrix subordinate_matrix(const GeneratorMatrix& gm, const SubordinatorSpec& sub);

/// Max entrywise deviation between e^{t G~} and the truncated Poisson
/// mixture sum_k e^{-lambda t} (lambda t)^k / k! e^{(bZ t + k zeta) G}.
/// Requires a single-atom subordinator.
double subordinated_semigroup_check(const GeneratorMatrix& gm, const SubordinatorSpec& sub, double t,
                                    int truncation);

} // namespace pjd

#endif
