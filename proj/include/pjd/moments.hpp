#ifndef PJD_MOMENTS_HPP
#define PJD_MOMENTS_HPP

#include <Eigen/Dense>
#include <vector>

#include "pjd/generator.hpp"
#include "pjd/poly.hpp"

namespace pjd {

/// exp(A) by scaling and squaring with the order-13 Pade approximant and
/// 1-norm based scaling. Throws on non-finite input or a norm beyond the
/// scaling budget.
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);

struct MomentQuery {
    Poly p;
    double horizon = 0.0;  // tau = T - t >= 0
    Eigen::VectorXd state;
};

/// Conditional moment of p(X_T) given X_t = x over horizon tau:
/// (1, H(x)') e^{tau G} vec(p). Exactly p(x) at tau = 0.
double conditional_moment(const GeneratorMatrix& gm, const MomentQuery& q);

/// Conditional moments over an ascending grid of horizons. Exponentials of
/// the distinct grid increments are computed once and chained by matrix
/// products across the grid.
std::vector<double> moment_path(const GeneratorMatrix& gm, const Poly& p, const Eigen::VectorXd& x,
                                const std::vector<double>& horizons);

/// The conditional expectation operator as a map on polynomials:
/// E[f(X_{t+tau}) | X_t = .] = from_coordinates(e^{tau G} vec f).
Poly propagate(const GeneratorMatrix& gm, const Poly& f, double tau);

/// E[ prod_k p_k(X_{t_k}) | X_0 = x ] for 0 < t_1 <= ... <= t_n, by backward
/// iteration of the moment formula (tower composition). The basis of gm must
/// be large enough to hold every intermediate product.
double multi_time_moment(const GeneratorMatrix& gm, const std::vector<Poly>& factors,
                         const std::vector<double>& times, const Eigen::VectorXd& x);

} // namespace pjd

#endif
