#ifndef PJD_PRICER_HPP
#define PJD_PRICER_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pjd/models.hpp"
#include "pjd/poly.hpp"

namespace pjd {

/// Gaussian or mixture-of-Gaussians auxiliary measure on R^m with raw
/// moments of every order in closed form.
struct AuxiliaryMeasure {
    struct Component {
        double weight = 1.0;
        Eigen::VectorXd mean;
        Eigen::MatrixXd cov;
    };
    std::vector<Component> components;

    static AuxiliaryMeasure gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov);
    static AuxiliaryMeasure gaussian1d(double mean, double variance);
    static AuxiliaryMeasure mixture(std::vector<Component> components);

    int dim() const { return components.empty() ? 0 : static_cast<int>(components[0].mean.size()); }
    double raw_moment(const MultiIndex& alpha) const;
    /// Moment-matched mean and (diagonal) scale per coordinate.
    void matched_moments(Eigen::VectorXd& mean, Eigen::VectorXd& sd) const;
};

/// Orthonormal polynomials q_0 = 1, ..., q_K under the auxiliary measure.
/// The Gram matrix is assembled and Cholesky-factorized in a stabilized
/// basis of scaled Hermite polynomials (raw monomial Hankel matrices are
/// numerically singular long before K = 20); evaluation goes through the
/// Hermite recurrence, never through monomial coordinates.
struct OrthonormalSystem {
    int dim = 1;
    int K = 0;
    Eigen::VectorXd ref_mean;  // per-coordinate Hermite reference
    Eigen::VectorXd ref_sd;
    std::vector<MultiIndex> index;  // Hermite multi-indices of the basis, graded
    Eigen::MatrixXd coeff;          // (K+1)x(K+1) lower triangular: q_k = sum_j coeff(k,j) b_j
    double gram_condition = 1.0;

    /// Stable evaluation of q_k at a point.
    double eval_q(int k, const Eigen::VectorXd& y) const;
    /// Monomial expansion of q_k (diagnostics and tests; unstable at high K).
    Poly q(int k) const;
    /// Values of the stabilized basis polynomials b_j at y.
    Eigen::VectorXd basis_values(const Eigen::VectorXd& y) const;
};

/// Throws IllConditioned when the stabilized Gram condition exceeds 1e12.
OrthonormalSystem build_orthonormal(const AuxiliaryMeasure& w, int K);

/// Discounted payoff of the observation vector. Calls and puts act on the
/// first coordinate y through (a e^y - b)^+ / (b - a e^y)^+; custom payoffs
/// are tabulated on the first coordinate and interpolated linearly with
/// constant extrapolation.
struct PayoffFn {
    enum class Kind { call, put, custom };
    Kind kind = Kind::call;
    double scale = 1.0;  // a
    double shift = 1.0;  // b
    std::vector<std::pair<double, double>> table;  // custom: (y, F(y)), ascending

    double operator()(const Eigen::VectorXd& y) const;
    std::optional<double> kink() const;
};

/// Fourier coefficients F_k = int F q_k dw. One-dimensional measures use
/// kink-aware composite Gauss-Legendre panels with the Gaussian density in
/// the integrand; higher dimensions use tensorized Gauss-Hermite. Throws
/// QuadratureDivergence when the F^2 integral grows with node count.
std::vector<double> payoff_coefficients(const PayoffFn& payoff, const OrthonormalSystem& sys,
                                        const AuxiliaryMeasure& w, int nodes = 200);

/// Likelihood coefficients ell_k = E[q_k(Y_{t_1}, ..., Y_{t_m})] by the
/// moment formula on the projected augmented model (one return component).
/// Single-time observations run in Hermite coordinates of the return, which
/// keeps high orders stable; ell_0 is pinned to 1.
std::vector<double> likelihood_coefficients(const AugmentedSpec& projected,
                                            const OrthonormalSystem& sys,
                                            const std::vector<double>& times,
                                            const Eigen::VectorXd& x0);

struct PricingRequest {
    ModelSpec model;  // risk-neutral, at least one asset
    int asset = 0;
    enum class PayoffKind { call, put, custom };
    PayoffKind payoff = PayoffKind::call;
    double strike = 1.0;
    std::vector<std::pair<double, double>> table;  // custom payoff of Y
    double horizon = 1.0;
    std::vector<double> times;  // observation times; empty = {horizon}
    int K = 20;
    std::optional<AuxiliaryMeasure> auxiliary;  // nullopt = auto (order-2 match)
    int quadrature_nodes = 200;
};

struct PriceResult {
    double value = 0.0;
    std::vector<double> partial_sums;
    std::vector<double> ell;
    std::vector<double> F;
    double tail = 0.0;  // |F_K ell_K|
    double gram_condition = 1.0;
    AuxiliaryMeasure auxiliary;
    std::vector<std::string> notes;
};

PriceResult price(const PricingRequest& request);

/// int (a e^y - b)^+ dN(mean, var): closed-form reference for the Gaussian
/// call integrals.
double gaussian_call_value(double a, double b, double mean, double variance);

} // namespace pjd

#endif
