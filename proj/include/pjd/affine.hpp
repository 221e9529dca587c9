#ifndef PJD_AFFINE_HPP
#define PJD_AFFINE_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "pjd/generator.hpp"

namespace pjd {

/// Signed jump measure component nu_i as a mixture of weighted point masses
/// and Gaussian pieces. Weights may be negative; only the state-combined
/// measure nu_0 + sum x_i nu_i has to be nonnegative on E.
struct AffineJumpComponent {
    struct PointMass {
        double weight = 0.0;
        Eigen::VectorXd location;
    };
    struct GaussianPiece {
        double weight = 0.0;
        Eigen::VectorXd mean;
        Eigen::MatrixXd cov;
    };
    std::vector<PointMass> points;
    std::vector<GaussianPiece> gaussians;

    bool empty() const { return points.empty() && gaussians.empty(); }
};

/// Affine coefficient triple: a(x) = a_0 + sum x_i a_i, likewise b and nu.
struct AffineSpec {
    int dim = 0;
    std::vector<Eigen::MatrixXd> a;         // d+1 symmetric matrices
    std::vector<Eigen::VectorXd> b;         // d+1 vectors
    std::vector<AffineJumpComponent> nu;    // d+1 components
    StateDomain domain;
};

/// PSD of a(x) and nonnegativity of the combined jump measure at sampled
/// states; throws on failure.
const AffineSpec& validate_affine(const AffineSpec& spec);

struct FRValue {
    std::complex<double> F;
    Eigen::VectorXcd R;
};

/// F(u) = 1/2 u' a_0 u + b_0' u + int (e^{u'xi} - 1 - u'xi) nu_0(dxi) and the
/// componentwise R_i(u); jump transforms in closed form per mixture piece.
FRValue eval_FR(const AffineSpec& spec, const Eigen::VectorXcd& u);

struct RiccatiSolution {
    enum class Status { complete, blowup };

    Eigen::VectorXcd u;
    std::vector<double> grid;                       // accepted step times
    std::vector<std::complex<double>> phi;          // phi along the grid
    std::vector<Eigen::VectorXcd> psi;              // psi along the grid
    Status status = Status::complete;
    double blowup_tau = 0.0;                        // meaningful when status == blowup

    std::complex<double> phi_end() const { return phi.back(); }
    const Eigen::VectorXcd& psi_end() const { return psi.back(); }
};

/// Adaptive Dormand-Prince 4(5) integration of phi' = F(psi), psi' = R(psi)
/// from (0, u) to tau = T, relative tolerance 1e-10. Finite-time singularities
/// are reported as a blowup status (norm beyond 1e8 or accepted step below
/// 1e-12), never thrown.
RiccatiSolution solve_riccati(const AffineSpec& spec, const Eigen::VectorXcd& u, double T);

/// Whether the necessary bound Re phi + Re psi' x <= 0 holds at the solution
/// endpoint for state x.
bool re_bound_satisfied(const RiccatiSolution& sol, const Eigen::VectorXd& x, double tol = 1e-10);

/// exp(phi(T-t) + psi(T-t)' x). The solution must be complete and cover the
/// horizon T - t; throws IncompleteSolution after a blow-up.
std::complex<double> affine_transform(const AffineSpec& spec, const RiccatiSolution& sol,
                                      const Eigen::VectorXd& x, double t, double T);

/// Downgrade to the polynomial coefficient description: linear drift polys,
/// modified diffusion with the jump second moments folded in, and jump
/// moment polynomials (affine in x) up to max_order.
GeneratorSpec affine_to_generator(const AffineSpec& spec, int max_order = 8);

/// Raw moment E[X^alpha] of a multivariate Gaussian.
double gaussian_raw_moment(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           const MultiIndex& alpha);

} // namespace pjd

#endif
