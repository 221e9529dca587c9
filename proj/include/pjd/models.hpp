#ifndef PJD_MODELS_HPP
#define PJD_MODELS_HPP

#include <optional>
#include <string>
#include <vector>

#include "pjd/affine.hpp"
#include "pjd/generator.hpp"
#include "pjd/mc.hpp"
#include "pjd/timechange.hpp"
#include "pjd/transform.hpp"

namespace pjd {

/// SDE-level factor block: linear drift, and a volatility that is either
/// linear in the state (the linear-SDE class) or one of the two classical
/// square-root shapes, which only appear as stand-alone factors.
struct FactorSde {
    enum class VolKind { linear, sqrt1d, jacobi1d };

    int d = 1;
    int m = 1;  // Brownian drivers
    Eigen::VectorXd beta0;
    std::vector<Eigen::VectorXd> beta;   // d drift loadings
    VolKind vol = VolKind::linear;
    Eigen::MatrixXd Gamma0;              // d x m
    std::vector<Eigen::MatrixXd> Gamma;  // d loadings, d x m each
    double sigma = 0.0;                  // sqrt1d / jacobi1d volatility scale
    StateDomain domain;
    Eigen::VectorXd x0;

    /// sigma(x), evaluated pointwise (used by nothing but diagnostics; the
    /// simulator works from the polynomial a(x) = sigma sigma').
    Eigen::MatrixXd vol_at(const Eigen::VectorXd& x) const;
    /// a(x) = sigma(x) sigma(x)' as polynomials.
    std::vector<std::vector<Poly>> diffusion_poly() const;
    std::vector<Poly> drift_poly() const;
};

/// Full asset-pricing model: factor X, excess log returns Y with linear
/// volatility loadings and state-independent jump sizes, deterministic rate.
struct ModelSpec {
    std::string name;
    std::string note;

    FactorSde factor;
    int e = 0;                            // number of assets
    Eigen::MatrixXd GammaY0;              // e x m
    std::vector<Eigen::MatrixXd> GammaY;  // d loadings, e x m each
    std::vector<JumpStream> jumps;        // X loadings + Y sizes per stream
    std::vector<Poly> bY;                 // e drift polys in x (degree <= 2)
    double rate = 0.0;
    bool risk_neutral = false;
    Eigen::VectorXd s0;                   // e spot prices

    std::optional<SubordinatorSpec> subordinator;
    std::optional<AffineSpec> affine_form;

    /// sigma^Y(x) = GammaY0 + sum x_i GammaY_i as polynomials (e x m).
    std::vector<std::vector<Poly>> vol_y_poly() const;
};

const ModelSpec& validate_model(const ModelSpec& model);

/// Coefficient-level factor generator (kernel attached when jumps exist).
GeneratorSpec factor_spec(const ModelSpec& model);

/// Joint conditional-Levy spec of (X, Y) with augmentation degree n = 2.
AugmentedSpec augmented_spec(const ModelSpec& model);

/// Path-level joint model for the Monte Carlo engine.
PathModel to_path_model(const ModelSpec& model);

/// Set b^Y_i = -1/2 (sigma^Y sigma^Y')_ii - sum_j lambda_j E[e^{h_ji u} - 1 - h_ji u]
/// so that discounted prices are local martingales, and flag the model.
/// Throws ExponentialMomentFailure for jump families without the required
/// exponential moment.
ModelSpec risk_neutral_drift(ModelSpec model);

struct AssetRisk {
    double spot_variance = 0.0;
    double volatility = 0.0;
    double vol_of_vol = 0.0;
    double leverage = 0.0;      // clamped to [-1, 1]
    double leverage_raw = 0.0;  // before clamping
};

struct RiskReport {
    std::vector<AssetRisk> assets;
};

/// Spot variance Gamma(y_i, y_i), volatility, vol-of-vol and leverage at a
/// state. Jump-inclusive by default; `diffusive_only` restricts every Gamma
/// to the diffusion part.
RiskReport risk_metrics(const ModelSpec& model, const Eigen::VectorXd& x, bool diffusive_only = false);

/// Market price of risk of one jump stream: a positive constant or an
/// exponential tilt e^{theta' zeta} (state-independent streams only).
struct PsiSpec {
    enum class Kind { constant, exp_tilt };
    Kind kind = Kind::constant;
    double value = 1.0;        // constant
    Eigen::VectorXd theta;     // tilt direction, length d + e
};

/// Coefficient map of the equivalent measure change: diffusion unchanged,
/// drift b - a phi - int (1 - 1/psi) zeta nu, jump measure nu / psi. The
/// martingale property of the density is NOT verified here.
struct MeasureChangeResult {
    std::vector<Poly> drift_q;          // d + e drift polynomials under Q
    std::vector<JumpStream> streams_q;
    std::vector<std::string> notes;
};

MeasureChangeResult measure_change(const ModelSpec& model, const std::vector<Poly>& phi,
                                   const std::vector<PsiSpec>& psi);

/// Preconfigured models: ou, garch, square_root, jacobi, example_5_1,
/// linear_vol_jumps, ou_poisson_timechange, two_point_affine.
ModelSpec model_zoo(const std::string& name);
std::vector<std::string> zoo_names();

} // namespace pjd

#endif
