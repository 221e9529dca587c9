#include "pjd/timechange.hpp"

#include <cmath>

#include "pjd/moments.hpp"
#include "pjd/quadrature.hpp"

namespace pjd {

double SubordinatorSpec::mean_rate() const {
    double m = drift;
    for (const auto& atom : atoms) m += atom.lambda * atom.zeta;
    // int zeta * weight zeta^{shape-1} e^{-rate zeta} dzeta = weight Gamma(shape+1) / rate^{shape+1}
    if (continuous)
        m += continuous->weight * std::tgamma(continuous->shape + 1.0) /
             std::pow(continuous->rate, continuous->shape + 1.0);
    return m;
}

const SubordinatorSpec& validate_subordinator(const SubordinatorSpec& sub) {
    if (sub.drift < 0.0) throw Error("SubordinatorSpec: drift must be nonnegative");
    for (const auto& atom : sub.atoms) {
        if (atom.lambda <= 0.0) throw Error("SubordinatorSpec: atom rate must be positive");
        if (atom.zeta <= 0.0) throw Error("SubordinatorSpec: atom size must be positive");
    }
    if (sub.continuous) {
        if (sub.continuous->weight <= 0.0) throw Error("SubordinatorSpec: gamma weight must be positive");
        if (sub.continuous->shape <= 0.0) throw Error("SubordinatorSpec: gamma shape must be positive");
        if (sub.continuous->rate <= 0.0) throw Error("SubordinatorSpec: gamma rate must be positive");
        if (sub.continuous->nodes < 1) throw Error("SubordinatorSpec: need at least one quadrature node");
    }
    return sub;
}

namespace {

double max_real_eigenvalue(const GeneratorMatrix& gm) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(gm.G, false);
    return es.eigenvalues().real().maxCoeff();
}

} // namespace

ValidationReport check_exponential_moments(const SubordinatorSpec& sub, const GeneratorMatrix& gm) {
    ValidationReport report;
    const double lambda_star = max_real_eigenvalue(gm);
    report.add("largest eigenvalue real part", true, -lambda_star,
               "lambda* = " + std::to_string(lambda_star));
    report.add("atoms", true, 0.0, "finite sums always admit exponential moments");
    if (sub.continuous) {
        const double margin = sub.continuous->rate - lambda_star;
        report.add("gamma part exponential moment", margin > 0.0, margin,
                   margin > 0.0 ? "" : "e^{zeta lambda*} beats the e^{-rate zeta} tail");
    }
    return report;
}

GeneratorMatrix subordinate_matrix(const GeneratorMatrix& gm, const SubordinatorSpec& sub) {
    validate_subordinator(sub);
    const ValidationReport feasible = check_exponential_moments(sub, gm);
    if (!feasible.all_pass())
        throw ExponentialMomentFailure("subordinator fails the exponential moment condition");

    const int n = gm.size();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd Gt = sub.drift * gm.G;
    for (const auto& atom : sub.atoms) Gt += atom.lambda * (expm(atom.zeta * gm.G) - I);
    if (sub.continuous) {
        const auto& g = *sub.continuous;
        const QuadratureRule rule = gauss_laguerre(g.nodes, g.shape - 1.0);
        const double scale = g.weight / std::pow(g.rate, g.shape);
        for (int i = 0; i < rule.size(); ++i) {
            const double zeta = rule.nodes[i] / g.rate;
            Gt += scale * rule.weights[i] * (expm(zeta * gm.G) - I);
        }
    }
    return {gm.basis, std::move(Gt)};
}

double subordinated_semigroup_check(const GeneratorMatrix& gm, const SubordinatorSpec& sub, double t,
                                    int truncation) {
    if (sub.atoms.size() != 1 || sub.continuous)
        throw Error("subordinated_semigroup_check needs a single-atom subordinator");
    if (t < 0.0) throw Error("subordinated_semigroup_check: negative time");
    const GeneratorMatrix sb = subordinate_matrix(gm, sub);
    const Eigen::MatrixXd lhs = expm(t * sb.G);

    const double lambda = sub.atoms[0].lambda, zeta = sub.atoms[0].zeta;
    const Eigen::MatrixXd atom_step = expm(zeta * gm.G);
    Eigen::MatrixXd term = expm(sub.drift * t * gm.G);  // identity when bZ = 0
    Eigen::MatrixXd mixture = Eigen::MatrixXd::Zero(gm.size(), gm.size());
    double weight = std::exp(-lambda * t);
    for (int k = 0; k <= truncation; ++k) {
        mixture += weight * term;
        term = term * atom_step;
        weight *= lambda * t / (k + 1);
    }
    return (lhs - mixture).cwiseAbs().maxCoeff();
}

} // namespace pjd
