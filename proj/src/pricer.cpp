#include "pjd/pricer.hpp"

#include <algorithm>
#include <cmath>

#include "pjd/affine.hpp"
#include "pjd/moments.hpp"
#include "pjd/quadrature.hpp"

namespace pjd {

AuxiliaryMeasure AuxiliaryMeasure::gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
    AuxiliaryMeasure w;
    w.components.push_back({1.0, std::move(mean), std::move(cov)});
    return w;
}

AuxiliaryMeasure AuxiliaryMeasure::gaussian1d(double mean, double variance) {
    if (variance <= 0.0) throw Error("AuxiliaryMeasure: variance must be positive");
    return gaussian(Eigen::VectorXd::Constant(1, mean), Eigen::MatrixXd::Constant(1, 1, variance));
}

AuxiliaryMeasure AuxiliaryMeasure::mixture(std::vector<Component> components) {
    if (components.empty()) throw Error("AuxiliaryMeasure: empty mixture");
    double total = 0.0;
    for (const auto& c : components) {
        if (c.weight <= 0.0) throw Error("AuxiliaryMeasure: component weights must be positive");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error("AuxiliaryMeasure: weights must sum to one");
    AuxiliaryMeasure w;
    w.components = std::move(components);
    return w;
}

double AuxiliaryMeasure::raw_moment(const MultiIndex& alpha) const {
    double m = 0.0;
    for (const auto& c : components) m += c.weight * gaussian_raw_moment(c.mean, c.cov, alpha);
    return m;
}

void AuxiliaryMeasure::matched_moments(Eigen::VectorXd& mean, Eigen::VectorXd& sd) const {
    const int m = dim();
    mean = Eigen::VectorXd::Zero(m);
    sd = Eigen::VectorXd::Zero(m);
    for (const auto& c : components) mean += c.weight * c.mean;
    for (int i = 0; i < m; ++i) {
        double second = 0.0;
        for (const auto& c : components)
            second += c.weight * (c.cov(i, i) + c.mean(i) * c.mean(i));
        sd(i) = std::sqrt(std::max(1e-300, second - mean(i) * mean(i)));
    }
}

namespace {

/// Normalized probabilists' Hermite values Htilde_0..Htilde_K at t, by the
/// recurrence Htilde_k = (t Htilde_{k-1} - sqrt(k-1) Htilde_{k-2}) / sqrt(k).
void hermite_values(int K, double t, std::vector<double>& out) {
    out.resize(K + 1);
    out[0] = 1.0;
    if (K >= 1) out[1] = t;
    for (int k = 2; k <= K; ++k)
        out[k] = (t * out[k - 1] - std::sqrt(k - 1.0) * out[k - 2]) / std::sqrt(static_cast<double>(k));
}

/// Htilde_k((y - mu)/s) as a Poly in one variable (diagnostics only).
Poly hermite_poly(int k, double mu, double s) {
    const Poly t = (Poly::variable(1, 0) - Poly::constant(1, mu)) * (1.0 / s);
    Poly hm2 = Poly::constant(1, 1.0);
    if (k == 0) return hm2;
    Poly hm1 = t;
    for (int j = 2; j <= k; ++j) {
        Poly h = (t * hm1 - hm2 * std::sqrt(j - 1.0)) * (1.0 / std::sqrt(static_cast<double>(j)));
        hm2 = hm1;
        hm1 = h;
    }
    return hm1;
}

} // namespace

Eigen::VectorXd OrthonormalSystem::basis_values(const Eigen::VectorXd& y) const {
    std::vector<std::vector<double>> per_axis(dim);
    for (int i = 0; i < dim; ++i) hermite_values(K, (y(i) - ref_mean(i)) / ref_sd(i), per_axis[i]);
    Eigen::VectorXd values(K + 1);
    for (int j = 0; j <= K; ++j) {
        double v = 1.0;
        for (int i = 0; i < dim; ++i) v *= per_axis[i][index[j][i]];
        values(j) = v;
    }
    return values;
}

double OrthonormalSystem::eval_q(int k, const Eigen::VectorXd& y) const {
    const Eigen::VectorXd b = basis_values(y);
    double v = 0.0;
    for (int j = 0; j <= k; ++j) v += coeff(k, j) * b(j);
    return v;
}

Poly OrthonormalSystem::q(int k) const {
    Poly out(dim);
    for (int j = 0; j <= k; ++j) {
        if (coeff(k, j) == 0.0) continue;
        Poly basis = Poly::constant(dim, 1.0);
        for (int i = 0; i < dim; ++i) {
            if (index[j][i] == 0) continue;
            basis = basis * hermite_poly(index[j][i], ref_mean(i), ref_sd(i)).embed(dim, i);
        }
        out += basis * coeff(k, j);
    }
    return out;
}

OrthonormalSystem build_orthonormal(const AuxiliaryMeasure& w, int K) {
    if (K < 0) throw Error("build_orthonormal: K must be nonnegative");
    const int m = w.dim();
    if (m < 1) throw Error("build_orthonormal: empty auxiliary measure");

    OrthonormalSystem sys;
    sys.dim = m;
    sys.K = K;
    w.matched_moments(sys.ref_mean, sys.ref_sd);
    int deg = 0;
    while (binomial(deg + m, m) < K + 1) ++deg;
    const GradedBasis full(m, deg);
    sys.index.assign(full.order().begin(), full.order().begin() + (K + 1));

    // Gram matrix in the stabilized Hermite basis, by exact per-component
    // Gaussian quadrature (degree 2K integrands, K+2 nodes per axis).
    const bool single_matched = w.components.size() == 1 &&
                                (m == 1 || w.components[0].cov.isDiagonal(0.0));
    Eigen::MatrixXd gram;
    if (single_matched) {
        gram = Eigen::MatrixXd::Identity(K + 1, K + 1);
    } else {
        gram = Eigen::MatrixXd::Zero(K + 1, K + 1);
        const int nodes = K + 2;
        const QuadratureRule gh = gauss_hermite(nodes);
        for (const auto& c : w.components) {
            const Eigen::MatrixXd root = Eigen::LLT<Eigen::MatrixXd>(c.cov).matrixL();
            const double norm = std::pow(M_PI, -0.5 * m);
            std::vector<int> idx(m, 0);
            while (true) {
                double weight = c.weight * norm;
                Eigen::VectorXd t(m);
                for (int i = 0; i < m; ++i) {
                    weight *= gh.weights[idx[i]];
                    t(i) = gh.nodes[idx[i]];
                }
                const Eigen::VectorXd y = c.mean + std::sqrt(2.0) * root * t;
                // basis values at y against the reference
                std::vector<std::vector<double>> per_axis(m);
                for (int i = 0; i < m; ++i)
                    hermite_values(K, (y(i) - sys.ref_mean(i)) / sys.ref_sd(i), per_axis[i]);
                Eigen::VectorXd b(K + 1);
                for (int j = 0; j <= K; ++j) {
                    double v = 1.0;
                    for (int i = 0; i < m; ++i) v *= per_axis[i][sys.index[j][i]];
                    b(j) = v;
                }
                gram.selfadjointView<Eigen::Lower>().rankUpdate(b, weight);
                int i = 0;
                while (i < m && ++idx[i] == nodes) idx[i++] = 0;
                if (i == m) break;
            }
        }
        gram = gram.selfadjointView<Eigen::Lower>();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    sys.gram_condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(sys.gram_condition < 1e12))
        throw IllConditioned("Gram matrix condition " + std::to_string(sys.gram_condition) +
                             " exceeds 1e12; lower the expansion order");
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw IllConditioned("Gram matrix is numerically indefinite; lower the expansion order");
    sys.coeff = llt.matrixL().solve(Eigen::MatrixXd::Identity(K + 1, K + 1));
    return sys;
}

double PayoffFn::operator()(const Eigen::VectorXd& y) const {
    const double s = y(0);
    switch (kind) {
        case Kind::call: return std::max(0.0, scale * std::exp(s) - shift);
        case Kind::put: return std::max(0.0, shift - scale * std::exp(s));
        case Kind::custom: {
            if (table.empty()) throw Error("PayoffFn: empty table");
            if (s <= table.front().first) return table.front().second;
            if (s >= table.back().first) return table.back().second;
            auto hi = std::upper_bound(
                table.begin(), table.end(), s,
                [](double v, const std::pair<double, double>& e) { return v < e.first; });
            auto lo = hi - 1;
            const double t = (s - lo->first) / (hi->first - lo->first);
            return lo->second + t * (hi->second - lo->second);
        }
    }
    return 0.0;
}

std::optional<double> PayoffFn::kink() const {
    if (kind == Kind::custom) return std::nullopt;
    if (shift <= 0.0 || scale <= 0.0) return std::nullopt;
    return std::log(shift / scale);
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double composite_gl(const std::function<double(double)>& g, double a, double b, int panels,
                    const QuadratureRule& rule) {
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        double sum = 0.0;
        for (int i = 0; i < rule.size(); ++i)
            sum += rule.weights[i] * g(lo + 0.5 * width * (rule.nodes[i] + 1.0));
        total += 0.5 * width * sum;
    }
    return total;
}

/// int g(y) phi_{mean,sd}(y) dy with panel cuts at the supplied breakpoints,
/// so kinked payoffs never straddle a panel.
double gaussian_integral_1d(const std::function<double(double)>& g, double mean, double sd,
                            const std::vector<double>& breakpoints, int nodes) {
    const double reach = 14.0;
    std::vector<double> cuts = {mean - reach * sd, mean + reach * sd};
    for (double b : breakpoints)
        if (b > cuts.front() && b < cuts.back()) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    const QuadratureRule rule = gauss_legendre(std::clamp(nodes / 5, 24, 64));
    const double inv = 1.0 / (sd * std::sqrt(2.0 * M_PI));
    auto weighted = [&](double y) {
        const double z = (y - mean) / sd;
        return g(y) * inv * std::exp(-0.5 * z * z);
    };
    double total = 0.0;
    for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        const int panels = std::max(6, static_cast<int>(std::ceil((cuts[c + 1] - cuts[c]) / sd)));
        total += composite_gl(weighted, cuts[c], cuts[c + 1], panels, rule);
    }
    return total;
}

double gaussian_integral_nd(const std::function<double(const Eigen::VectorXd&)>& g,
                            const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, int per_axis) {
    const int m = static_cast<int>(mean.size());
    const QuadratureRule gh = gauss_hermite(per_axis);
    const Eigen::MatrixXd root = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
    const double norm = std::pow(M_PI, -0.5 * m);
    std::vector<int> idx(m, 0);
    double total = 0.0;
    while (true) {
        double weight = norm;
        Eigen::VectorXd t(m);
        for (int i = 0; i < m; ++i) {
            weight *= gh.weights[idx[i]];
            t(i) = gh.nodes[idx[i]];
        }
        total += weight * g(mean + std::sqrt(2.0) * root * t);
        int i = 0;
        while (i < m && ++idx[i] == per_axis) idx[i++] = 0;
        if (i == m) break;
    }
    return total;
}

} // namespace

std::vector<double> payoff_coefficients(const PayoffFn& payoff, const OrthonormalSystem& sys,
                                        const AuxiliaryMeasure& w, int nodes) {
    if (w.dim() != sys.dim) throw DimensionMismatch("payoff_coefficients: dimension mismatch");
    const int K = sys.K;

    std::vector<double> breakpoints;
    if (auto kink = payoff.kink()) breakpoints.push_back(*kink);

    auto integrate_1d = [&](const std::function<double(const Eigen::VectorXd&)>& g, int n) {
        double total = 0.0;
        for (const auto& c : w.components)
            total += c.weight * gaussian_integral_1d(
                                    [&](double y) {
                                        Eigen::VectorXd v(1);
                                        v << y;
                                        return g(v);
                                    },
                                    c.mean(0), std::sqrt(c.cov(0, 0)), breakpoints, n);
        return total;
    };
    auto integrate = [&](const std::function<double(const Eigen::VectorXd&)>& g, int n) {
        if (sys.dim == 1) return integrate_1d(g, n);
        if (sys.dim > 3) throw Error("payoff_coefficients: tensor quadrature supports m <= 3");
        double total = 0.0;
        const int per_axis = std::max(16, n / 8);
        for (const auto& c : w.components)
            total += c.weight * gaussian_integral_nd(g, c.mean, c.cov, per_axis);
        return total;
    };

    // square integrability probe: the F^2 integral must be stable in the
    // node count
    const auto f2 = [&](const Eigen::VectorXd& y) {
        const double v = payoff(y);
        return v * v;
    };
    const double i1 = integrate(f2, nodes);
    const double i2 = integrate(f2, 2 * nodes);
    if (std::abs(i2) > 1.5 * std::abs(i1) + 1e-12)
        throw QuadratureDivergence("payoff fails the square-integrability probe");

    std::vector<double> F(K + 1);
    for (int k = 0; k <= K; ++k)
        F[k] = integrate(
            [&](const Eigen::VectorXd& y) { return payoff(y) * sys.eval_q(k, y); }, nodes);
    return F;
}

namespace {

/// Generator matrix on the basis {x^alpha Htilde_b((y - mu)/s)} over the
/// V_m index set (one return component). Hermite indexing of the return
/// keeps the high-order likelihood coefficients free of the monomial
/// cancellation that wrecks raw moments beyond order ~10.
struct HermiteEngine {
    double mu = 0.0, s = 1.0;
    GradedBasis joint;  // combined (alpha, b) indices
    Eigen::MatrixXd G;
};

HermiteEngine build_hermite_engine(const AugmentedSpec& aug, int m_order, double mu, double s) {
    if (aug.e != 1) throw DimensionMismatch("hermite engine: one return component expected");
    validate_augmented(aug);
    const int d = aug.base.dim;
    const VmBasis vm = build_vm_basis(aug.n, m_order, d, 1);
    GradedBasis joint = vm.joint();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(joint.size(), joint.size());

    auto deposit = [&](int col, const Poly& xpoly, int b) {
        for (const auto& [alpha, c] : xpoly.terms()) {
            std::vector<int> key = alpha.exps();
            key.push_back(b);
            const MultiIndex row(std::move(key));
            if (!joint.contains(row))
                throw ClosureViolation("hermite engine: image leaves V_m at " + row.str());
            G(joint.index_of(row), col) += c;
        }
    };

    for (int col = 0; col < joint.size(); ++col) {
        const MultiIndex& elem = joint[col];
        std::vector<int> xpart(elem.exps().begin(), elem.exps().end() - 1);
        const MultiIndex alpha(std::move(xpart));
        const int b = elem[d];
        const Poly xa = Poly::monomial(alpha);

        // X block acting on x^alpha (drift, modified diffusion, pure-X jumps)
        deposit(col, apply_generator(aug.base, xa), b);

        if (b >= 1) {
            // return drift and the X-return diffusion cross terms
            Poly lower = aug.bY[0] * xa;
            for (int i = 0; i < d; ++i) {
                const Poly dxa = xa.derivative(i);
                if (!dxa.is_zero() && !aug.modAXY[i][0].is_zero()) lower += aug.modAXY[i][0] * dxa;
            }
            deposit(col, lower * (std::sqrt(static_cast<double>(b)) / s), b - 1);
        }
        if (b >= 2)
            deposit(col,
                    aug.modAY[0][0] * xa *
                        (0.5 * std::sqrt(b * (b - 1.0)) / (s * s)),
                    b - 2);

        // jump terms that move the return: order |gamma| + p >= 3, p >= 1
        const int max_p = std::min(b, aug.n * m_order);
        for (int p = 1; p <= max_p; ++p) {
            const double hermite_factor = [&] {
                double f = 1.0;
                for (int j = 0; j < p; ++j) f *= std::sqrt(static_cast<double>(b - j));
                return f;
            }();
            const double scale = hermite_factor / (multi_factorial(MultiIndex({p})) * std::pow(s, p));
            const GradedBasis gammas(d, alpha.degree());
            for (const auto& gamma : gammas.order()) {
                if (gamma.degree() + p < 3) continue;
                Poly dxa = xa;
                for (int i = 0; i < d && !dxa.is_zero(); ++i)
                    for (int k = 0; k < gamma[i] && !dxa.is_zero(); ++k) dxa = dxa.derivative(i);
                if (dxa.is_zero()) continue;
                const Poly moment = mixed_moment(aug, gamma, MultiIndex({p}));
                if (moment.is_zero()) continue;
                deposit(col, dxa * moment * (scale / multi_factorial(gamma)), b - p);
            }
        }
    }
    return {mu, s, std::move(joint), std::move(G)};
}

Eigen::VectorXd engine_initial_row(const HermiteEngine& engine, const Eigen::VectorXd& x0) {
    const int d = static_cast<int>(x0.size());
    std::vector<double> herm;
    int maxb = 0;
    for (const auto& elem : engine.joint.order()) maxb = std::max(maxb, elem[d]);
    hermite_values(maxb, (0.0 - engine.mu) / engine.s, herm);  // Y_0 = 0
    Eigen::VectorXd h(engine.joint.size());
    for (int j = 0; j < engine.joint.size(); ++j) {
        const MultiIndex& elem = engine.joint[j];
        double v = herm[elem[d]];
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < elem[i]; ++k) v *= x0(i);
        h(j) = v;
    }
    return h;
}

} // namespace

std::vector<double> likelihood_coefficients(const AugmentedSpec& projected,
                                            const OrthonormalSystem& sys,
                                            const std::vector<double>& times,
                                            const Eigen::VectorXd& x0) {
    if (projected.e != 1)
        throw DimensionMismatch("likelihood_coefficients: project the model to one return first");
    if (times.empty()) throw Error("likelihood_coefficients: need at least one observation time");
    if (static_cast<int>(times.size()) != sys.dim)
        throw DimensionMismatch("likelihood_coefficients: one observation time per dimension");
    const int d = projected.base.dim;
    std::vector<double> ell(sys.K + 1, 0.0);
    ell[0] = 1.0;  // q_0 integrates to one against any return law
    if (sys.K == 0) return ell;

    if (sys.dim == 1) {
        // Hermite-coordinate moment formula: ell_k = sum_j coeff(k,j) E[b_j].
        int budget = 0;
        for (int j = 0; j <= sys.K; ++j) budget = std::max(budget, sys.index[j].degree());
        const HermiteEngine engine =
            build_hermite_engine(projected, budget, sys.ref_mean(0), sys.ref_sd(0));
        const Eigen::VectorXd h = engine_initial_row(engine, x0);
        const Eigen::VectorXd weights = expm(times[0] * engine.G).transpose() * h;
        Eigen::VectorXd basis_means(sys.K + 1);
        for (int j = 0; j <= sys.K; ++j) {
            std::vector<int> key(d, 0);
            key.push_back(sys.index[j][0]);
            basis_means(j) = weights(engine.joint.index_of(MultiIndex(std::move(key))));
        }
        for (int k = 1; k <= sys.K; ++k) {
            double v = 0.0;
            for (int j = 0; j <= k; ++j) v += sys.coeff(k, j) * basis_means(j);
            ell[k] = v;
        }
        return ell;
    }

    // multi-time observations: iterated moment formula in monomial
    // coordinates (moderate K)
    int budget = 0;
    for (int j = 0; j <= sys.K; ++j) budget = std::max(budget, sys.index[j].degree());
    budget = std::max(budget, 2);
    const GeneratorMatrix am = build_augmented_matrix(projected, budget);
    const int dz = d + 1;
    Eigen::VectorXd z0 = Eigen::VectorXd::Zero(dz);
    z0.head(d) = x0;
    const Poly y = Poly::variable(dz, d);
    for (int k = 1; k <= sys.K; ++k) {
        const Poly q = sys.q(k);
        double value = 0.0;
        for (const auto& [kappa, c] : q.terms()) {
            if (kappa.is_zero()) {
                value += c;
                continue;
            }
            std::vector<Poly> factors;
            for (int i = 0; i < sys.dim; ++i) factors.push_back(y.pow(kappa[i]));
            value += c * multi_time_moment(am, factors, times, z0);
        }
        ell[k] = value;
    }
    return ell;
}

namespace {

AugmentedSpec project_to_asset(const ModelSpec& model, int asset) {
    const AugmentedSpec aug = augmented_spec(model);
    if (asset < 0 || asset >= model.e) throw DimensionMismatch("price: asset index out of range");
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(1, model.e);
    P(0, asset) = 1.0;
    return project(aug, P);
}

} // namespace

double gaussian_call_value(double a, double b, double mean, double variance) {
    const double sd = std::sqrt(variance);
    const double d2 = (mean - std::log(b / a)) / sd;
    return a * std::exp(mean + 0.5 * variance) * normal_cdf(d2 + sd) - b * normal_cdf(d2);
}

PriceResult price(const PricingRequest& request) {
    const ModelSpec& model = request.model;
    validate_model(model);
    if (model.e < 1) throw ConfigError("price: the model has no assets");
    if (!model.risk_neutral) throw ConfigError("price: risk-neutralize the model first");
    if (request.K < 0) throw ConfigError("price: K must be nonnegative");
    if (request.payoff != PricingRequest::PayoffKind::custom && request.strike <= 0.0)
        throw ConfigError("price: strike must be positive");

    const double T = request.horizon;
    std::vector<double> times = request.times.empty() ? std::vector<double>{T} : request.times;
    if (times.back() > T + 1e-12) throw ConfigError("price: observation times exceed the horizon");
    const int m = static_cast<int>(times.size());

    const AugmentedSpec projected = project_to_asset(model, request.asset);
    const int d = model.factor.d;

    PriceResult result;
    if (request.auxiliary) {
        result.auxiliary = *request.auxiliary;
        if (result.auxiliary.dim() != m)
            throw DimensionMismatch("price: auxiliary dimension must match the observation count");
    } else {
        // order-2 moment matching per observation coordinate
        const GeneratorMatrix am2 = build_augmented_matrix(projected, 2);
        Eigen::VectorXd z0 = Eigen::VectorXd::Zero(d + 1);
        z0.head(d) = model.factor.x0;
        const Poly y = Poly::variable(d + 1, d);
        Eigen::VectorXd mean(m);
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            mean(i) = conditional_moment(am2, {y, times[i], z0});
            const double second = conditional_moment(am2, {y * y, times[i], z0});
            cov(i, i) = std::max(1e-12, second - mean(i) * mean(i));
        }
        result.auxiliary = AuxiliaryMeasure::gaussian(mean, cov);
        result.notes.push_back("auto auxiliary: Gaussian matched to order two per coordinate");
    }

    const OrthonormalSystem sys = build_orthonormal(result.auxiliary, request.K);
    result.gram_condition = sys.gram_condition;

    PayoffFn payoff;
    const double s0 = model.s0.size() > 0 ? model.s0(request.asset) : 1.0;
    switch (request.payoff) {
        case PricingRequest::PayoffKind::call:
            payoff.kind = PayoffFn::Kind::call;
            payoff.scale = s0;
            payoff.shift = request.strike * std::exp(-model.rate * T);
            break;
        case PricingRequest::PayoffKind::put:
            payoff.kind = PayoffFn::Kind::put;
            payoff.scale = s0;
            payoff.shift = request.strike * std::exp(-model.rate * T);
            break;
        case PricingRequest::PayoffKind::custom:
            payoff.kind = PayoffFn::Kind::custom;
            payoff.table = request.table;
            break;
    }

    result.ell = likelihood_coefficients(projected, sys, times, model.factor.x0);
    result.F = payoff_coefficients(payoff, sys, result.auxiliary, request.quadrature_nodes);

    result.partial_sums.resize(request.K + 1);
    double running = 0.0;
    for (int k = 0; k <= request.K; ++k) {
        running += result.F[k] * result.ell[k];
        result.partial_sums[k] = running;
    }
    result.value = running;
    result.tail = std::abs(result.F[request.K] * result.ell[request.K]);
    return result;
}

} // namespace pjd
