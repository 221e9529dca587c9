#include "pjd/models.hpp"

#include <cmath>

namespace pjd {

Eigen::MatrixXd FactorSde::vol_at(const Eigen::VectorXd& x) const {
    switch (vol) {
        case VolKind::linear: {
            Eigen::MatrixXd s = Gamma0;
            for (int i = 0; i < d; ++i) s += x(i) * Gamma[i];
            return s;
        }
        case VolKind::sqrt1d:
            return Eigen::MatrixXd::Constant(1, 1, sigma * std::sqrt(std::max(0.0, x(0))));
        case VolKind::jacobi1d:
            return Eigen::MatrixXd::Constant(1, 1,
                                             sigma * std::sqrt(std::max(0.0, x(0) * (1.0 - x(0)))));
    }
    return {};
}

std::vector<std::vector<Poly>> FactorSde::diffusion_poly() const {
    std::vector<std::vector<Poly>> a(d, std::vector<Poly>(d, Poly(d)));
    switch (vol) {
        case VolKind::linear: {
            // rows of sigma(x) as polynomial vectors
            std::vector<std::vector<Poly>> rows(d, std::vector<Poly>(m, Poly(d)));
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < m; ++c) {
                    Poly entry = Poly::constant(d, Gamma0(r, c));
                    for (int i = 0; i < d; ++i) entry.add_term(MultiIndex::unit(d, i), Gamma[i](r, c));
                    rows[r][c] = entry.prune();
                }
            for (int r = 0; r < d; ++r)
                for (int q = 0; q < d; ++q) {
                    Poly sum(d);
                    for (int c = 0; c < m; ++c) sum += rows[r][c] * rows[q][c];
                    a[r][q] = sum;
                }
            break;
        }
        case VolKind::sqrt1d:
            a[0][0] = Poly::variable(1, 0) * (sigma * sigma);
            break;
        case VolKind::jacobi1d:
            a[0][0] = Poly::variable(1, 0) * (sigma * sigma) -
                      Poly::monomial(MultiIndex({2}), sigma * sigma);
            break;
    }
    return a;
}

std::vector<Poly> FactorSde::drift_poly() const {
    std::vector<Poly> b(d, Poly(d));
    for (int r = 0; r < d; ++r) {
        Poly entry = Poly::constant(d, beta0(r));
        for (int i = 0; i < d; ++i) entry.add_term(MultiIndex::unit(d, i), beta[i](r));
        b[r] = entry.prune();
    }
    return b;
}

std::vector<std::vector<Poly>> ModelSpec::vol_y_poly() const {
    const int d = factor.d, m = factor.m;
    std::vector<std::vector<Poly>> rows(e, std::vector<Poly>(m, Poly(d)));
    for (int r = 0; r < e; ++r)
        for (int c = 0; c < m; ++c) {
            Poly entry = Poly::constant(d, GammaY0(r, c));
            for (int i = 0; i < d; ++i) entry.add_term(MultiIndex::unit(d, i), GammaY[i](r, c));
            rows[r][c] = entry.prune();
        }
    return rows;
}

const ModelSpec& validate_model(const ModelSpec& model) {
    const int d = model.factor.d, m = model.factor.m, e = model.e;
    if (d < 1 || m < 1) throw Error("ModelSpec: factor needs positive dimensions");
    if (model.factor.beta0.size() != d || static_cast<int>(model.factor.beta.size()) != d)
        throw DimensionMismatch("ModelSpec: factor drift loadings have wrong shape");
    if (model.factor.vol == FactorSde::VolKind::linear) {
        if (model.factor.Gamma0.rows() != d || model.factor.Gamma0.cols() != m ||
            static_cast<int>(model.factor.Gamma.size()) != d)
            throw DimensionMismatch("ModelSpec: factor volatility loadings have wrong shape");
    } else if (d != 1 || m != 1) {
        throw DimensionMismatch("ModelSpec: square-root volatilities are one-dimensional");
    }
    if (model.factor.domain.dim() != d) throw DimensionMismatch("ModelSpec: domain dimension mismatch");
    if (model.factor.x0.size() != d) throw DimensionMismatch("ModelSpec: x0 dimension mismatch");
    if (e > 0) {
        if (model.factor.vol != FactorSde::VolKind::linear)
            throw Error("ModelSpec: assets require a linear-volatility factor");
        if (model.GammaY0.rows() != e || model.GammaY0.cols() != m ||
            static_cast<int>(model.GammaY.size()) != d)
            throw DimensionMismatch("ModelSpec: asset volatility loadings have wrong shape");
        if (!model.bY.empty() && static_cast<int>(model.bY.size()) != e)
            throw DimensionMismatch("ModelSpec: bY must have one entry per asset");
        for (const auto& b : model.bY)
            if (b.degree() > 2)
                throw DegreeViolation("ModelSpec: bY degree " + std::to_string(b.degree()) + " > 2");
        if (model.s0.size() != 0 && model.s0.size() != e)
            throw DimensionMismatch("ModelSpec: s0 must have one entry per asset");
    }
    for (const auto& stream : model.jumps) {
        if (stream.dim() != d) throw DimensionMismatch("ModelSpec: stream loading dimension mismatch");
        if (stream.ydim() != 0 && stream.ydim() != e)
            throw DimensionMismatch("ModelSpec: stream Y size dimension mismatch");
        if (stream.lambda <= 0.0) throw Error("ModelSpec: stream intensity must be positive");
    }
    return model;
}

GeneratorSpec factor_spec(const ModelSpec& model) {
    validate_model(model);
    // Models carried in affine form reduce through the affine coefficients.
    if (model.affine_form) return affine_to_generator(*model.affine_form);
    const int d = model.factor.d;
    GeneratorSpec s;
    s.dim = d;
    s.drift = model.factor.drift_poly();
    s.mod_diffusion = model.factor.diffusion_poly();
    s.domain = model.factor.domain;
    if (!model.jumps.empty()) {
        s.kernel = MarkJumpSpec{model.jumps};
        const auto second = kernel_second_moments(*s.kernel, d);
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) s.mod_diffusion[i][k] += second[i][k];
    }
    return s;
}

AugmentedSpec augmented_spec(const ModelSpec& model) {
    validate_model(model);
    const int d = model.factor.d, e = model.e, m = model.factor.m;
    AugmentedSpec aug;
    aug.base = factor_spec(model);
    aug.n = 2;
    aug.e = e;
    aug.bY = model.bY.empty() ? std::vector<Poly>(e, Poly(d)) : model.bY;
    const auto sy = model.vol_y_poly();
    // sigma^X rows as polys (linear factor; square-root factors carry e = 0)
    std::vector<std::vector<Poly>> sx(d, std::vector<Poly>(m, Poly(d)));
    if (e > 0) {
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < m; ++c) {
                Poly entry = Poly::constant(d, model.factor.Gamma0(r, c));
                for (int i = 0; i < d; ++i)
                    entry.add_term(MultiIndex::unit(d, i), model.factor.Gamma[i](r, c));
                sx[r][c] = entry.prune();
            }
    }
    aug.modAY.assign(e, std::vector<Poly>(e, Poly(d)));
    for (int l = 0; l < e; ++l)
        for (int r = 0; r < e; ++r) {
            Poly sum(d);
            for (int c = 0; c < m; ++c) sum += sy[l][c] * sy[r][c];
            aug.modAY[l][r] = sum;
        }
    aug.modAXY.assign(d, std::vector<Poly>(e, Poly(d)));
    for (int i = 0; i < d; ++i)
        for (int l = 0; l < e; ++l) {
            Poly sum(d);
            for (int c = 0; c < m; ++c) sum += sx[i][c] * sy[l][c];
            aug.modAXY[i][l] = sum;
        }
    if (!model.jumps.empty()) {
        aug.joint_kernel = true;
        for (auto& stream : aug.base.kernel->streams)
            if (stream.ydim() == 0) stream.size_y = Eigen::VectorXd::Zero(e);
        // fold the jump second moments into the modified characteristics
        for (const auto& stream : aug.base.kernel->streams) {
            const double m2 = stream.lambda * stream.marks.raw_moment(2);
            for (int l = 0; l < e; ++l)
                for (int r = 0; r < e; ++r)
                    aug.modAY[l][r] += Poly::constant(d, stream.size_y(l) * stream.size_y(r) * m2);
            for (int i = 0; i < d; ++i)
                for (int l = 0; l < e; ++l)
                    aug.modAXY[i][l] += stream.size_poly(i) * (stream.size_y(l) * m2);
        }
    }
    return aug;
}

PathModel to_path_model(const ModelSpec& model) {
    const AugmentedSpec aug = augmented_spec(model);
    Eigen::VectorXd z0 = Eigen::VectorXd::Zero(aug.zdim());
    z0.head(model.factor.d) = model.factor.x0;
    return path_model(aug, z0);
}

ModelSpec risk_neutral_drift(ModelSpec model) {
    validate_model(model);
    const int d = model.factor.d, e = model.e, m = model.factor.m;
    if (e == 0) throw Error("risk_neutral_drift: model has no assets");
    const auto sy = model.vol_y_poly();
    std::vector<Poly> bY(e, Poly(d));
    for (int i = 0; i < e; ++i) {
        Poly half_var(d);
        for (int c = 0; c < m; ++c) half_var += sy[i][c] * sy[i][c];
        Poly b = half_var * -0.5;
        for (const auto& stream : model.jumps) {
            const double h = stream.ydim() > 0 ? stream.size_y(i) : 0.0;
            if (h == 0.0) continue;
            if (!stream.marks.has_exp_moment(h))
                throw ExponentialMomentFailure("jump stream lacks the exponential moment needed for "
                                               "risk-neutralization of asset " + std::to_string(i));
            const double correction =
                stream.marks.exp_moment(h) - 1.0 - h * stream.marks.raw_moment(1);
            b -= Poly::constant(d, stream.lambda * correction);
        }
        bY[i] = b;
    }
    model.bY = std::move(bY);
    model.risk_neutral = true;
    return model;
}

namespace {

/// Strip every jump contribution from an augmented spec (diffusive-only
/// risk metrics).
AugmentedSpec diffusive_part(const AugmentedSpec& aug) {
    AugmentedSpec out = aug;
    if (aug.base.kernel) {
        const auto second = kernel_second_moments(*aug.base.kernel, aug.base.dim);
        for (int i = 0; i < aug.base.dim; ++i)
            for (int k = 0; k < aug.base.dim; ++k) out.base.mod_diffusion[i][k] -= second[i][k];
        for (const auto& stream : aug.base.kernel->streams) {
            const double m2 = stream.lambda * stream.marks.raw_moment(2);
            for (int l = 0; l < aug.e; ++l) {
                for (int r = 0; r < aug.e; ++r)
                    out.modAY[l][r] -= Poly::constant(aug.base.dim,
                                                      stream.size_y(l) * stream.size_y(r) * m2);
                for (int i = 0; i < aug.base.dim; ++i)
                    out.modAXY[i][l] -= stream.size_poly(i) * (stream.size_y(l) * m2);
            }
        }
    }
    out.base.kernel.reset();
    out.base.jump_moments.clear();
    out.base.max_jump_order = 0;
    out.mixed_moments.clear();
    out.max_mixed_order = 0;
    out.joint_kernel = false;
    return out;
}

Poly embed_joint(const Poly& p, int dz) { return p.embed(dz, 0); }

} // namespace

RiskReport risk_metrics(const ModelSpec& model, const Eigen::VectorXd& x, bool diffusive_only) {
    AugmentedSpec aug = augmented_spec(model);
    if (diffusive_only) aug = diffusive_part(aug);
    const int d = model.factor.d, e = model.e, dz = d + e;
    const std::span<const double> xs(x.data(), x.size());
    RiskReport report;
    for (int i = 0; i < e; ++i) {
        AssetRisk risk;
        const Poly v = aug.modAY[i][i];  // Gamma(y_i, y_i) as a polynomial in x
        risk.spot_variance = v.eval(xs);
        if (risk.spot_variance <= 1e-14)
            throw DegenerateVariance("spot variance of asset " + std::to_string(i) +
                                     " vanishes at the requested state");
        risk.volatility = std::sqrt(risk.spot_variance);

        // vol-of-vol: Gamma(vol_i, vol_i) of the factor process at x
        const auto vol_fn = [&v](const Eigen::VectorXd& p) {
            return std::sqrt(std::max(0.0, v.eval(std::span<const double>(p.data(), p.size()))));
        };
        const double gvv = gamma_pointwise(aug.base, vol_fn, vol_fn, x);
        risk.vol_of_vol = std::sqrt(std::max(0.0, gvv));

        // leverage: Gamma(y_i, v) / (sqrt(v) sqrt(Gamma(v, v)))
        const Poly yi = Poly::variable(dz, d + i);
        const Poly vz = embed_joint(v, dz);
        const Poly gamma_yv = apply_augmented_generator(aug, yi * vz) -
                              yi * apply_augmented_generator(aug, vz) -
                              vz * apply_augmented_generator(aug, yi);
        const Poly gamma_vv = carre_du_champ(aug.base, v, v);
        Eigen::VectorXd z = Eigen::VectorXd::Zero(dz);
        z.head(d) = x;
        const double num = gamma_yv.eval(std::span<const double>(z.data(), dz));
        const double den_sq = gamma_vv.eval(xs);
        if (den_sq <= 1e-14) {
            // deterministic spot variance: no leverage channel
            risk.leverage_raw = 0.0;
            risk.leverage = 0.0;
        } else {
            risk.leverage_raw = num / (risk.volatility * std::sqrt(den_sq));
            risk.leverage = std::clamp(risk.leverage_raw, -1.0, 1.0);
        }
        report.assets.push_back(risk);
    }
    return report;
}

MeasureChangeResult measure_change(const ModelSpec& model, const std::vector<Poly>& phi,
                                   const std::vector<PsiSpec>& psi) {
    validate_model(model);
    const int d = model.factor.d, e = model.e, dz = d + e;
    if (static_cast<int>(phi.size()) != dz)
        throw DimensionMismatch("measure_change: phi needs d + e components");
    if (psi.size() != model.jumps.size())
        throw DimensionMismatch("measure_change: one psi per jump stream");

    const AugmentedSpec aug = augmented_spec(model);
    // joint pure-diffusion matrix (jump moments removed)
    const AugmentedSpec diff = diffusive_part(aug);
    std::vector<std::vector<Poly>> a(dz, std::vector<Poly>(dz, Poly(d)));
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) a[i][k] = diff.base.mod_diffusion[i][k];
    for (int i = 0; i < d; ++i)
        for (int l = 0; l < e; ++l) a[i][d + l] = a[d + l][i] = diff.modAXY[i][l];
    for (int l = 0; l < e; ++l)
        for (int r = 0; r < e; ++r) a[d + l][d + r] = diff.modAY[l][r];

    MeasureChangeResult out;
    out.drift_q.assign(dz, Poly(d));
    std::vector<Poly> drift_p = model.factor.drift_poly();
    for (const auto& b : (model.bY.empty() ? std::vector<Poly>(e, Poly(d)) : model.bY))
        drift_p.push_back(b);

    for (int i = 0; i < dz; ++i) {
        Poly b = drift_p[i];
        for (int k = 0; k < dz; ++k)
            if (!phi[k].is_zero() && !a[i][k].is_zero()) b -= a[i][k] * phi[k];
        out.drift_q[i] = b;
    }

    for (size_t j = 0; j < model.jumps.size(); ++j) {
        const JumpStream& stream = model.jumps[j];
        JumpStream q = stream;
        const auto& p = psi[j];
        // combined (X, Y) loading of the stream, as polynomials in x
        auto loading = [&](int comp) -> Poly {
            if (comp < d) return stream.size_poly(comp);
            return Poly::constant(d, stream.ydim() > 0 ? stream.size_y(comp - d) : 0.0);
        };
        if (p.kind == PsiSpec::Kind::constant) {
            if (p.value <= 0.0) throw NonpositivePsi("constant psi must be positive");
            q.lambda = stream.lambda / p.value;
            const double factor = (1.0 - 1.0 / p.value) * stream.lambda * stream.marks.raw_moment(1);
            for (int i = 0; i < dz; ++i) out.drift_q[i] -= loading(i) * factor;
        } else {
            if (stream.state_dependent())
                throw UnsupportedMarkFamily(
                    "exponential tilts are limited to state-independent jump streams");
            if (p.theta.size() != dz)
                throw DimensionMismatch("measure_change: tilt direction needs d + e components");
            double c = 0.0;
            for (int i = 0; i < d; ++i) c += p.theta(i) * stream.size0(i);
            for (int l = 0; l < e; ++l)
                c += p.theta(d + l) * (stream.ydim() > 0 ? stream.size_y(l) : 0.0);
            const auto [mass, tilted] = stream.marks.tilt(c);
            q.lambda = stream.lambda * mass;
            q.marks = tilted;
            // int (1 - e^{-c u}) u W nu = lambda W (E[u] - E[u e^{-c u}])
            const double factor =
                stream.lambda * (stream.marks.raw_moment(1) - stream.marks.mean_exp_moment(-c));
            for (int i = 0; i < dz; ++i) out.drift_q[i] -= loading(i) * factor;
        }
        out.streams_q.push_back(std::move(q));
    }
    out.notes.push_back("coefficient map only: density martingale property not verified");
    out.notes.push_back("diffusion matrix unchanged under the equivalent measure");
    return out;
}

namespace {

ModelSpec make_factor_only(std::string name, FactorSde factor, std::string note) {
    ModelSpec m;
    m.name = std::move(name);
    m.note = std::move(note);
    m.factor = std::move(factor);
    return m;
}

FactorSde linear_factor_1d(double kappa, double theta, double g0, double g1, double x0,
                           StateDomain domain) {
    FactorSde f;
    f.d = 1;
    f.m = 1;
    f.beta0 = Eigen::VectorXd::Constant(1, kappa * theta);
    f.beta = {Eigen::VectorXd::Constant(1, -kappa)};
    f.Gamma0 = Eigen::MatrixXd::Constant(1, 1, g0);
    f.Gamma = {Eigen::MatrixXd::Constant(1, 1, g1)};
    f.domain = std::move(domain);
    f.x0 = Eigen::VectorXd::Constant(1, x0);
    return f;
}

} // namespace

std::vector<std::string> zoo_names() {
    return {"ou",          "garch",          "square_root",           "jacobi",
            "example_5_1", "linear_vol_jumps", "ou_poisson_timechange", "two_point_affine"};
}

ModelSpec model_zoo(const std::string& name) {
    if (name == "ou") {
        // dX = kappa (theta - X) dt + sigma dW
        ModelSpec m = make_factor_only(
            "ou", linear_factor_1d(1.0, 0.5, 0.4, 0.0, 1.0, StateDomain::all(1)),
            "mean-reverting Gaussian factor with constant volatility");
        AffineSpec a;
        a.dim = 1;
        a.a = {Eigen::MatrixXd::Constant(1, 1, 0.16), Eigen::MatrixXd::Zero(1, 1)};
        a.b = {Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, -1.0)};
        a.nu = {AffineJumpComponent{}, AffineJumpComponent{}};
        a.domain = m.factor.domain;
        m.affine_form = a;
        return m;
    }
    if (name == "garch") {
        // dX = kappa (theta - X) dt + sqrt(2 kappa) X dW on (0, inf)
        const double kappa = 0.5, theta = 0.4;
        return make_factor_only(
            "garch",
            linear_factor_1d(kappa, theta, 0.0, std::sqrt(2.0 * kappa), 0.4,
                             StateDomain::positive_orthant(1)),
            "mean-reverting factor with volatility proportional to the state");
    }
    if (name == "square_root") {
        // dX = (b + beta X) dt + sigma sqrt(X) dW on (0, inf)
        FactorSde f;
        f.d = 1;
        f.m = 1;
        f.beta0 = Eigen::VectorXd::Constant(1, 0.5);
        f.beta = {Eigen::VectorXd::Constant(1, -1.0)};
        f.vol = FactorSde::VolKind::sqrt1d;
        f.sigma = 0.5;
        f.domain = StateDomain::positive_orthant(1);
        f.x0 = Eigen::VectorXd::Constant(1, 0.5);
        return make_factor_only("square_root", std::move(f),
                                "square-root diffusion with affine drift");
    }
    if (name == "jacobi") {
        // dX = kappa (theta - X) dt + sigma sqrt(X (1 - X)) dW on (0, 1)
        FactorSde f;
        f.d = 1;
        f.m = 1;
        f.beta0 = Eigen::VectorXd::Constant(1, 0.5);
        f.beta = {Eigen::VectorXd::Constant(1, -1.0)};
        f.vol = FactorSde::VolKind::jacobi1d;
        f.sigma = 0.7;
        f.domain = StateDomain::box(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
        f.x0 = Eigen::VectorXd::Constant(1, 0.5);
        return make_factor_only("jacobi", std::move(f), "bounded diffusion on the unit interval");
    }
    if (name == "example_5_1") {
        // dX = kappa (theta - X) dt + gamma X dW1, dY = -X^2/2 dt + X dW2
        ModelSpec m;
        m.name = "example_5_1";
        m.note = "stochastic volatility model with independent drivers and quadratic return variance";
        // vol-of-vol kept moderate: the expansion's likelihood ratio must
        // stay square-integrable against the Gaussian auxiliary
        const double kappa = 2.0, theta = 0.2, gamma = 0.3;
        m.factor = linear_factor_1d(kappa, theta, 0.0, gamma, theta, StateDomain::positive_orthant(1));
        m.factor.m = 2;
        m.factor.Gamma0 = Eigen::MatrixXd::Zero(1, 2);
        m.factor.Gamma = {(Eigen::MatrixXd(1, 2) << gamma, 0.0).finished()};
        m.e = 1;
        m.GammaY0 = Eigen::MatrixXd::Zero(1, 2);
        m.GammaY = {(Eigen::MatrixXd(1, 2) << 0.0, 1.0).finished()};
        m.s0 = Eigen::VectorXd::Ones(1);
        return risk_neutral_drift(std::move(m));
    }
    if (name == "linear_vol_jumps") {
        // linear-volatility asset with an isolated return jump stream and a
        // simultaneous factor/return stream
        ModelSpec m;
        m.name = "linear_vol_jumps";
        m.note = "linear volatility with isolated and simultaneous jump streams";
        const double kappa = 3.0, theta = 0.25, gamma = 0.4;
        m.factor = linear_factor_1d(kappa, theta, 0.0, gamma, theta, StateDomain::positive_orthant(1));
        m.factor.m = 2;
        m.factor.Gamma0 = Eigen::MatrixXd::Zero(1, 2);
        m.factor.Gamma = {(Eigen::MatrixXd(1, 2) << gamma, 0.0).finished()};
        m.e = 1;
        m.GammaY0 = Eigen::MatrixXd::Zero(1, 2);
        m.GammaY = {(Eigen::MatrixXd(1, 2) << 0.25, 0.35).finished()};
        m.rate = 0.02;
        m.s0 = Eigen::VectorXd::Ones(1);
        JumpStream isolated_y;  // return jumps only
        isolated_y.lambda = 0.3;
        isolated_y.marks = MarkDist::gaussian(-0.05, 0.1);
        isolated_y.size0 = Eigen::VectorXd::Zero(1);
        isolated_y.size_y = Eigen::VectorXd::Ones(1);
        JumpStream simultaneous;  // co-moving factor and return jump
        simultaneous.lambda = 0.2;
        simultaneous.marks = MarkDist::point_masses({1.0, 2.0}, {0.5, 0.5});
        simultaneous.size0 = Eigen::VectorXd::Constant(1, 0.1);
        simultaneous.size_y = Eigen::VectorXd::Constant(1, -0.08);
        m.jumps = {isolated_y, simultaneous};
        return risk_neutral_drift(std::move(m));
    }
    if (name == "ou_poisson_timechange") {
        ModelSpec m = make_factor_only(
            "ou_poisson_timechange", linear_factor_1d(1.0, 0.0, 1.0, 0.0, 1.0, StateDomain::all(1)),
            "Gaussian factor run on an independent Poisson clock");
        SubordinatorSpec sub;
        sub.atoms = {{1.0, 1.0}};
        m.subordinator = sub;
        return m;
    }
    if (name == "two_point_affine") {
        ModelSpec m = make_factor_only(
            "two_point_affine", linear_factor_1d(0.0, 0.0, 0.0, 0.0, 1.0,
                                                 StateDomain::box(Eigen::VectorXd::Zero(1),
                                                                  Eigen::VectorXd::Ones(1))),
            "absorption at zero from state one with unit intensity");
        const double lambda = 1.0;
        AffineSpec a;
        a.dim = 1;
        a.a = {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(1, 1)};
        a.b = {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, -lambda)};
        AffineJumpComponent nu1;
        nu1.points.push_back({lambda, Eigen::VectorXd::Constant(1, -1.0)});
        a.nu = {AffineJumpComponent{}, nu1};
        a.domain = m.factor.domain;
        m.affine_form = a;
        return m;
    }
    throw ConfigError("unknown zoo model: " + name);
}

} // namespace pjd
