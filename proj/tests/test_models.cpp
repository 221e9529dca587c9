#include "doctest.h"

#include <cmath>

#include "pjd/models.hpp"
#include "pjd/moments.hpp"

using namespace pjd;

namespace {

double abs_z(double a, double b, double se) { return std::abs(a - b) / std::max(se, 1e-300); }

} // namespace

TEST_CASE("zoo models validate and build") {
    for (const auto& name : zoo_names()) {
        const ModelSpec m = model_zoo(name);
        CHECK(m.name == name);
        CHECK_NOTHROW(validate_model(m));
        CHECK_NOTHROW(validate_spec(factor_spec(m)));
        if (m.e > 0) CHECK_NOTHROW(validate_augmented(augmented_spec(m)));
    }
    CHECK_THROWS_AS(model_zoo("nope"), ConfigError);
}

TEST_CASE("risk-neutral drift") {
    SUBCASE("pure diffusion with variance x^2 gets -x^2/2") {
        const ModelSpec m = model_zoo("example_5_1");
        REQUIRE(m.risk_neutral);
        CHECK(m.bY[0].same_terms(Poly::monomial(MultiIndex({2}), -0.5)));
    }
    SUBCASE("constant jump eta = c at rate lambda gets -lambda(e^c - 1 - c)") {
        ModelSpec m = model_zoo("example_5_1");
        m.GammaY0 = Eigen::MatrixXd::Zero(1, 2);
        m.GammaY = {Eigen::MatrixXd::Zero(1, 2)};  // no diffusive variance
        const double c = 0.3, lambda = 0.7;
        JumpStream stream;
        stream.lambda = lambda;
        stream.marks = MarkDist::point_mass(1.0);
        stream.size0 = Eigen::VectorXd::Zero(1);
        stream.size_y = Eigen::VectorXd::Constant(1, c);
        m.jumps = {stream};
        const ModelSpec rn = risk_neutral_drift(std::move(m));
        const double expected = -lambda * (std::exp(c) - 1.0 - c);
        CHECK(rn.bY[0].same_terms(Poly::constant(1, expected), 1e-14));
    }
    SUBCASE("zero-size jumps contribute nothing") {
        ModelSpec m = model_zoo("example_5_1");
        JumpStream stream;
        stream.lambda = 0.5;
        stream.marks = MarkDist::point_mass(1.0);
        stream.size0 = Eigen::VectorXd::Constant(1, 0.05);
        stream.size_y = Eigen::VectorXd::Zero(1);
        m.jumps = {stream};
        const ModelSpec rn = risk_neutral_drift(std::move(m));
        CHECK(rn.bY[0].same_terms(Poly::monomial(MultiIndex({2}), -0.5), 1e-14));
    }
}

TEST_CASE("martingale sanity of risk-neutralized zoo models") {
    for (const auto& name : {"example_5_1", "linear_vol_jumps"}) {
        const ModelSpec m = model_zoo(name);
        REQUIRE(m.risk_neutral);
        PathModel pm = to_path_model(m);
        SimConfig cfg;
        cfg.paths = 100000;
        cfg.steps_per_unit = 400;
        cfg.seed = 2024;
        cfg.threads = 4;
        const SimResult r = simulate(pm, 1.0, cfg);
        const int d = m.factor.d;
        const EstimateWithSE est = estimate(
            [d](const Eigen::VectorXd& z) { return std::exp(z(d)); }, r.terminal);
        CHECK(abs_z(est.mean, 1.0, est.se) <= 3.0);
    }
}

TEST_CASE("risk metrics of the two-equation example") {
    const ModelSpec m = model_zoo("example_5_1");
    Eigen::VectorXd x(1);
    x << 0.3;
    const RiskReport report = risk_metrics(m, x);
    REQUIRE(report.assets.size() == 1);
    const AssetRisk& risk = report.assets[0];
    // v = x^2, vol = x, volvol = gamma x, leverage = 0 (independent drivers)
    const double gamma = m.factor.Gamma[0](0, 0);
    CHECK(risk.spot_variance == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(risk.volatility == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(risk.vol_of_vol == doctest::Approx(gamma * 0.3).epsilon(1e-5));
    CHECK(risk.leverage == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("risk metrics of a pure-jump asset") {
    // v = lambda c^2 for a constant jump of size c at rate lambda
    ModelSpec m = model_zoo("example_5_1");
    m.GammaY0 = Eigen::MatrixXd::Zero(1, 2);
    m.GammaY = {Eigen::MatrixXd::Zero(1, 2)};
    const double c = 0.4, lambda = 1.3;
    JumpStream stream;
    stream.lambda = lambda;
    stream.marks = MarkDist::point_mass(1.0);
    stream.size0 = Eigen::VectorXd::Zero(1);
    stream.size_y = Eigen::VectorXd::Constant(1, c);
    m.jumps = {stream};
    m = risk_neutral_drift(std::move(m));
    Eigen::VectorXd x(1);
    x << 0.2;
    const RiskReport report = risk_metrics(m, x);
    CHECK(report.assets[0].spot_variance == doctest::Approx(lambda * c * c).epsilon(1e-12));
    // diffusive-only toggle removes the jump variance entirely
    CHECK_THROWS_AS(risk_metrics(m, x, true), DegenerateVariance);
}

TEST_CASE("leverage obeys the Cauchy-Schwarz bound across sampled states") {
    class Src final : public RandomSource {
    public:
        double uniform() override {
            state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
            return (static_cast<double>(state_ >> 11) + 0.5) * 0x1.0p-53;
        }
        double normal() override { return 0.0; }

    private:
        std::uint64_t state_ = 12345;
    } src;

    // correlated drivers to make leverage nontrivial
    ModelSpec m = model_zoo("example_5_1");
    m.GammaY = {(Eigen::MatrixXd(1, 2) << -0.6, 0.8).finished()};
    m = risk_neutral_drift(std::move(m));
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::VectorXd x = m.factor.domain.sample(src);
        const RiskReport report = risk_metrics(m, x);
        CHECK(std::abs(report.assets[0].leverage_raw) <= 1.0 + 1e-8);
        CHECK(report.assets[0].leverage <= 1.0);
        CHECK(report.assets[0].leverage >= -1.0);
    }
}

TEST_CASE("measure change") {
    const ModelSpec m = model_zoo("linear_vol_jumps");
    const int dz = m.factor.d + m.e;
    std::vector<Poly> phi0(dz, Poly(m.factor.d));
    std::vector<PsiSpec> psi1(m.jumps.size());

    SUBCASE("identity change leaves everything alone") {
        const MeasureChangeResult r = measure_change(m, phi0, psi1);
        std::vector<Poly> drift_p = m.factor.drift_poly();
        for (const auto& b : m.bY) drift_p.push_back(b);
        for (int i = 0; i < dz; ++i) CHECK(r.drift_q[i].same_terms(drift_p[i]));
        for (size_t j = 0; j < m.jumps.size(); ++j) {
            CHECK(r.streams_q[j].lambda == m.jumps[j].lambda);
            CHECK(r.streams_q[j].marks == m.jumps[j].marks);
        }
    }
    SUBCASE("constant phi shifts the drift by -a phi") {
        std::vector<Poly> phi = phi0;
        phi[0] = Poly::constant(m.factor.d, 0.5);
        const MeasureChangeResult r = measure_change(m, phi, psi1);
        // X drift loses 0.5 * a^X(x) = 0.5 gamma^2 x^2... degree-2 terms appear
        const Poly expected =
            m.factor.drift_poly()[0] - Poly::monomial(MultiIndex({2}), 0.5 * 0.4 * 0.4);
        CHECK(r.drift_q[0].same_terms(expected, 1e-14));
    }
    SUBCASE("psi = 2 halves the intensity and shifts the drift") {
        std::vector<PsiSpec> psi = psi1;
        psi[1].value = 2.0;  // the simultaneous point-mass stream
        const MeasureChangeResult r = measure_change(m, phi0, psi);
        CHECK(r.streams_q[1].lambda == doctest::Approx(m.jumps[1].lambda / 2.0));
        // drift correction: (1 - 1/2) lambda E[u] W
        const double factor = 0.5 * m.jumps[1].lambda * m.jumps[1].marks.raw_moment(1);
        const Poly expected_x =
            m.factor.drift_poly()[0] - Poly::constant(1, factor * m.jumps[1].size0(0));
        CHECK(r.drift_q[0].same_terms(expected_x, 1e-14));
    }
    SUBCASE("exponential tilt stays in family") {
        std::vector<PsiSpec> psi = psi1;
        psi[0].kind = PsiSpec::Kind::exp_tilt;
        psi[0].theta = Eigen::VectorXd::Zero(dz);
        psi[0].theta(1) = 0.8;  // tilt the return direction
        const MeasureChangeResult r = measure_change(m, phi0, psi);
        CHECK(r.streams_q[0].marks.family() == MarkFamily::gaussian);
        // tilted gaussian mean: mu - c s^2 with c = 0.8
        CHECK(r.streams_q[0].marks.params()[0] ==
              doctest::Approx(-0.05 - 0.8 * 0.01).epsilon(1e-12));
        CHECK(r.streams_q[0].lambda ==
              doctest::Approx(m.jumps[0].lambda * m.jumps[0].marks.exp_moment(-0.8)).epsilon(1e-12));
    }
    SUBCASE("nonpositive psi is rejected") {
        std::vector<PsiSpec> psi = psi1;
        psi[0].value = -1.0;
        CHECK_THROWS_AS(measure_change(m, phi0, psi), NonpositivePsi);
    }
}

TEST_CASE("factor moments of zoo models agree with Monte Carlo") {
    for (const auto& name : {"garch", "square_root"}) {
        const ModelSpec m = model_zoo(name);
        const GeneratorSpec spec = factor_spec(m);
        const GeneratorMatrix gm = build_generator_matrix(spec, 4);
        PathModel pm = path_model(spec, m.factor.x0);
        SimConfig cfg;
        cfg.paths = 100000;
        cfg.steps_per_unit = 500;
        cfg.seed = 314;
        cfg.threads = 4;
        const SimResult r = simulate(pm, 1.0, cfg);
        for (int order = 1; order <= 4; ++order) {
            const Poly p = Poly::monomial(MultiIndex({order}));
            const EstimateWithSE est = estimate(p, r.terminal);
            const double exact = conditional_moment(gm, {p, 1.0, m.factor.x0});
            CHECK(abs_z(est.mean, exact, est.se) <= 3.0);
        }
    }
}

TEST_CASE("two-point affine model reduces to the absorption generator") {
    const ModelSpec m = model_zoo("two_point_affine");
    REQUIRE(m.affine_form.has_value());
    const GeneratorSpec g = factor_spec(m);
    // G f(x) = lambda x (f(x-1) - f(x)): on f = x, gives -lambda x;
    // on f = x^2, gives lambda x (1 - 2x) = lambda x - 2 lambda x^2.
    const Poly gx = apply_generator(g, Poly::variable(1, 0));
    CHECK(gx.same_terms(Poly::variable(1, 0) * -1.0, 1e-14));
    const Poly gx2 = apply_generator(g, Poly::monomial(MultiIndex({2})));
    CHECK(gx2.same_terms(Poly::variable(1, 0) - Poly::monomial(MultiIndex({2}), 2.0), 1e-14));
}
