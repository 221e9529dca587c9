#include "doctest.h"

#include <cmath>

#include "pjd/mc.hpp"
#include "pjd/moments.hpp"
#include "test_helpers.hpp"

using namespace pjd;
using namespace pjd::testing;

namespace {

double abs_z(double a, double b, double se) { return std::abs(a - b) / std::max(se, 1e-300); }

} // namespace

TEST_CASE("counter rng is a pure function of (seed, path)") {
    CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 100; ++i) {
        const double va = a.uniform();
        CHECK(va == b.uniform());
        CHECK(va != c.uniform());
        CHECK(va != d.uniform());
        CHECK(va > 0.0);
        CHECK(va < 1.0);
    }
}

TEST_CASE("uniforms look uniform, normals look normal") {
    double sum = 0.0, sumsq = 0.0;
    const int n = 200000;
    CounterRng rng(9, 0);
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sumsq += z * z;
    }
    CHECK(std::abs(sum / n) <= 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(sumsq / n - 1.0) <= 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("deterministic ODE limit of the Euler scheme") {
    GeneratorSpec s = ou_spec(1.0, 0.0, 0.0);  // dX = -X dt, no noise
    PathModel m = path_model(s, Eigen::VectorXd::Ones(1));
    SimConfig cfg;
    cfg.paths = 1;
    cfg.steps_per_unit = 10000;
    const SimResult r = simulate(m, 1.0, cfg);
    CHECK(r.terminal(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
}

TEST_CASE("Poisson stream event count") {
    GeneratorSpec s = compound_poisson_spec(3.0, MarkDist::point_mass(1.0));
    PathModel m = path_model(s, Eigen::VectorXd::Zero(1));
    SimConfig cfg;
    cfg.paths = 20000;
    cfg.steps_per_unit = 50;
    cfg.seed = 11;
    const SimResult r = simulate(m, 2.0, cfg);
    const double mean_jumps = static_cast<double>(r.jumps) / cfg.paths;
    const double se = std::sqrt(6.0 / cfg.paths);  // Poisson(6) variance
    CHECK(abs_z(mean_jumps, 6.0, se) <= 3.0);
}

TEST_CASE("OU exact scheme agrees with the moment formula") {
    GeneratorSpec s = ou_spec(1.2, 0.5, 0.8);
    const GeneratorMatrix gm = build_generator_matrix(s, 2);
    Eigen::VectorXd x0(1);
    x0 << 2.0;
    PathModel m = path_model(s, x0);
    SimConfig cfg;
    cfg.paths = 100000;
    cfg.steps_per_unit = 8;  // exact transitions need no fine grid
    cfg.scheme = SimConfig::Scheme::exact_ou;
    cfg.seed = 5;
    const SimResult r = simulate(m, 1.0, cfg);
    for (int order = 1; order <= 2; ++order) {
        const Poly p = Poly::monomial(MultiIndex({order}));
        const EstimateWithSE est = estimate(p, r.terminal);
        const double exact = conditional_moment(gm, {p, 1.0, x0});
        CHECK(abs_z(est.mean, exact, est.se) <= 3.0);
    }
}

TEST_CASE("Euler agrees with the moment formula for the jump model") {
    GeneratorSpec s = compound_poisson_spec(1.0, MarkDist::point_masses({1.0, -1.0}, {0.5, 0.5}));
    s.drift[0] = Poly::constant(1, 0.4) - Poly::variable(1, 0) * 0.7;
    const GeneratorMatrix gm = build_generator_matrix(s, 3);
    Eigen::VectorXd x0(1);
    x0 << 0.5;
    PathModel m = path_model(s, x0);
    SimConfig cfg;
    cfg.paths = 60000;
    cfg.steps_per_unit = 300;
    cfg.seed = 17;
    const SimResult r = simulate(m, 1.0, cfg);
    for (int order = 1; order <= 3; ++order) {
        const Poly p = Poly::monomial(MultiIndex({order}));
        const EstimateWithSE est = estimate(p, r.terminal);
        const double exact = conditional_moment(gm, {p, 1.0, x0});
        CHECK(abs_z(est.mean, exact, est.se) <= 3.5);
    }
}

TEST_CASE("seed determinism across batch plans") {
    GeneratorSpec s = garch_spec(1.0, 0.4, 0.6);
    Eigen::VectorXd x0(1);
    x0 << 0.4;
    PathModel m = path_model(s, x0);
    SimConfig cfg;
    cfg.paths = 4000;
    cfg.steps_per_unit = 20;
    cfg.seed = 99;
    cfg.threads = 1;
    const SimResult r1 = simulate(m, 1.0, cfg);
    cfg.threads = 2;
    const SimResult r2 = simulate(m, 1.0, cfg);
    cfg.threads = 8;
    const SimResult r8 = simulate(m, 1.0, cfg);
    CHECK((r1.terminal - r2.terminal).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r1.terminal - r8.terminal).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Euler bias shrinks when steps double") {
    GeneratorSpec s = garch_spec(2.0, 0.5, 0.8);
    const GeneratorMatrix gm = build_generator_matrix(s, 2);
    Eigen::VectorXd x0(1);
    x0 << 0.5;
    PathModel m = path_model(s, x0);
    const Poly p = Poly::monomial(MultiIndex({2}));
    const double exact = conditional_moment(gm, {p, 1.0, x0});

    SimConfig cfg;
    cfg.paths = 400000;
    cfg.seed = 31;
    cfg.threads = 4;
    cfg.steps_per_unit = 4;
    const double coarse = estimate(p, simulate(m, 1.0, cfg).terminal).mean;
    cfg.steps_per_unit = 8;
    const double fine = estimate(p, simulate(m, 1.0, cfg).terminal).mean;
    // first-order weak scheme: the error should shrink by roughly half,
    // allow plenty of noise slack
    CHECK(std::abs(fine - exact) <= 0.75 * std::abs(coarse - exact) + 1e-3);
}

TEST_CASE("antithetic pairing halves the bookkeeping variance for monotone payoffs") {
    GeneratorSpec s = ou_spec(1.0, 0.2, 0.9);
    Eigen::VectorXd x0(1);
    x0 << 0.2;
    PathModel m = path_model(s, x0);
    SimConfig plain;
    plain.paths = 40000;
    plain.steps_per_unit = 30;
    plain.seed = 77;
    SimConfig anti = plain;
    anti.antithetic = true;
    const auto payoff = [](const Eigen::VectorXd& z) { return z(0); };
    const EstimateWithSE p1 = estimate(payoff, simulate(m, 1.0, plain).terminal);
    const EstimateWithSE p2 = estimate(payoff, simulate(m, 1.0, anti).terminal);
    // the antithetic mean estimator's true variance is far smaller; its
    // naive SE still shrinks visibly for a linear payoff
    CHECK(std::abs(p2.mean - 0.2 - 0.0 * p1.mean) <= 0.05);
    CHECK(abs_z(p1.mean, p2.mean, std::sqrt(p1.se * p1.se + p2.se * p2.se)) <= 4.0);
}

TEST_CASE("subordinated simulation") {
    GeneratorSpec s = ou_spec(1.0, 0.3, 0.7);
    Eigen::VectorXd x0(1);
    x0 << 1.5;
    PathModel m = path_model(s, x0);

    SUBCASE("unit drift clock is the identity in law") {
        SubordinatorSpec sub;
        sub.drift = 1.0;
        SimConfig cfg;
        cfg.paths = 50000;
        cfg.steps_per_unit = 100;
        cfg.seed = 3;
        const SimResult direct = simulate(m, 1.0, cfg);
        const SimResult via = simulate_subordinated(m, sub, 1.0, cfg);
        const EstimateWithSE e1 = estimate(Poly::variable(1, 0), direct.terminal);
        const EstimateWithSE e2 = estimate(Poly::variable(1, 0), via.terminal);
        CHECK(abs_z(e1.mean, e2.mean, std::sqrt(e1.se * e1.se + e2.se * e2.se)) <= 3.0);
    }
    SUBCASE("matrix-level and path-level subordination agree") {
        SubordinatorSpec sub;
        sub.atoms = {{1.0, 1.0}};
        const GeneratorMatrix gm = build_generator_matrix(s, 2);
        const GeneratorMatrix tilted = subordinate_matrix(gm, sub);
        SimConfig cfg;
        cfg.paths = 100000;
        cfg.steps_per_unit = 200;
        cfg.seed = 23;
        cfg.threads = 4;
        const SimResult r = simulate_subordinated(m, sub, 1.0, cfg);
        for (int order = 1; order <= 2; ++order) {
            const Poly p = Poly::monomial(MultiIndex({order}));
            const EstimateWithSE est = estimate(p, r.terminal);
            const double exact = conditional_moment(tilted, {p, 1.0, x0});
            CHECK(abs_z(est.mean, exact, est.se) <= 3.0);
        }
    }
}

TEST_CASE("estimate basics") {
    Eigen::MatrixXd samples(4, 1);
    samples << 1.0, 1.0, 1.0, 1.0;
    const EstimateWithSE c = estimate([](const Eigen::VectorXd&) { return 2.5; }, samples);
    CHECK(c.mean == 2.5);
    CHECK(c.se == 0.0);

    // standard normal sample, payoff x^2 -> mean near 1
    const int n = 100000;
    Eigen::MatrixXd z(n, 1);
    CounterRng rng(1234, 0);
    for (int i = 0; i < n; ++i) z(i, 0) = rng.normal();
    const EstimateWithSE m2 = estimate(Poly::monomial(MultiIndex({2})), z);
    CHECK(abs_z(m2.mean, 1.0, m2.se) <= 3.0);
}

TEST_CASE("moment-only specs refuse to simulate") {
    GeneratorSpec s;
    s.dim = 1;
    s.drift = {Poly(1)};
    s.mod_diffusion = {{Poly::constant(1, 1.0)}};
    s.jump_moments.emplace(MultiIndex({3}), Poly::constant(1, 0.2));
    s.domain = StateDomain::all(1);
    CHECK_THROWS_AS((void)path_model(s, Eigen::VectorXd::Zero(1)), KernelRequired);
}

TEST_CASE("functional accumulators match the augmented moment formula") {
    GeneratorSpec s = ou_spec(1.0, 0.7, 0.5);
    const AugmentedSpec aug = functional_augment(s, {Poly::variable(1, 0)}, {{Poly::constant(1, 1.0)}});
    const GeneratorMatrix am = build_augmented_matrix(aug, 2);
    Eigen::VectorXd x0(1);
    x0 << 2.0;
    Eigen::VectorXd z0(3);
    z0 << 2.0, 0.0, 0.0;

    PathModel m = path_model(s, x0);
    PathFunctionals fn;
    fn.P = {Poly::variable(1, 0)};
    fn.Q = {{Poly::constant(1, 1.0)}};
    SimConfig cfg;
    cfg.paths = 60000;
    cfg.steps_per_unit = 200;
    cfg.seed = 12;
    cfg.threads = 4;
    const SimResult r = simulate(m, 1.0, cfg, &fn);

    // E[int X dt] and E[X_T - X_0] against the transform-module matrix
    const EstimateWithSE integral = estimate(
        [](const Eigen::VectorXd& row) { return row(0); }, r.functionals);
    const EstimateWithSE increment = estimate(
        [](const Eigen::VectorXd& row) { return row(1); }, r.functionals);
    const double exact_integral = conditional_moment(am, {Poly::variable(3, 1), 1.0, z0});
    const double exact_increment = conditional_moment(am, {Poly::variable(3, 2), 1.0, z0});
    CHECK(abs_z(integral.mean, exact_integral, integral.se) <= 3.0);
    CHECK(abs_z(increment.mean, exact_increment, increment.se) <= 3.0);
}
