#include "doctest.h"

#include <cmath>
#include <random>

#include "pjd/moments.hpp"
#include "test_helpers.hpp"

using namespace pjd;
using namespace pjd::testing;

TEST_CASE("expm basics") {
    CHECK(expm(Eigen::MatrixXd::Zero(3, 3)).isIdentity(0.0));

    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
    D(0, 0) = -1.0;
    D(1, 1) = -2.0;
    const Eigen::MatrixXd E = expm(D);
    CHECK(E(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(E(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(std::abs(E(0, 1)) <= 1e-16);

    // G^2 = -G  =>  expm(tau G) = I + (1 - e^{-tau}) G
    Eigen::MatrixXd G(2, 2);
    G << 0.0, 1.0, 0.0, -1.0;
    const Eigen::MatrixXd R = expm(G);
    CHECK(R(0, 1) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
    CHECK(R(1, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
}

TEST_CASE("expm input checking") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, std::numeric_limits<double>::infinity(), 0.0, 1.0;
    CHECK_THROWS_AS(expm(bad), Error);
    // enormous norm exhausts the scaling budget
    CHECK_THROWS_AS(expm(Eigen::MatrixXd::Constant(2, 2, 1e300)), Error);
}

TEST_CASE("expm scaling kicks in and stays accurate") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd A(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) A(i, j) = 4.0 * u(rng);
    // Compare against the squaring identity with a halved argument.
    const Eigen::MatrixXd full = expm(A);
    const Eigen::MatrixXd half = expm(0.5 * A);
    CHECK((full - half * half).cwiseAbs().maxCoeff() <= 1e-10 * full.cwiseAbs().maxCoeff());
}

TEST_CASE("conditional moments of the OU family") {
    SUBCASE("mean reversion toward 1") {
        const GeneratorMatrix gm = build_generator_matrix(ou_spec(1.0, 1.0, 0.6), 1);
        Eigen::VectorXd x(1);
        x << 2.0;
        const double m = conditional_moment(gm, {Poly::variable(1, 0), 1.0, x});
        CHECK(m == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-12));
    }
    SUBCASE("second moment at tau = ln 2") {
        const GeneratorMatrix gm = build_generator_matrix(ou_spec(1.0, 0.0, std::sqrt(2.0)), 2);
        Eigen::VectorXd x(1);
        x << 1.0;
        const double m = conditional_moment(gm, {Poly::monomial(MultiIndex({2})), std::log(2.0), x});
        CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("zero horizon is exact evaluation") {
        const GeneratorMatrix gm = build_generator_matrix(ou_spec(1.0, 1.0, 0.6), 2);
        Eigen::VectorXd x(1);
        x << 1.7;
        Poly p = Poly::monomial(MultiIndex({2}), 2.0) - Poly::variable(1, 0);
        CHECK(conditional_moment(gm, {p, 0.0, x}) == p.eval(std::span<const double>(x.data(), 1)));
    }
    SUBCASE("GARCH mean settles at theta") {
        const double theta = 0.4;
        const GeneratorMatrix gm = build_generator_matrix(garch_spec(1.5, theta, 0.7), 1);
        Eigen::VectorXd x(1);
        x << 2.0;
        const double m = conditional_moment(gm, {Poly::variable(1, 0), 30.0, x});
        CHECK(m == doctest::Approx(theta).epsilon(1e-10));
    }
}

TEST_CASE("degree beyond the basis is rejected") {
    const GeneratorMatrix gm = build_generator_matrix(ou_spec(1.0, 0.0, 1.0), 2);
    Eigen::VectorXd x(1);
    x << 0.0;
    CHECK_THROWS_AS((void)conditional_moment(gm, {Poly::monomial(MultiIndex({3})), 1.0, x}),
                    DegreeViolation);
}

TEST_CASE("semigroup law on randomized horizons") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<GeneratorSpec> specs = {
        ou_spec(1.0, 0.3, 0.8),
        garch_spec(2.0, 0.5, 0.8),
        compound_poisson_spec(1.0, MarkDist::point_masses({1.0, -1.0}, {0.5, 0.5})),
    };
    for (const auto& spec : specs) {
        const GeneratorMatrix gm = build_generator_matrix(spec, 4);
        for (int trial = 0; trial < 5; ++trial) {
            const double s = u(rng), t = u(rng);
            const Eigen::MatrixXd lhs = expm((s + t) * gm.G);
            const Eigen::MatrixXd rhs = expm(s * gm.G) * expm(t * gm.G);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("tower property through an intermediate time") {
    const GeneratorMatrix gm = build_generator_matrix(garch_spec(1.2, 0.4, 0.6), 4);
    Eigen::VectorXd x(1);
    x << 0.7;
    const Poly p = Poly::monomial(MultiIndex({3})) + Poly::variable(1, 0) * 0.5;
    const double direct = conditional_moment(gm, {p, 1.4, x});
    const Poly inner = propagate(gm, p, 0.9);  // E[p(X_1.4) | X_0.5]
    const double composed = conditional_moment(gm, {inner, 0.5, x});
    CHECK(direct == doctest::Approx(composed).epsilon(1e-10));

    const double via_multi =
        multi_time_moment(gm, {Poly::constant(1, 1.0), p}, {0.5, 1.4}, x);
    CHECK(via_multi == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("moment path") {
    SUBCASE("constant polynomial gives a constant series") {
        const GeneratorMatrix gm = build_generator_matrix(ou_spec(1.0, 0.2, 0.5), 2);
        Eigen::VectorXd x(1);
        x << 1.1;
        const auto series = moment_path(gm, Poly::constant(1, 2.5), x, {0.0, 0.7, 1.9});
        for (double v : series) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));
    }
    SUBCASE("OU mean over a grid") {
        const GeneratorMatrix gm = build_generator_matrix(ou_spec(1.0, 1.0, 0.6), 1);
        Eigen::VectorXd x(1);
        x << 2.0;
        const auto series = moment_path(gm, Poly::variable(1, 0), x, {0.0, 1.0, 2.0});
        CHECK(series[0] == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(series[1] == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-11));
        CHECK(series[2] == doctest::Approx(1.0 + std::exp(-2.0)).epsilon(1e-11));
    }
    SUBCASE("single point reduces to conditional_moment") {
        const GeneratorMatrix gm = build_generator_matrix(garch_spec(1.0, 0.4, 0.7), 3);
        Eigen::VectorXd x(1);
        x << 0.5;
        const Poly p = Poly::monomial(MultiIndex({2}));
        const auto series = moment_path(gm, p, x, {0.8});
        CHECK(series[0] == doctest::Approx(conditional_moment(gm, {p, 0.8, x})).epsilon(1e-12));
    }
    SUBCASE("agrees with conditional_moment pointwise on an irregular grid") {
        const GeneratorMatrix gm = build_generator_matrix(ou_spec(0.8, 0.1, 0.9), 3);
        Eigen::VectorXd x(1);
        x << -0.4;
        const Poly p = Poly::monomial(MultiIndex({3})) - Poly::variable(1, 0);
        const std::vector<double> grid = {0.0, 0.13, 0.55, 0.55, 1.02, 2.4};
        const auto series = moment_path(gm, p, x, grid);
        for (size_t i = 0; i < grid.size(); ++i)
            CHECK(series[i] == doctest::Approx(conditional_moment(gm, {p, grid[i], x})).epsilon(1e-10));
    }
}
