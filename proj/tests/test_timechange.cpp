#include "doctest.h"

#include <cmath>

#include "pjd/moments.hpp"
#include "pjd/timechange.hpp"
#include "test_helpers.hpp"

using namespace pjd;
using namespace pjd::testing;

TEST_CASE("exponential moment feasibility") {
    const GeneratorMatrix gm = build_generator_matrix(ou_spec(1.0, 0.2, 0.7), 3);
    SUBCASE("nonpositive spectrum passes trivially") {
        SubordinatorSpec sub;
        sub.continuous = SubordinatorSpec::GammaPart{1.0, 1.0, 0.5, 64};
        CHECK(check_exponential_moments(sub, gm).all_pass());
    }
    SUBCASE("gamma tail loses against a growing semigroup") {
        // dX = 2X dt: eigenvalues 0, 2, 4, 6 on Pol_3.
        GeneratorSpec growing;
        growing.dim = 1;
        growing.drift = {Poly::variable(1, 0) * 2.0};
        growing.mod_diffusion = {{Poly(1)}};
        growing.domain = StateDomain::all(1);
        const GeneratorMatrix bad = build_generator_matrix(growing, 3);
        SubordinatorSpec sub;
        sub.continuous = SubordinatorSpec::GammaPart{1.0, 1.0, 1.0, 64};
        CHECK_FALSE(check_exponential_moments(sub, bad).all_pass());
        CHECK_THROWS_AS(subordinate_matrix(bad, sub), ExponentialMomentFailure);
    }
    SUBCASE("atoms always pass") {
        SubordinatorSpec sub;
        sub.atoms = {{2.0, 0.3}};
        CHECK(check_exponential_moments(sub, gm).all_pass());
    }
}

TEST_CASE("deterministic clock leaves the generator alone") {
    const GeneratorMatrix gm = build_generator_matrix(garch_spec(1.1, 0.4, 0.6), 4);
    SubordinatorSpec sub;
    sub.drift = 1.0;
    const GeneratorMatrix same = subordinate_matrix(gm, sub);
    CHECK((same.G - gm.G).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Poisson subordination of the 2x2 mean-reversion block") {
    // G = [[0,1],[0,-1]] satisfies G^2 = -G, so expm(G) - I has the closed form.
    const GeneratorMatrix gm = build_generator_matrix(ou_spec(1.0, 1.0, 0.5), 1);
    SubordinatorSpec sub;
    sub.atoms = {{1.0, 1.0}};
    const GeneratorMatrix tilted = subordinate_matrix(gm, sub);
    CHECK(tilted.G(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(tilted.G(0, 1) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(tilted.G(1, 1) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-12));

    SubordinatorSpec doubled;
    doubled.atoms = {{2.0, 0.5}};
    const GeneratorMatrix half = subordinate_matrix(gm, doubled);
    const Eigen::MatrixXd expected =
        2.0 * (expm(0.5 * gm.G) - Eigen::MatrixXd::Identity(2, 2));
    CHECK((half.G - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("subordinated semigroup equals the Poisson mixture") {
    const GeneratorMatrix gm = build_generator_matrix(ou_spec(1.0, 1.0, 0.5), 3);
    SubordinatorSpec sub;
    sub.atoms = {{1.0, 1.0}};
    SUBCASE("t = 0 gives zero deviation") {
        CHECK(subordinated_semigroup_check(gm, sub, 0.0, 10) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("forty terms reach 1e-10 for lambda t <= 5") {
        for (double t : {1.0, 2.5, 5.0})
            CHECK(subordinated_semigroup_check(gm, sub, t, 40) <= 1e-10);
    }
    SUBCASE("single-term truncation is visibly off") {
        CHECK(subordinated_semigroup_check(gm, sub, 1.0, 1) > 1e-3);
    }
    SUBCASE("drifted clock") {
        SubordinatorSpec with_drift;
        with_drift.drift = 0.7;
        with_drift.atoms = {{1.3, 0.8}};
        CHECK(subordinated_semigroup_check(gm, with_drift, 2.0, 40) <= 1e-10);
    }
}

TEST_CASE("gamma continuous part by quadrature") {
    // For a 1x1 generator block g (scalar), Gtilde = w int (e^{zeta g} - 1)
    // zeta^{s-1} e^{-r zeta} dzeta = w Gamma(s) (1/(r-g)^s - 1/r^s).
    GeneratorSpec s;
    s.dim = 1;
    s.drift = {Poly::variable(1, 0) * -0.8};
    s.mod_diffusion = {{Poly(1)}};
    s.domain = StateDomain::all(1);
    const GeneratorMatrix gm = build_generator_matrix(s, 1);  // diag(0, -0.8)
    SubordinatorSpec sub;
    sub.continuous = SubordinatorSpec::GammaPart{0.9, 1.5, 2.0, 64};
    const GeneratorMatrix tilted = subordinate_matrix(gm, sub);
    const double g = -0.8, w = 0.9, shape = 1.5, rate = 2.0;
    const double expected =
        w * std::tgamma(shape) * (std::pow(rate - g, -shape) - std::pow(rate, -shape));
    CHECK(tilted.G(1, 1) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(tilted.G(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("subordinated OU is polynomial but no longer affine") {
    // Compare the affine-form residual of x -> Ge^{ux} / e^{ux} before and
    // after the time change, via a degree-12 series truncation.
    const int n = 12;
    const GeneratorMatrix gm = build_generator_matrix(ou_spec(1.0, 0.0, 1.0), n);
    SubordinatorSpec sub;
    sub.atoms = {{1.0, 1.0}};
    const GeneratorMatrix tilted = subordinate_matrix(gm, sub);

    const double u = 0.5;
    auto affine_residual = [&](const GeneratorMatrix& m) {
        // coordinates of the truncated exponential sum_j u^j x^j / j!
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(m.size());
        double c = 1.0;
        for (int j = 0; j <= n; ++j) {
            coeffs(j) = c;
            c *= u / (j + 1);
        }
        const Eigen::VectorXd image = m.G * coeffs;
        // least-squares fit of (G e^{ux})(x) e^{-ux} against {1, x}
        const int samples = 40;
        Eigen::MatrixXd A(samples, 2);
        Eigen::VectorXd rhs(samples);
        for (int k = 0; k < samples; ++k) {
            const double x = -1.0 + 2.0 * k / (samples - 1);
            double gx = 0.0, pw = 1.0;
            for (int j = 0; j < m.size(); ++j) {
                gx += image(j) * pw;
                pw *= x;
            }
            A(k, 0) = 1.0;
            A(k, 1) = x;
            rhs(k) = gx * std::exp(-u * x);
        }
        const Eigen::VectorXd fit = A.colPivHouseholderQr().solve(rhs);
        return (A * fit - rhs).cwiseAbs().maxCoeff();
    };

    CHECK(affine_residual(gm) <= 1e-8);        // OU itself is affine
    CHECK(affine_residual(tilted) > 1e-4);     // the time change breaks it
}
