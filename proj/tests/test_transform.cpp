#include "doctest.h"

#include <cmath>
#include <random>

#include "pjd/moments.hpp"
#include "pjd/transform.hpp"
#include "test_helpers.hpp"

using namespace pjd;
using namespace pjd::testing;

namespace {

/// Substitute the power map x -> (x, x^2, ..) into a polynomial in the
/// transformed variables (pullback phi^* for d = 1).
Poly pullback_1d(const Poly& fbar, const GradedBasis& components, int e) {
    // fbar lives on (xbar_1..xbar_N, y_1..y_e); result lives on (x, y_1..y_e).
    const int N = components.size() - 1;
    Poly out(1 + e);
    for (const auto& [kappa, c] : fbar.terms()) {
        Poly term = Poly::constant(1 + e, c);
        for (int i = 0; i < N; ++i)
            if (kappa[i] > 0) term = term * Poly::monomial(components[i + 1]).embed(1 + e, 0).pow(kappa[i]);
        for (int l = 0; l < e; ++l)
            if (kappa[N + l] > 0) term = term * Poly::variable(1 + e, 1 + l).pow(kappa[N + l]);
        out += term;
    }
    return out;
}

} // namespace

TEST_CASE("power augmentation of the square-root process") {
    // dX = (b + beta X) dt + sigma sqrt(X) dW; H = (x, x^2); the second
    // component must pick up drift (2b + sigma^2) xbar_1 + 2 beta xbar_2.
    const double b = 0.3, beta = -1.1, sigma = 0.6;
    GeneratorSpec s;
    s.dim = 1;
    s.drift = {Poly::constant(1, b) + Poly::variable(1, 0) * beta};
    s.mod_diffusion = {{Poly::variable(1, 0) * (sigma * sigma)}};
    s.domain = StateDomain::positive_orthant(1);

    const PowerAugmented pa = power_augment(s, 2);
    const auto drift = pa.drift();
    REQUIRE(drift.size() == 2);
    CHECK(drift[0].coeff(MultiIndex({0, 0})) == doctest::Approx(b));
    CHECK(drift[0].coeff(MultiIndex({1, 0})) == doctest::Approx(beta));
    CHECK(drift[1].coeff(MultiIndex({1, 0})) == doctest::Approx(2.0 * b + sigma * sigma));
    CHECK(drift[1].coeff(MultiIndex({0, 1})) == doctest::Approx(2.0 * beta));
}

TEST_CASE("power augmentation with n = 1 is the identity") {
    GeneratorSpec s = ou_spec(1.0, 0.5, 0.8);
    const PowerAugmented pa = power_augment(s, 1);
    const GeneratorMatrix direct = build_generator_matrix(s, 3);
    const GeneratorMatrix via = pa.matrix(3);
    CHECK((direct.G - via.G).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("moments of H(X) through either route") {
    GeneratorSpec s = ou_spec(1.3, 0.2, 0.7);
    const PowerAugmented pa = power_augment(s, 2);
    Eigen::VectorXd x(1);
    x << 0.9;
    // First moment of the second component of H(X) = X^2, via the induced
    // matrix on Pol_1(H(E)) = Pol_2(E) and via the base at n = 2.
    const GeneratorMatrix induced = pa.matrix(1);
    const GeneratorMatrix base = build_generator_matrix(s, 2);
    const Poly x2 = Poly::monomial(MultiIndex({2}));
    CHECK(conditional_moment(induced, {x2, 0.8, x}) ==
          doctest::Approx(conditional_moment(base, {x2, 0.8, x})).epsilon(1e-14));
}

TEST_CASE("V_m basis enumeration") {
    SUBCASE("d=1, n=2, e=1, m=2 has the nine documented pairs") {
        const VmBasis vm = build_vm_basis(2, 2, 1, 1);
        CHECK(vm.size() == 9);
        int beta0 = 0, beta1 = 0, beta2 = 0;
        for (const auto& [alpha, beta] : vm.pairs) {
            if (beta.degree() == 0) ++beta0;
            if (beta.degree() == 1) ++beta1;
            if (beta.degree() == 2) ++beta2;
            CHECK(alpha.degree() <= 2 * (2 - beta.degree()));
        }
        CHECK(beta0 == 5);
        CHECK(beta1 == 3);
        CHECK(beta2 == 1);
        CHECK(vm.pairs.front().first.is_zero());
        CHECK(vm.pairs.front().second.is_zero());
    }
    SUBCASE("n=1 recovers the plain graded basis as a set") {
        const VmBasis vm = build_vm_basis(1, 3, 2, 2);
        const GradedBasis plain(4, 3);
        CHECK(vm.size() == plain.size());
        const GradedBasis joint = vm.joint();
        for (const auto& alpha : plain.order()) CHECK(joint.contains(alpha));
    }
    SUBCASE("m=0 is just the constant") {
        const VmBasis vm = build_vm_basis(3, 0, 2, 1);
        CHECK(vm.size() == 1);
    }
    SUBCASE("cardinality matches the combinatorial count") {
        for (int n = 1; n <= 3; ++n)
            for (int m = 0; m <= 3; ++m)
                for (int d = 1; d <= 2; ++d)
                    for (int e = 1; e <= 2; ++e) {
                        const VmBasis vm = build_vm_basis(n, m, d, e);
                        double expected = 0.0;
                        for (int k = 0; k <= m; ++k)
                            expected += binomial(k + e - 1, e - 1) * binomial(n * (m - k) + d, d);
                        CHECK(vm.size() == static_cast<int>(expected));
                    }
    }
}

TEST_CASE("joint generator on the two-equation example") {
    const AugmentedSpec aug = example_model(2.0, 0.3, 0.5);
    const Poly y = Poly::variable(2, 1);

    // G y = -x^2/2
    const Poly gy = apply_augmented_generator(aug, y);
    CHECK(gy.same_terms(Poly::monomial(MultiIndex({2, 0}), -0.5)));

    // G y^2 = x^2 - x^2 y
    const Poly gy2 = apply_augmented_generator(aug, y * y);
    Poly expected = Poly::monomial(MultiIndex({2, 0})) - Poly::monomial(MultiIndex({2, 1}));
    CHECK(gy2.same_terms(expected));
}

TEST_CASE("beta = 0 columns embed the base generator") {
    const AugmentedSpec aug = example_model(2.0, 0.3, 0.5);
    const int m = 2;
    const GeneratorMatrix am = build_augmented_matrix(aug, m);
    const GeneratorMatrix base = build_generator_matrix(aug.base, aug.n * m);
    for (int j = 0; j < am.size(); ++j) {
        const MultiIndex& elem = am.basis[j];
        if (elem[1] != 0) continue;  // y-carrying element
        for (int i = 0; i < am.size(); ++i) {
            const MultiIndex& row = am.basis[i];
            const MultiIndex base_row({row[0]});
            const MultiIndex base_col({elem[0]});
            if (row[1] != 0)
                CHECK(am.G(i, j) == 0.0);
            else
                CHECK(am.G(i, j) == base.G(base.basis.index_of(base_row), base.basis.index_of(base_col)));
        }
    }
}

TEST_CASE("commuting diagram on randomized polynomials") {
    const AugmentedSpec aug = example_model(1.5, 0.25, 0.4);
    const int m = 3;
    const GeneratorMatrix am = build_augmented_matrix(aug, m);
    const GradedBasis components(1, aug.n);  // H = (x, x^2)

    std::mt19937 rng(41);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    const GradedBasis fbar_basis(3, m);  // polynomials in (xbar1, xbar2, y)
    for (int trial = 0; trial < 10; ++trial) {
        Poly fbar(3);
        for (const auto& kappa : fbar_basis.order()) fbar.add_term(kappa, coeff(rng));
        const Poly f = pullback_1d(fbar, components, 1);  // element of V_m
        const Poly via_symbolic = apply_augmented_generator(aug, f);
        const std::vector<double> v = to_coordinates(f, am.basis);
        const Eigen::Map<const Eigen::VectorXd> ve(v.data(), v.size());
        const Eigen::VectorXd gv = am.G * ve;
        const Poly via_matrix = from_coordinates(std::span<const double>(gv.data(), gv.size()), am.basis);
        CHECK((via_symbolic - via_matrix).degree() == 0);  // difference collapses
        CHECK(via_symbolic.same_terms(via_matrix, 1e-12));
    }
}

TEST_CASE("moment-map route agrees with the direct kernel route") {
    // A factor with state-dependent jumps that also kick the return process.
    GeneratorSpec base;
    base.dim = 1;
    base.drift = {Poly::constant(1, 0.4) - Poly::variable(1, 0) * 0.9};
    JumpStream stream;
    stream.lambda = 0.8;
    stream.marks = MarkDist::gaussian(0.1, 0.35);
    stream.size0 = Eigen::VectorXd::Constant(1, 0.5);
    stream.size = {Eigen::VectorXd::Constant(1, 0.2)};
    stream.size_y = Eigen::VectorXd::Constant(1, 0.7);
    base.kernel = MarkJumpSpec{{stream}};
    base.domain = StateDomain::all(1);

    const double m2 = stream.lambda * stream.marks.raw_moment(2);
    const Poly L = Poly::constant(1, 0.5) + Poly::variable(1, 0) * 0.2;
    base.mod_diffusion = {{Poly::constant(1, 0.3) + L * L * m2}};

    AugmentedSpec aug;
    aug.base = base;
    aug.n = 2;
    aug.e = 1;
    aug.joint_kernel = true;
    aug.bY = {Poly::monomial(MultiIndex({2}), -0.5)};
    // modAY = sigma_y^2 + int eta^2 nu; modAXY = int xi eta nu (no shared Brownian)
    aug.modAY = {{Poly::monomial(MultiIndex({2})) + Poly::constant(1, 0.49 * m2)}};
    aug.modAXY = {{L * (0.7 * m2)}};

    std::mt19937 rng(43);
    std::uniform_real_distribution<double> coeff(-1.5, 1.5);
    const GradedBasis basis(2, 4);
    for (int trial = 0; trial < 8; ++trial) {
        Poly f(2);
        for (const auto& kappa : basis.order()) f.add_term(kappa, coeff(rng));
        const Poly a = apply_augmented_generator(aug, f);
        const Poly b = apply_augmented_via_kernel(aug, f);
        CHECK(a.same_terms(b, 1e-9));
    }
}

TEST_CASE("functional augmentation") {
    SUBCASE("running integral of an OU path") {
        const double theta = 0.7, T = 1.3;
        GeneratorSpec s = ou_spec(1.0, theta, 0.5);
        const AugmentedSpec aug = functional_augment(s, {Poly::variable(1, 0)}, {});
        const GeneratorMatrix am = build_augmented_matrix(aug, 2);
        Eigen::VectorXd z(2);
        z << 2.0, 0.0;
        const double mean = conditional_moment(am, {Poly::variable(2, 1), T, z});
        const double expected = theta * T + (2.0 - theta) * (1.0 - std::exp(-T));
        CHECK(mean == doctest::Approx(expected).epsilon(1e-10));
    }
    SUBCASE("Q = identity tracks the increment of X") {
        GeneratorSpec s = garch_spec(1.2, 0.4, 0.6);
        const AugmentedSpec aug = functional_augment(s, {}, {{Poly::constant(1, 1.0)}});
        const GeneratorMatrix am = build_augmented_matrix(aug, 2);
        const GeneratorMatrix base = build_generator_matrix(s, 2);
        Eigen::VectorXd z(2);
        z << 0.8, 0.0;
        Eigen::VectorXd x(1);
        x << 0.8;
        const double my = conditional_moment(am, {Poly::variable(2, 1), 0.9, z});
        const double mx = conditional_moment(base, {Poly::variable(1, 0), 0.9, x});
        CHECK(my == doctest::Approx(mx - 0.8).epsilon(1e-10));
    }
    SUBCASE("deterministic quadratic-variation clock of the OU model") {
        const double sigma = 0.8, T = 2.0;
        GeneratorSpec s = ou_spec(1.0, 0.0, sigma);
        const Poly gxx = carre_du_champ(s, Poly::variable(1, 0), Poly::variable(1, 0));
        const AugmentedSpec aug = functional_augment(s, {gxx}, {});
        const GeneratorMatrix am = build_augmented_matrix(aug, 2);
        Eigen::VectorXd z(2);
        z << 0.3, 0.0;
        const double mean = conditional_moment(am, {Poly::variable(2, 1), T, z});
        const double second = conditional_moment(am, {Poly::monomial(MultiIndex({0, 2})), T, z});
        CHECK(mean == doctest::Approx(sigma * sigma * T).epsilon(1e-10));
        CHECK(second == doctest::Approx(std::pow(sigma * sigma * T, 2)).epsilon(1e-10));
    }
    SUBCASE("quadratic covariation identity in expectation") {
        GeneratorSpec s = garch_spec(1.5, 0.5, 0.7);
        const auto cov = quadratic_covariation_components(s, 0, 0);
        // Y = (int Gamma(x,x) ds, int X dX); [X,X]_T = X_T^2 - x0^2 - 2 int X dX.
        const AugmentedSpec aug = functional_augment(s, {cov.compensator}, {cov.q_rows[0]});
        const GeneratorMatrix am = build_augmented_matrix(aug, 2);
        Eigen::VectorXd z(3);
        z << 0.6, 0.0, 0.0;
        const double T = 0.8;
        const double compensator_mean = conditional_moment(am, {Poly::variable(3, 1), T, z});
        const double x2_mean = conditional_moment(am, {Poly::monomial(MultiIndex({2, 0, 0})), T, z});
        const double stoch_int_mean = conditional_moment(am, {Poly::variable(3, 2), T, z});
        CHECK(compensator_mean ==
              doctest::Approx(x2_mean - 0.36 - 2.0 * stoch_int_mean).epsilon(1e-9));
    }
}

TEST_CASE("projection of the augmented state") {
    GeneratorSpec s = ou_spec(0.9, 0.3, 0.6);
    const AugmentedSpec aug =
        functional_augment(s, {Poly::variable(1, 0), Poly::monomial(MultiIndex({2}))}, {});

    SUBCASE("identity projection changes nothing") {
        const AugmentedSpec same = project(aug, Eigen::MatrixXd::Identity(2, 2));
        for (int l = 0; l < 2; ++l) CHECK(same.bY[l].same_terms(aug.bY[l]));
        for (int l = 0; l < 2; ++l)
            for (int r = 0; r < 2; ++r) CHECK(same.modAY[l][r].same_terms(aug.modAY[l][r]));
    }
    SUBCASE("coordinate selection matches the joint marginal") {
        Eigen::MatrixXd P(1, 2);
        P << 1.0, 0.0;
        const AugmentedSpec marginal = project(aug, P);
        const GeneratorMatrix joint = build_augmented_matrix(aug, 2);
        const GeneratorMatrix small = build_augmented_matrix(marginal, 2);
        Eigen::VectorXd zj(3), zs(2);
        zj << 1.1, 0.0, 0.0;
        zs << 1.1, 0.0;
        const double a = conditional_moment(joint, {Poly::monomial(MultiIndex({0, 2, 0})), 0.7, zj});
        const double b = conditional_moment(small, {Poly::monomial(MultiIndex({0, 2})), 0.7, zs});
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
    SUBCASE("zero projection kills the Y block") {
        CheckRow row;
        const AugmentedSpec dead = project(aug, Eigen::MatrixXd::Zero(1, 2), &row);
        CHECK_FALSE(row.pass);
        const GeneratorMatrix gm = build_augmented_matrix(dead, 2);
        Eigen::VectorXd z(2);
        z << 0.4, 0.0;
        CHECK(conditional_moment(gm, {Poly::monomial(MultiIndex({0, 2})), 1.0, z}) ==
              doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("augmented degree conditions are enforced") {
    AugmentedSpec aug = example_model(1.0, 0.3, 0.5);
    aug.bY = {Poly::monomial(MultiIndex({3}))};  // degree 3 > n = 2
    CHECK_THROWS_AS(validate_augmented(aug), DegreeViolation);
}
