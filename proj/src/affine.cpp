#include "pjd/affine.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace pjd {

namespace {

class SplitMixSource final : public RandomSource {
public:
    explicit SplitMixSource(std::uint64_t s) : state_(s) {}
    double uniform() override {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
    }
    double normal() override {
        const double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t state_;
};

void check_affine_shapes(const AffineSpec& spec) {
    const int d = spec.dim;
    if (d < 1) throw Error("AffineSpec: dimension must be positive");
    if (static_cast<int>(spec.a.size()) != d + 1 || static_cast<int>(spec.b.size()) != d + 1 ||
        static_cast<int>(spec.nu.size()) != d + 1)
        throw DimensionMismatch("AffineSpec: need d+1 coefficient blocks");
    for (const auto& ai : spec.a)
        if (ai.rows() != d || ai.cols() != d) throw DimensionMismatch("AffineSpec: a_i must be d x d");
    for (const auto& bi : spec.b)
        if (bi.size() != d) throw DimensionMismatch("AffineSpec: b_i must be d-vectors");
    if (spec.domain.dim() != d) throw DimensionMismatch("AffineSpec: domain dimension mismatch");
}

} // namespace

const AffineSpec& validate_affine(const AffineSpec& spec) {
    check_affine_shapes(spec);
    const int d = spec.dim;
    SplitMixSource rng(0xaff1eULL);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::VectorXd x = spec.domain.sample(rng);
        Eigen::MatrixXd a = spec.a[0];
        for (int i = 0; i < d; ++i) a += x(i) * spec.a[i + 1];
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
        if (es.eigenvalues().minCoeff() < -1e-9 * scale) {
            std::ostringstream os;
            os << "a(x) not PSD at sampled x = [" << x.transpose() << "]";
            throw NegativeDiffusion(os.str());
        }
        // The combined measure must be nonnegative: check each mixture piece.
        std::map<std::string, double> combined;
        auto key_of = [](const Eigen::VectorXd& v, const char* tag) {
            std::ostringstream os;
            os << tag;
            for (int k = 0; k < v.size(); ++k) os << "," << v(k);
            return os.str();
        };
        for (int i = 0; i <= d; ++i) {
            const double xi = i == 0 ? 1.0 : x(i - 1);
            for (const auto& p : spec.nu[i].points) combined[key_of(p.location, "p")] += xi * p.weight;
            for (const auto& g : spec.nu[i].gaussians) combined[key_of(g.mean, "g")] += xi * g.weight;
        }
        for (const auto& [key, w] : combined)
            if (w < -1e-10)
                throw Error("combined jump measure has negative mass " + std::to_string(w) +
                            " at a sampled state (piece " + key + ")");
    }
    return spec;
}

namespace {

std::complex<double> jump_transform(const AffineJumpComponent& nu, const Eigen::VectorXcd& u) {
    std::complex<double> total = 0.0;
    // note: transpose, not adjoint -- u' xi must not conjugate u
    for (const auto& p : nu.points) {
        const std::complex<double> ux = (u.transpose() * p.location.cast<std::complex<double>>())(0);
        total += p.weight * (std::exp(ux) - 1.0 - ux);
    }
    for (const auto& g : nu.gaussians) {
        const std::complex<double> um = (u.transpose() * g.mean.cast<std::complex<double>>())(0);
        const std::complex<double> quad = (u.transpose() * g.cov.cast<std::complex<double>>() * u)(0);
        total += g.weight * (std::exp(um + 0.5 * quad) - 1.0 - um);
    }
    return total;
}

} // namespace

FRValue eval_FR(const AffineSpec& spec, const Eigen::VectorXcd& u) {
    check_affine_shapes(spec);
    const int d = spec.dim;
    if (u.size() != d) throw DimensionMismatch("eval_FR: u dimension mismatch");
    FRValue out;
    out.R.resize(d);
    auto block = [&](int i) {
        const std::complex<double> quad = 0.5 * (u.transpose() * spec.a[i].cast<std::complex<double>>() * u)(0);
        const std::complex<double> lin = (u.transpose() * spec.b[i].cast<std::complex<double>>())(0);
        return quad + lin + jump_transform(spec.nu[i], u);
    };
    out.F = block(0);
    for (int i = 0; i < d; ++i) out.R(i) = block(i + 1);
    return out;
}

namespace {

// Dormand-Prince 4(5) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

constexpr double kRelTol = 1e-10;
constexpr double kAbsTol = 1e-12;
constexpr double kNormLimit = 1e8;
constexpr double kMinStep = 1e-12;
// Accepted steps are capped so the output grid is fine enough for
// finite-difference consistency checks on the solution.
constexpr double kMaxStep = 4e-3;

} // namespace

RiccatiSolution solve_riccati(const AffineSpec& spec, const Eigen::VectorXcd& u, double T) {
    if (T <= 0.0) throw Error("solve_riccati: horizon must be positive");
    const int d = spec.dim;
    // ODE state: y = (phi, psi) packed as real/imaginary pairs.
    const int n = 2 * (1 + d);
    Eigen::VectorXd y(n);
    y(0) = 0.0;
    y(1) = 0.0;
    for (int i = 0; i < d; ++i) {
        y(2 + 2 * i) = u(i).real();
        y(3 + 2 * i) = u(i).imag();
    }
    auto unpack_psi = [d](const Eigen::VectorXd& s) {
        Eigen::VectorXcd psi(d);
        for (int i = 0; i < d; ++i) psi(i) = {s(2 + 2 * i), s(3 + 2 * i)};
        return psi;
    };
    auto rhs = [&](const Eigen::VectorXd& s) {
        const FRValue fr = eval_FR(spec, unpack_psi(s));
        Eigen::VectorXd dy(n);
        dy(0) = fr.F.real();
        dy(1) = fr.F.imag();
        for (int i = 0; i < d; ++i) {
            dy(2 + 2 * i) = fr.R(i).real();
            dy(3 + 2 * i) = fr.R(i).imag();
        }
        return dy;
    };

    RiccatiSolution sol;
    sol.u = u;
    sol.grid.push_back(0.0);
    sol.phi.push_back({0.0, 0.0});
    sol.psi.push_back(u);

    double tau = 0.0;
    double h = std::min(1e-3, T);
    Eigen::VectorXd k1 = rhs(y);
    while (tau < T) {
        h = std::min({h, kMaxStep, T - tau});
        const Eigen::VectorXd k2 = rhs(y + h * (A21 * k1));
        const Eigen::VectorXd k3 = rhs(y + h * (A31 * k1 + A32 * k2));
        const Eigen::VectorXd k4 = rhs(y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        const Eigen::VectorXd k5 = rhs(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        const Eigen::VectorXd k6 = rhs(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        const Eigen::VectorXd ynew = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        const Eigen::VectorXd k7 = rhs(ynew);
        const Eigen::VectorXd errvec = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

        double err = 0.0;
        bool finite = ynew.allFinite();
        if (finite)
            for (int i = 0; i < n; ++i) {
                const double scale = kAbsTol + kRelTol * std::max(std::abs(y(i)), std::abs(ynew(i)));
                err = std::max(err, std::abs(errvec(i)) / scale);
            }

        if (finite && err <= 1.0) {
            tau += h;
            y = ynew;
            k1 = k7;  // FSAL
            sol.grid.push_back(tau);
            sol.phi.push_back({y(0), y(1)});
            sol.psi.push_back(unpack_psi(y));
            if (unpack_psi(y).norm() > kNormLimit) {
                sol.status = RiccatiSolution::Status::blowup;
                sol.blowup_tau = tau;
                return sol;
            }
        }
        const double shrink = finite ? std::pow(std::max(err, 1e-10), -0.2) : 0.1;
        h *= std::clamp(0.9 * shrink, 0.1, 5.0);
        if (h < kMinStep) {
            sol.status = RiccatiSolution::Status::blowup;
            sol.blowup_tau = tau;
            return sol;
        }
    }
    sol.status = RiccatiSolution::Status::complete;
    return sol;
}

bool re_bound_satisfied(const RiccatiSolution& sol, const Eigen::VectorXd& x, double tol) {
    const double re = sol.phi_end().real() + sol.psi_end().real().dot(x);
    return re <= tol;
}

std::complex<double> affine_transform(const AffineSpec& spec, const RiccatiSolution& sol,
                                      const Eigen::VectorXd& x, double t, double T) {
    (void)spec;
    if (sol.status != RiccatiSolution::Status::complete)
        throw IncompleteSolution("affine transform undefined: Riccati solution blew up at tau = " +
                                 std::to_string(sol.blowup_tau));
    const double tau = T - t;
    if (tau < 0.0) throw Error("affine_transform: negative horizon");
    if (std::abs(sol.grid.back() - tau) > 1e-9)
        throw Error("affine_transform: solution horizon " + std::to_string(sol.grid.back()) +
                    " does not match requested tau " + std::to_string(tau));
    const std::complex<double> exponent =
        sol.phi_end() + (sol.psi_end().transpose() * x.cast<std::complex<double>>())(0);
    return std::exp(exponent);
}

double gaussian_raw_moment(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           const MultiIndex& alpha) {
    // Stein recursion: m_{a} = mu_i m_{a-e_i} + sum_j cov_ij (a_j - d_ij) m_{a-e_i-e_j}.
    std::map<MultiIndex, double, GradedLexLess> memo;
    std::function<double(const MultiIndex&)> rec = [&](const MultiIndex& a) -> double {
        if (a.degree() == 0) return 1.0;
        auto it = memo.find(a);
        if (it != memo.end()) return it->second;
        int i = 0;
        while (a[i] == 0) ++i;
        const MultiIndex am = a.minus_unit(i);
        double m = mean(i) * rec(am);
        for (int j = 0; j < a.dim(); ++j) {
            const int count = am[j];
            if (count > 0 && cov(i, j) != 0.0) m += cov(i, j) * count * rec(am.minus_unit(j));
        }
        memo.emplace(a, m);
        return m;
    };
    return rec(alpha);
}

namespace {

double component_moment(const AffineJumpComponent& nu, const MultiIndex& alpha) {
    double m = 0.0;
    for (const auto& p : nu.points) {
        double term = p.weight;
        for (int k = 0; k < alpha.dim(); ++k)
            for (int j = 0; j < alpha[k]; ++j) term *= p.location(k);
        m += term;
    }
    for (const auto& g : nu.gaussians) m += g.weight * gaussian_raw_moment(g.mean, g.cov, alpha);
    return m;
}

} // namespace

GeneratorSpec affine_to_generator(const AffineSpec& spec, int max_order) {
    check_affine_shapes(spec);
    const int d = spec.dim;
    GeneratorSpec out;
    out.dim = d;
    out.domain = spec.domain;
    out.drift.reserve(d);
    for (int k = 0; k < d; ++k) {
        Poly b = Poly::constant(d, spec.b[0](k));
        for (int i = 0; i < d; ++i) b.add_term(MultiIndex::unit(d, i), spec.b[i + 1](k));
        out.drift.push_back(b.prune());
    }
    out.mod_diffusion.assign(d, std::vector<Poly>(d, Poly(d)));
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            Poly entry = Poly::constant(d, spec.a[0](r, c));
            for (int i = 0; i < d; ++i) entry.add_term(MultiIndex::unit(d, i), spec.a[i + 1](r, c));
            // fold in the second jump moments
            const MultiIndex second = MultiIndex::unit(d, r).plus(MultiIndex::unit(d, c));
            entry.add_term(MultiIndex::zero(d), component_moment(spec.nu[0], second));
            for (int i = 0; i < d; ++i)
                entry.add_term(MultiIndex::unit(d, i), component_moment(spec.nu[i + 1], second));
            out.mod_diffusion[r][c] = entry.prune();
        }
    bool any_jumps = false;
    for (const auto& nu : spec.nu) any_jumps = any_jumps || !nu.empty();
    if (any_jumps) {
        const GradedBasis alphas(d, max_order);
        for (const auto& alpha : alphas.order()) {
            if (alpha.degree() < 3) continue;
            Poly m = Poly::constant(d, component_moment(spec.nu[0], alpha));
            for (int i = 0; i < d; ++i)
                m.add_term(MultiIndex::unit(d, i), component_moment(spec.nu[i + 1], alpha));
            m.prune();
            if (!m.is_zero()) out.jump_moments.emplace(alpha, m);
        }
        out.max_jump_order = max_order;
    }
    return out;
}

} // namespace pjd
