#include "pjd/generator.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pjd {

namespace {
constexpr double kRelTol = 1e-10;
constexpr double kAbsTol = 1e-12;
constexpr int kUnlimited = std::numeric_limits<int>::max();
} // namespace

StateDomain StateDomain::all(int d) {
    const double inf = std::numeric_limits<double>::infinity();
    StateDomain s;
    s.lo = Eigen::VectorXd::Constant(d, -inf);
    s.hi = Eigen::VectorXd::Constant(d, inf);
    return s;
}

StateDomain StateDomain::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != hi.size()) throw DimensionMismatch("StateDomain: bound sizes differ");
    for (int i = 0; i < lo.size(); ++i)
        if (!(lo(i) < hi(i))) throw Error("StateDomain: need lo < hi");
    return {std::move(lo), std::move(hi)};
}

StateDomain StateDomain::positive_orthant(int d) {
    const double inf = std::numeric_limits<double>::infinity();
    StateDomain s;
    s.lo = Eigen::VectorXd::Zero(d);
    s.hi = Eigen::VectorXd::Constant(d, inf);
    return s;
}

bool StateDomain::contains(const Eigen::VectorXd& x) const {
    if (x.size() != lo.size()) throw DimensionMismatch("StateDomain::contains: dimension mismatch");
    for (int i = 0; i < x.size(); ++i)
        if (x(i) < lo(i) || x(i) > hi(i)) return false;
    return true;
}

Eigen::VectorXd StateDomain::sample(RandomSource& rng) const {
    Eigen::VectorXd x(lo.size());
    for (int i = 0; i < lo.size(); ++i) {
        const double u = rng.uniform();
        const bool lo_fin = std::isfinite(lo(i)), hi_fin = std::isfinite(hi(i));
        if (lo_fin && hi_fin)
            x(i) = lo(i) + (hi(i) - lo(i)) * (0.01 + 0.98 * u);
        else if (lo_fin)
            x(i) = lo(i) + 0.05 + 2.95 * u;
        else if (hi_fin)
            x(i) = hi(i) - 0.05 - 2.95 * u;
        else
            x(i) = 6.0 * u - 3.0;
    }
    return x;
}

bool JumpStream::state_dependent() const {
    for (const auto& s : size)
        if (s.norm() > 0.0) return true;
    return false;
}

Poly JumpStream::size_poly(int k) const {
    const int d = dim();
    Poly L = Poly::constant(d, size0(k));
    for (int i = 0; i < static_cast<int>(size.size()); ++i)
        L += Poly::variable(d, i) * size[i](k);
    return L;
}

Eigen::VectorXd JumpStream::loading_at(const Eigen::VectorXd& x) const {
    Eigen::VectorXd L = size0;
    for (int i = 0; i < static_cast<int>(size.size()); ++i) L += x(i) * size[i];
    return L;
}

GeneratorSpec GeneratorSpec::diffusion(int d, std::vector<Poly> drift,
                                       std::vector<std::vector<Poly>> mod_diff, StateDomain domain) {
    GeneratorSpec s;
    s.dim = d;
    s.drift = std::move(drift);
    s.mod_diffusion = std::move(mod_diff);
    s.domain = std::move(domain);
    return s;
}

int jump_moment_budget(const GeneratorSpec& spec) {
    if (spec.kernel) return kUnlimited;
    if (spec.max_jump_order > 0) return spec.max_jump_order;
    if (spec.jump_moments.empty()) return kUnlimited;  // no jumps: every moment is zero
    int order = 0;
    for (const auto& [alpha, p] : spec.jump_moments) order = std::max(order, alpha.degree());
    return order;
}

namespace {

Poly kernel_moment(const MarkJumpSpec& kernel, int dim, const MultiIndex& alpha) {
    Poly m(dim);
    for (const auto& stream : kernel.streams) {
        Poly prod = Poly::constant(dim, stream.lambda * stream.marks.raw_moment(alpha.degree()));
        for (int k = 0; k < dim; ++k)
            if (alpha[k] > 0) prod = prod * stream.size_poly(k).pow(alpha[k]);
        m += prod;
    }
    return m;
}

} // namespace

Poly jump_moment(const GeneratorSpec& spec, const MultiIndex& alpha) {
    if (alpha.degree() < 3) throw Error("jump_moment: only |alpha| >= 3 is stored separately");
    auto it = spec.jump_moments.find(alpha);
    if (it != spec.jump_moments.end()) return it->second;
    if (alpha.degree() <= jump_moment_budget(spec)) {
        if (spec.kernel) return kernel_moment(*spec.kernel, spec.dim, alpha);
        return Poly(spec.dim);
    }
    throw MissingJumpMoments("jump moment of order " + std::to_string(alpha.degree()) +
                             " requested, declared up to " + std::to_string(jump_moment_budget(spec)));
}

std::map<MultiIndex, Poly, GradedLexLess> moments_from_kernel(const MarkJumpSpec& kernel, int dim,
                                                              int max_order) {
    std::map<MultiIndex, Poly, GradedLexLess> out;
    const GradedBasis enumeration(dim, max_order);
    for (const auto& alpha : enumeration.order()) {
        if (alpha.degree() < 2) continue;
        out.emplace(alpha, kernel_moment(kernel, dim, alpha));
    }
    return out;
}

std::vector<std::vector<Poly>> kernel_second_moments(const MarkJumpSpec& kernel, int dim) {
    std::vector<std::vector<Poly>> S(dim, std::vector<Poly>(dim, Poly(dim)));
    for (const auto& stream : kernel.streams) {
        const double w = stream.lambda * stream.marks.raw_moment(2);
        for (int i = 0; i < dim; ++i)
            for (int k = i; k < dim; ++k) {
                const Poly term = stream.size_poly(i) * stream.size_poly(k) * w;
                S[i][k] += term;
                if (k != i) S[k][i] += term;
            }
    }
    return S;
}

std::vector<Poly> kernel_mean(const MarkJumpSpec& kernel, int dim) {
    std::vector<Poly> m(dim, Poly(dim));
    for (const auto& stream : kernel.streams) {
        const double w = stream.lambda * stream.marks.raw_moment(1);
        for (int k = 0; k < dim; ++k) m[k] += stream.size_poly(k) * w;
    }
    return m;
}

namespace {

class FixedSeedSource final : public RandomSource {
public:
    explicit FixedSeedSource(std::uint64_t s) : state_(s) {}
    double uniform() override {
        // splitmix64; plenty for drawing validation points
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

bool close(double a, double b) { return std::abs(a - b) <= kAbsTol + kRelTol * std::max(std::abs(a), std::abs(b)); }

void check_shapes(const GeneratorSpec& spec) {
    const int d = spec.dim;
    if (d < 1) throw Error("GeneratorSpec: dimension must be positive");
    if (static_cast<int>(spec.drift.size()) != d) throw DimensionMismatch("GeneratorSpec: drift size != dim");
    if (static_cast<int>(spec.mod_diffusion.size()) != d)
        throw DimensionMismatch("GeneratorSpec: mod_diffusion rows != dim");
    for (const auto& row : spec.mod_diffusion)
        if (static_cast<int>(row.size()) != d) throw DimensionMismatch("GeneratorSpec: mod_diffusion not square");
    if (spec.domain.dim() != d) throw DimensionMismatch("GeneratorSpec: domain dimension mismatch");
    if (spec.kernel)
        for (const auto& stream : spec.kernel->streams) {
            if (stream.dim() != d) throw DimensionMismatch("GeneratorSpec: stream size0 dimension mismatch");
            if (!stream.size.empty() && static_cast<int>(stream.size.size()) != d)
                throw DimensionMismatch("GeneratorSpec: stream needs one loading per state variable");
            if (stream.lambda <= 0.0) throw Error("GeneratorSpec: stream intensity must be positive");
        }
}

} // namespace

const GeneratorSpec& validate_spec(const GeneratorSpec& spec) {
    check_shapes(spec);
    const int d = spec.dim;
    for (int i = 0; i < d; ++i)
        if (spec.drift[i].degree() > 1)
            throw DegreeViolation("drift[" + std::to_string(i) + "] has degree " +
                                  std::to_string(spec.drift[i].degree()) + " > 1");
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            if (spec.mod_diffusion[i][k].degree() > 2)
                throw DegreeViolation("mod_diffusion[" + std::to_string(i) + "][" + std::to_string(k) +
                                      "] has degree " + std::to_string(spec.mod_diffusion[i][k].degree()) +
                                      " > 2");
            if (!spec.mod_diffusion[i][k].same_terms(spec.mod_diffusion[k][i]))
                throw Error("mod_diffusion is not symmetric at (" + std::to_string(i) + "," +
                            std::to_string(k) + ")");
        }
    for (const auto& [alpha, p] : spec.jump_moments) {
        if (alpha.degree() < 3) throw Error("jump_moments: order " + alpha.str() + " below 3 belongs in mod_diffusion");
        if (p.degree() > alpha.degree())
            throw DegreeViolation("jump_moment" + alpha.str() + " has degree " + std::to_string(p.degree()) +
                                  " > " + std::to_string(alpha.degree()));
    }
    if (spec.kernel) {
        // Declared moments must agree with the kernel, including implicit zeros.
        const int declared = spec.max_jump_order > 0 ? spec.max_jump_order
                             : spec.jump_moments.empty()
                                 ? 0
                                 : spec.jump_moments.rbegin()->first.degree();
        if (declared >= 3) {
            auto derived = moments_from_kernel(*spec.kernel, d, declared);
            const GradedBasis enumeration(d, declared);
            for (const auto& alpha : enumeration.order()) {
                if (alpha.degree() < 3) continue;
                auto it = spec.jump_moments.find(alpha);
                const Poly decl = it == spec.jump_moments.end() ? Poly(d) : it->second;
                const Poly diff = decl - derived.at(alpha);
                for (const auto& [beta, c] : diff.terms())
                    if (!close(decl.coeff(beta), derived.at(alpha).coeff(beta)))
                        throw MomentMismatch("declared jump_moment" + alpha.str() +
                                             " disagrees with kernel at coefficient " + beta.str());
            }
        }
        // Pointwise PSD of the reconstructed diffusion at sampled states.
        FixedSeedSource rng(0x5eedULL);
        for (int trial = 0; trial < 50; ++trial) {
            const Eigen::VectorXd x = spec.domain.sample(rng);
            diffusion_at(spec, x);  // throws NegativeDiffusion on failure
        }
    }
    // Even pure-jump moments are pointwise nonnegative where that is a
    // theorem (every exponent even).
    {
        FixedSeedSource rng(0xe7e7ULL);
        for (const auto& [alpha, p] : spec.jump_moments) {
            bool all_even = true;
            for (int i = 0; i < d; ++i) all_even = all_even && alpha[i] % 2 == 0;
            if (!all_even) continue;
            for (int trial = 0; trial < 20; ++trial) {
                const Eigen::VectorXd x = spec.domain.sample(rng);
                const double v = p.eval(std::span<const double>(x.data(), x.size()));
                if (v < -kRelTol)
                    throw MomentMismatch("even jump_moment" + alpha.str() + " is negative (" +
                                         std::to_string(v) + ") at a sampled state");
            }
        }
    }
    return spec;
}

ValidationReport validation_report(const GeneratorSpec& spec) {
    ValidationReport report;
    try {
        check_shapes(spec);
        report.add("shapes", true, 0.0);
    } catch (const Error& e) {
        report.add("shapes", false, 0.0, e.what());
        return report;
    }
    int worst_drift = 0;
    for (const auto& b : spec.drift) worst_drift = std::max(worst_drift, b.degree());
    report.add("drift degree <= 1", worst_drift <= 1, 1.0 - worst_drift);
    int worst_diff = 0;
    for (const auto& row : spec.mod_diffusion)
        for (const auto& a : row) worst_diff = std::max(worst_diff, a.degree());
    report.add("mod_diffusion degree <= 2", worst_diff <= 2, 2.0 - worst_diff);
    bool jumps_ok = true;
    double jump_margin = 0.0;
    for (const auto& [alpha, p] : spec.jump_moments) {
        jumps_ok = jumps_ok && p.degree() <= alpha.degree();
        jump_margin = std::min(jump_margin, static_cast<double>(alpha.degree() - p.degree()));
    }
    report.add("jump moment degrees", jumps_ok, jump_margin);
    try {
        validate_spec(spec);
        report.add("kernel/moment agreement", true, 0.0);
    } catch (const MomentMismatch& e) {
        report.add("kernel/moment agreement", false, 0.0, e.what());
    } catch (const NegativeDiffusion& e) {
        report.add("kernel/moment agreement", false, 0.0, e.what());
    } catch (const Error& e) {
        report.add("kernel/moment agreement", false, 0.0, e.what());
    }
    return report;
}

Poly apply_generator(const GeneratorSpec& spec, const Poly& f) {
    const int d = spec.dim;
    if (f.dim() != d) throw DimensionMismatch("apply_generator: polynomial dimension mismatch");
    Poly result(d);
    // Second-order part through the modified diffusion.
    std::vector<Poly> grad(d);
    for (int i = 0; i < d; ++i) grad[i] = f.derivative(i);
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
            const Poly second = grad[i].derivative(k);
            if (second.is_zero() || spec.mod_diffusion[i][k].is_zero()) continue;
            result += spec.mod_diffusion[i][k] * second * 0.5;
        }
        if (!grad[i].is_zero()) result += spec.drift[i] * grad[i];
    }
    // Jump moments of order three and beyond.
    const int deg = f.degree();
    if (deg >= 3) {
        const GradedBasis enumeration(d, deg);
        for (const auto& gamma : enumeration.order()) {
            if (gamma.degree() < 3) continue;
            Poly dg = f;
            for (int i = 0; i < d && !dg.is_zero(); ++i)
                for (int k = 0; k < gamma[i] && !dg.is_zero(); ++k) dg = dg.derivative(i);
            if (dg.is_zero()) continue;
            result += dg * jump_moment(spec, gamma) * (1.0 / multi_factorial(gamma));
        }
    }
    return result;
}

GeneratorMatrix build_generator_matrix(const GeneratorSpec& spec, int n) {
    GradedBasis basis(spec.dim, n);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (int j = 0; j < basis.size(); ++j) {
        const Poly gf = apply_generator(spec, Poly::monomial(basis[j]));
        const std::vector<double> col = to_coordinates(gf, basis);
        for (int i = 0; i < basis.size(); ++i) G(i, j) = col[i];
    }
    return {std::move(basis), std::move(G)};
}

Poly carre_du_champ(const GeneratorSpec& spec, const Poly& f, const Poly& g) {
    return apply_generator(spec, f * g) - f * apply_generator(spec, g) - g * apply_generator(spec, f);
}

Eigen::MatrixXd diffusion_at(const GeneratorSpec& spec, const Eigen::VectorXd& x) {
    const int d = spec.dim;
    Eigen::MatrixXd a(d, d);
    const std::span<const double> xs(x.data(), x.size());
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) a(i, k) = spec.mod_diffusion[i][k].eval(xs);
    if (spec.kernel) {
        for (const auto& stream : spec.kernel->streams) {
            const Eigen::VectorXd L = stream.loading_at(x);
            a -= stream.lambda * stream.marks.raw_moment(2) * (L * L.transpose());
        }
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
    if (es.eigenvalues().minCoeff() < -1e-9 * scale) {
        std::ostringstream os;
        os << "diffusion matrix not PSD at x = [" << x.transpose() << "], min eigenvalue "
           << es.eigenvalues().minCoeff();
        throw NegativeDiffusion(os.str());
    }
    return a;
}

double gamma_pointwise(const GeneratorSpec& spec, const std::function<double(const Eigen::VectorXd&)>& f,
                       const std::function<double(const Eigen::VectorXd&)>& g, const Eigen::VectorXd& x,
                       int quadrature_nodes) {
    if (!spec.kernel && !spec.jump_moments.empty())
        throw KernelRequired("gamma_pointwise needs a kernel when the spec has jumps");
    const int d = spec.dim;
    const Eigen::MatrixXd a = diffusion_at(spec, x);
    auto gradient = [d](const std::function<double(const Eigen::VectorXd&)>& fn, const Eigen::VectorXd& at) {
        Eigen::VectorXd grad(d);
        for (int i = 0; i < d; ++i) {
            const double h = 1e-5 * std::max(1.0, std::abs(at(i)));
            Eigen::VectorXd xp = at, xm = at;
            xp(i) += h;
            xm(i) -= h;
            grad(i) = (fn(xp) - fn(xm)) / (2.0 * h);
        }
        return grad;
    };
    double value = gradient(f, x).dot(a * gradient(g, x));
    if (spec.kernel) {
        const double fx = f(x), gx = g(x);
        for (const auto& stream : spec.kernel->streams) {
            const Eigen::VectorXd L = stream.loading_at(x);
            const int nodes = stream.marks.family() == MarkFamily::point_masses
                                  ? 0
                                  : std::max(64, quadrature_nodes);
            double expect = 0.0;
            for (const auto& [u, w] : stream.marks.expectation_rule(nodes)) {
                const Eigen::VectorXd shifted = x + u * L;
                expect += w * (f(shifted) - fx) * (g(shifted) - gx);
            }
            value += stream.lambda * expect;
        }
    }
    return value;
}

} // namespace pjd
