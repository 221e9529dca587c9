#include "pjd/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pjd {

namespace {
constexpr int kUnlimited = std::numeric_limits<int>::max();
constexpr double kRelTol = 1e-10;
constexpr double kAbsTol = 1e-12;

bool close(double a, double b) {
    return std::abs(a - b) <= kAbsTol + kRelTol * std::max(std::abs(a), std::abs(b));
}
} // namespace

PowerAugmented power_augment(const GeneratorSpec& spec, int n) {
    if (n < 1) throw Error("power_augment: n must be >= 1");
    validate_spec(spec);
    return {spec, n, GradedBasis(spec.dim, n)};
}

GeneratorMatrix PowerAugmented::matrix(int m) const {
    if (m < 0) throw Error("PowerAugmented::matrix: m must be >= 0");
    return build_generator_matrix(base, n * m);
}

std::vector<Poly> PowerAugmented::drift() const {
    const int N = components.size() - 1;
    std::vector<Poly> out;
    out.reserve(N);
    for (int j = 1; j <= N; ++j) {
        const Poly gh = apply_generator(base, Poly::monomial(components[j]));
        const std::vector<double> v = to_coordinates(gh, components);
        Poly lin = Poly::constant(N, v[0]);
        for (int i = 1; i <= N; ++i) lin.add_term(MultiIndex::unit(N, i - 1), v[i]);
        out.push_back(lin);
    }
    return out;
}

int mixed_moment_budget(const AugmentedSpec& aug) {
    if (aug.joint_kernel && aug.base.kernel) return kUnlimited;
    if (aug.max_mixed_order > 0) return aug.max_mixed_order;
    if (aug.mixed_moments.empty()) return kUnlimited;  // Y never jumps
    int order = 0;
    for (const auto& [key, p] : aug.mixed_moments)
        order = std::max(order, key.first.degree() + key.second.degree());
    return order;
}

namespace {

Poly kernel_mixed_moment(const AugmentedSpec& aug, const MultiIndex& alpha, const MultiIndex& beta) {
    const int d = aug.base.dim;
    Poly m(d);
    for (const auto& stream : aug.base.kernel->streams) {
        if (stream.ydim() != aug.e)
            throw DimensionMismatch("joint kernel stream has wrong Y dimension");
        double w = stream.lambda * stream.marks.raw_moment(alpha.degree() + beta.degree());
        for (int l = 0; l < aug.e; ++l)
            for (int k = 0; k < beta[l]; ++k) w *= stream.size_y(l);
        if (w == 0.0) continue;
        Poly prod = Poly::constant(d, w);
        for (int k = 0; k < d; ++k)
            if (alpha[k] > 0) prod = prod * stream.size_poly(k).pow(alpha[k]);
        m += prod;
    }
    return m;
}

} // namespace

Poly mixed_moment(const AugmentedSpec& aug, const MultiIndex& alpha, const MultiIndex& beta) {
    if (beta.is_zero()) return jump_moment(aug.base, alpha);
    const auto it = aug.mixed_moments.find({alpha, beta});
    if (it != aug.mixed_moments.end()) return it->second;
    if (alpha.degree() + beta.degree() <= mixed_moment_budget(aug)) {
        if (aug.joint_kernel && aug.base.kernel) return kernel_mixed_moment(aug, alpha, beta);
        return Poly(aug.base.dim);
    }
    throw MissingJumpMoments("mixed jump moment of order " +
                             std::to_string(alpha.degree() + beta.degree()) + " not available");
}

const AugmentedSpec& validate_augmented(const AugmentedSpec& aug) {
    validate_spec(aug.base);
    const int d = aug.base.dim, e = aug.e, n = aug.n;
    if (n < 1) throw Error("AugmentedSpec: n must be >= 1");
    if (static_cast<int>(aug.bY.size()) != e) throw DimensionMismatch("AugmentedSpec: bY size != e");
    if (static_cast<int>(aug.modAY.size()) != e) throw DimensionMismatch("AugmentedSpec: modAY rows != e");
    if (static_cast<int>(aug.modAXY.size()) != d) throw DimensionMismatch("AugmentedSpec: modAXY rows != d");
    for (int l = 0; l < e; ++l) {
        if (aug.bY[l].degree() > n)
            throw DegreeViolation("bY[" + std::to_string(l) + "] has degree " +
                                  std::to_string(aug.bY[l].degree()) + " > n = " + std::to_string(n));
        if (static_cast<int>(aug.modAY[l].size()) != e)
            throw DimensionMismatch("AugmentedSpec: modAY not square");
        for (int r = 0; r < e; ++r) {
            if (aug.modAY[l][r].degree() > 2 * n)
                throw DegreeViolation("modAY[" + std::to_string(l) + "][" + std::to_string(r) +
                                      "] has degree " + std::to_string(aug.modAY[l][r].degree()) +
                                      " > 2n = " + std::to_string(2 * n));
            if (!aug.modAY[l][r].same_terms(aug.modAY[r][l]))
                throw Error("modAY is not symmetric");
        }
    }
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(aug.modAXY[i].size()) != e)
            throw DimensionMismatch("AugmentedSpec: modAXY columns != e");
        for (int l = 0; l < e; ++l)
            if (aug.modAXY[i][l].degree() > 1 + n)
                throw DegreeViolation("modAXY[" + std::to_string(i) + "][" + std::to_string(l) +
                                      "] has degree " + std::to_string(aug.modAXY[i][l].degree()) +
                                      " > 1+n = " + std::to_string(1 + n));
    }
    for (const auto& [key, p] : aug.mixed_moments) {
        const auto& [alpha, beta] = key;
        if (alpha.dim() != d || beta.dim() != e)
            throw DimensionMismatch("mixed moment key dimension mismatch");
        if (beta.is_zero()) throw Error("mixed moments with beta = 0 belong in the base spec");
        if (alpha.degree() + beta.degree() < 3)
            throw Error("mixed moments of order below 3 belong in modAY / modAXY");
        const int bound = alpha.degree() + n * beta.degree();
        if (p.degree() > bound)
            throw DegreeViolation("mixed moment (" + alpha.str() + "," + beta.str() + ") has degree " +
                                  std::to_string(p.degree()) + " > " + std::to_string(bound));
    }
    // Declared mixed moments must agree with the joint kernel when present.
    if (aug.joint_kernel && aug.base.kernel && !aug.mixed_moments.empty()) {
        for (const auto& [key, p] : aug.mixed_moments) {
            const Poly derived = kernel_mixed_moment(aug, key.first, key.second);
            const Poly diff = p - derived;
            for (const auto& [gamma, c] : diff.terms())
                if (!close(p.coeff(gamma), derived.coeff(gamma)))
                    throw MomentMismatch("declared mixed moment (" + key.first.str() + "," +
                                         key.second.str() + ") disagrees with the joint kernel");
        }
    }
    return aug;
}

VmBasis build_vm_basis(int n, int m, int d, int e) {
    if (n < 1 || m < 0 || d < 1 || e < 0) throw Error("build_vm_basis: bad arguments");
    VmBasis vm{n, m, d, e, {}};
    std::vector<MultiIndex> betas;
    if (e == 0) {
        betas.push_back(MultiIndex::zero(0));
    } else {
        const GradedBasis ybasis(e, m);
        betas = ybasis.order();
    }
    for (const auto& beta : betas) {
        const GradedBasis xbasis(d, n * (m - beta.degree()));
        for (const auto& alpha : xbasis.order()) vm.pairs.emplace_back(alpha, beta);
    }
    std::sort(vm.pairs.begin(), vm.pairs.end(), [n](const auto& a, const auto& b) {
        const int ba = a.second.degree(), bb = b.second.degree();
        if (ba != bb) return ba < bb;
        const int wa = n * ba + a.first.degree(), wb = n * bb + b.first.degree();
        if (wa != wb) return wa < wb;
        GradedLexLess less;
        if (a.second != b.second) return less(a.second, b.second);
        return less(a.first, b.first);
    });
    return vm;
}

GradedBasis VmBasis::joint() const {
    std::vector<MultiIndex> order;
    order.reserve(pairs.size());
    for (const auto& [alpha, beta] : pairs) {
        std::vector<int> exps = alpha.exps();
        exps.insert(exps.end(), beta.exps().begin(), beta.exps().end());
        order.emplace_back(std::move(exps));
    }
    return GradedBasis(d + e, n * m, std::move(order));
}

namespace {

std::pair<MultiIndex, MultiIndex> split_joint(const MultiIndex& gamma, int d) {
    std::vector<int> a(gamma.exps().begin(), gamma.exps().begin() + d);
    std::vector<int> b(gamma.exps().begin() + d, gamma.exps().end());
    return {MultiIndex(std::move(a)), MultiIndex(std::move(b))};
}

Poly monomial_derivative(const Poly& f, const MultiIndex& gamma) {
    Poly dg = f;
    for (int i = 0; i < gamma.dim() && !dg.is_zero(); ++i)
        for (int k = 0; k < gamma[i] && !dg.is_zero(); ++k) dg = dg.derivative(i);
    return dg;
}

} // namespace

Poly apply_augmented_generator(const AugmentedSpec& aug, const Poly& f) {
    const int d = aug.base.dim, e = aug.e, dz = d + e;
    if (f.dim() != dz) throw DimensionMismatch("apply_augmented_generator: polynomial dimension mismatch");
    Poly result(dz);

    std::vector<Poly> grad(dz);
    for (int i = 0; i < dz; ++i) grad[i] = f.derivative(i);

    // Second order: A~X, A~XY (counted once with coefficient 1), A~Y.
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            const Poly second = grad[i].derivative(k);
            if (second.is_zero() || aug.base.mod_diffusion[i][k].is_zero()) continue;
            result += aug.base.mod_diffusion[i][k].embed(dz, 0) * second * 0.5;
        }
    for (int i = 0; i < d; ++i)
        for (int l = 0; l < e; ++l) {
            const Poly second = grad[i].derivative(d + l);
            if (second.is_zero() || aug.modAXY[i][l].is_zero()) continue;
            result += aug.modAXY[i][l].embed(dz, 0) * second;
        }
    for (int l = 0; l < e; ++l)
        for (int r = 0; r < e; ++r) {
            const Poly second = grad[d + l].derivative(d + r);
            if (second.is_zero() || aug.modAY[l][r].is_zero()) continue;
            result += aug.modAY[l][r].embed(dz, 0) * second * 0.5;
        }

    // First order.
    for (int i = 0; i < d; ++i)
        if (!grad[i].is_zero()) result += aug.base.drift[i].embed(dz, 0) * grad[i];
    for (int l = 0; l < e; ++l)
        if (!grad[d + l].is_zero()) result += aug.bY[l].embed(dz, 0) * grad[d + l];

    // Jump moments of order three and beyond.
    const int deg = f.degree();
    if (deg >= 3) {
        const GradedBasis enumeration(dz, deg);
        for (const auto& gamma : enumeration.order()) {
            if (gamma.degree() < 3) continue;
            const Poly dg = monomial_derivative(f, gamma);
            if (dg.is_zero()) continue;
            const auto [gx, gy] = split_joint(gamma, d);
            const Poly moment = mixed_moment(aug, gx, gy);
            if (moment.is_zero()) continue;
            result += dg * moment.embed(dz, 0) * (1.0 / multi_factorial(gamma));
        }
    }
    return result;
}

Poly apply_augmented_via_kernel(const AugmentedSpec& aug, const Poly& f) {
    if (!aug.base.kernel) throw KernelRequired("apply_augmented_via_kernel needs a kernel");
    const int d = aug.base.dim, e = aug.e, dz = d + e;
    if (f.dim() != dz) throw DimensionMismatch("apply_augmented_via_kernel: dimension mismatch");
    const auto& streams = aug.base.kernel->streams;

    // Pure diffusion blocks: strip the kernel's second moments off the
    // modified characteristics.
    std::vector<std::vector<Poly>> a(dz, std::vector<Poly>(dz, Poly(d)));
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) a[i][k] = aug.base.mod_diffusion[i][k];
    for (int i = 0; i < d; ++i)
        for (int l = 0; l < e; ++l) a[i][d + l] = a[d + l][i] = aug.modAXY[i][l];
    for (int l = 0; l < e; ++l)
        for (int r = 0; r < e; ++r) a[d + l][d + r] = aug.modAY[l][r];
    for (const auto& stream : streams) {
        std::vector<Poly> w(dz, Poly(d));
        for (int k = 0; k < d; ++k) w[k] = stream.size_poly(k);
        for (int l = 0; l < e; ++l) w[d + l] = Poly::constant(d, stream.ydim() > 0 ? stream.size_y(l) : 0.0);
        const double m2 = stream.lambda * stream.marks.raw_moment(2);
        for (int i = 0; i < dz; ++i)
            for (int k = 0; k < dz; ++k) a[i][k] -= w[i] * w[k] * m2;
    }

    Poly result(dz);
    std::vector<Poly> grad(dz);
    for (int i = 0; i < dz; ++i) grad[i] = f.derivative(i);
    for (int i = 0; i < dz; ++i)
        for (int k = 0; k < dz; ++k) {
            const Poly second = grad[i].derivative(k);
            if (second.is_zero() || a[i][k].is_zero()) continue;
            result += a[i][k].embed(dz, 0) * second * 0.5;
        }
    for (int i = 0; i < d; ++i)
        if (!grad[i].is_zero()) result += aug.base.drift[i].embed(dz, 0) * grad[i];
    for (int l = 0; l < e; ++l)
        if (!grad[d + l].is_zero()) result += aug.bY[l].embed(dz, 0) * grad[d + l];

    // Jump integral by direct expectation of the shifted polynomial: work in
    // dz+1 variables (z, u), substitute z_k -> z_k + u w_k(x), then replace
    // powers of u by raw mark moments.
    for (const auto& stream : streams) {
        std::vector<Poly> w(dz + 1, Poly(dz + 1));
        for (int k = 0; k < d; ++k) w[k] = stream.size_poly(k).embed(dz + 1, 0);
        for (int l = 0; l < e; ++l)
            w[d + l] = Poly::constant(dz + 1, stream.ydim() > 0 ? stream.size_y(l) : 0.0);
        const Poly u = Poly::variable(dz + 1, dz);

        Poly shifted(dz + 1);
        for (const auto& [gamma, c] : f.terms()) {
            Poly term = Poly::constant(dz + 1, c);
            for (int k = 0; k < dz; ++k) {
                if (gamma[k] == 0) continue;
                term = term * (Poly::variable(dz + 1, k) + u * w[k]).pow(gamma[k]);
            }
            shifted += term;
        }
        Poly integrand = shifted - f.embed(dz + 1, 0);
        for (int k = 0; k < dz; ++k)
            if (!grad[k].is_zero()) integrand -= u * w[k] * grad[k].embed(dz + 1, 0);

        // Group by power of u and integrate against the mark law.
        Poly expect(dz);
        for (const auto& [gamma, c] : integrand.terms()) {
            const int up = gamma[dz];
            std::vector<int> rest(gamma.exps().begin(), gamma.exps().end() - 1);
            expect.add_term(MultiIndex(std::move(rest)), c * stream.marks.raw_moment(up));
        }
        result += expect * stream.lambda;
    }
    return result;
}

GeneratorMatrix build_augmented_matrix(const AugmentedSpec& aug, int m) {
    validate_augmented(aug);
    const VmBasis vm = build_vm_basis(aug.n, m, aug.base.dim, aug.e);
    GradedBasis basis = vm.joint();
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (int j = 0; j < basis.size(); ++j) {
        const Poly gf = apply_augmented_generator(aug, Poly::monomial(basis[j]));
        for (const auto& [gamma, c] : gf.terms())
            if (!basis.contains(gamma))
                throw ClosureViolation("generator image of basis element " + basis[j].str() +
                                       " leaves V_m at monomial " + gamma.str());
        const std::vector<double> col = to_coordinates(gf, basis);
        for (int i = 0; i < basis.size(); ++i) G(i, j) = col[i];
    }
    return {std::move(basis), std::move(G)};
}

AugmentedSpec functional_augment(const GeneratorSpec& spec, const std::vector<Poly>& P,
                                 const std::vector<std::vector<Poly>>& Q, int max_order) {
    validate_spec(spec);
    const int d = spec.dim;
    const int e1 = static_cast<int>(P.size());
    const int e2 = static_cast<int>(Q.size());
    const int e = e1 + e2;
    int n = 1;
    for (const auto& p : P) n = std::max(n, p.degree());
    for (const auto& row : Q) {
        if (static_cast<int>(row.size()) != d)
            throw DimensionMismatch("functional_augment: Q rows must have one entry per state variable");
        for (const auto& q : row) n = std::max(n, q.degree() + 1);
    }

    AugmentedSpec aug;
    aug.base = spec;
    aug.n = n;
    aug.e = e;
    aug.bY.assign(e, Poly(d));
    for (int i = 0; i < e1; ++i) aug.bY[i] = P[i];
    for (int i = 0; i < e2; ++i) {
        Poly b(d);
        for (int k = 0; k < d; ++k) b += Q[i][k] * spec.drift[k];
        aug.bY[e1 + i] = b;
    }
    aug.modAY.assign(e, std::vector<Poly>(e, Poly(d)));
    for (int i = 0; i < e2; ++i)
        for (int j = 0; j < e2; ++j) {
            Poly v(d);
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) v += Q[i][k] * spec.mod_diffusion[k][l] * Q[j][l];
            aug.modAY[e1 + i][e1 + j] = v;
        }
    aug.modAXY.assign(d, std::vector<Poly>(e, Poly(d)));
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < e2; ++i) {
            Poly v(d);
            for (int l = 0; l < d; ++l) v += spec.mod_diffusion[k][l] * Q[i][l];
            aug.modAXY[k][e1 + i] = v;
        }

    // Mixed jump moments: int xi^alpha (Q(x) xi)^beta nu = sum over the
    // expansion of the xi-polynomial, evaluated through the base moments.
    const bool base_has_jumps = spec.kernel.has_value() || !spec.jump_moments.empty();
    if (base_has_jumps && e2 > 0) {
        max_order = std::min(max_order, jump_moment_budget(spec));
        const GradedBasis alphas(d, max_order);
        const GradedBasis betas(e2, max_order);
        for (const auto& beta : betas.order()) {
            if (beta.degree() == 0) continue;
            // (Q(x) xi)^beta in the doubled variables (x, xi)
            Poly qpow = Poly::constant(2 * d, 1.0);
            for (int i = 0; i < e2; ++i) {
                if (beta[i] == 0) continue;
                Poly row(2 * d);
                for (int k = 0; k < d; ++k) row += Q[i][k].embed(2 * d, 0) * Poly::variable(2 * d, d + k);
                qpow = qpow * row.pow(beta[i]);
            }
            for (const auto& alpha : alphas.order()) {
                if (alpha.degree() + beta.degree() < 3 || alpha.degree() + beta.degree() > max_order)
                    continue;
                Poly m(d);
                for (const auto& [gamma, c] : qpow.terms()) {
                    std::vector<int> xpart(gamma.exps().begin(), gamma.exps().begin() + d);
                    std::vector<int> xipart(gamma.exps().begin() + d, gamma.exps().end());
                    const MultiIndex order_idx = MultiIndex(std::move(xipart)).plus(alpha);
                    m += Poly::monomial(MultiIndex(std::move(xpart)), c) * jump_moment(spec, order_idx);
                }
                if (m.is_zero()) continue;
                std::vector<int> full_beta(e, 0);
                for (int i = 0; i < e2; ++i) full_beta[e1 + i] = beta[i];
                aug.mixed_moments.emplace(std::make_pair(alpha, MultiIndex(std::move(full_beta))), m);
            }
        }
        aug.max_mixed_order = max_order;
    }
    return aug;
}

CovariationComponents quadratic_covariation_components(const GeneratorSpec& spec, int i, int j) {
    const int d = spec.dim;
    if (i < 0 || i >= d || j < 0 || j >= d)
        throw DimensionMismatch("quadratic_covariation_components: index out of range");
    CovariationComponents out;
    out.compensator = carre_du_champ(spec, Poly::variable(d, i), Poly::variable(d, j));
    std::vector<Poly> row1(d, Poly(d)), row2(d, Poly(d));
    row1[j] = Poly::variable(d, i);  // integrand of int X_i dX_j
    row2[i] = Poly::variable(d, j);  // integrand of int X_j dX_i
    out.q_rows = {row1, row2};
    return out;
}

AugmentedSpec project(const AugmentedSpec& aug, const Eigen::MatrixXd& P, CheckRow* rank_warning) {
    const int e = aug.e;
    if (P.cols() != e) throw DimensionMismatch("project: P columns must match Y dimension");
    const int ep = static_cast<int>(P.rows());
    if (rank_warning) {
        const auto rank = Eigen::FullPivLU<Eigen::MatrixXd>(P).rank();
        *rank_warning = {"projection full row rank", rank == P.rows(),
                         static_cast<double>(rank - P.rows()),
                         rank == P.rows() ? "" : "projection drops directions"};
    }
    const int d = aug.base.dim;
    AugmentedSpec out;
    out.base = aug.base;
    out.n = aug.n;
    out.e = ep;
    out.bY.assign(ep, Poly(d));
    for (int i = 0; i < ep; ++i)
        for (int l = 0; l < e; ++l)
            if (P(i, l) != 0.0) out.bY[i] += aug.bY[l] * P(i, l);
    out.modAY.assign(ep, std::vector<Poly>(ep, Poly(d)));
    for (int i = 0; i < ep; ++i)
        for (int j = 0; j < ep; ++j)
            for (int l = 0; l < e; ++l)
                for (int r = 0; r < e; ++r)
                    if (P(i, l) != 0.0 && P(j, r) != 0.0)
                        out.modAY[i][j] += aug.modAY[l][r] * (P(i, l) * P(j, r));
    out.modAXY.assign(d, std::vector<Poly>(ep, Poly(d)));
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < ep; ++i)
            for (int l = 0; l < e; ++l)
                if (P(i, l) != 0.0) out.modAXY[k][i] += aug.modAXY[k][l] * P(i, l);

    if (aug.joint_kernel && aug.base.kernel) {
        // The kernel stays in family: Y loadings transform linearly.
        for (auto& stream : out.base.kernel->streams) {
            Eigen::VectorXd sy = stream.size_y.size() == e ? stream.size_y : Eigen::VectorXd::Zero(e);
            stream.size_y = P * sy;
        }
        out.joint_kernel = true;
        return out;
    }

    const int budget = mixed_moment_budget(aug);
    if (!aug.mixed_moments.empty()) {
        const int materialize = std::min(budget, 12);
        const GradedBasis alphas(d, materialize);
        const GradedBasis betas(ep, materialize);
        for (const auto& betap : betas.order()) {
            if (betap.degree() == 0) continue;
            // (P eta)^betap as a polynomial in the e original eta variables
            Poly ppow = Poly::constant(e, 1.0);
            for (int i = 0; i < ep; ++i) {
                if (betap[i] == 0) continue;
                Poly row(e);
                for (int l = 0; l < e; ++l) row.add_term(MultiIndex::unit(e, l), P(i, l));
                ppow = ppow * row.pow(betap[i]);
            }
            for (const auto& alpha : alphas.order()) {
                if (alpha.degree() + betap.degree() < 3 ||
                    alpha.degree() + betap.degree() > materialize)
                    continue;
                Poly m(d);
                for (const auto& [delta, c] : ppow.terms()) m += mixed_moment(aug, alpha, delta) * c;
                if (!m.is_zero()) out.mixed_moments.emplace(std::make_pair(alpha, betap), m);
            }
        }
        out.max_mixed_order = materialize;
    }
    return out;
}

} // namespace pjd
