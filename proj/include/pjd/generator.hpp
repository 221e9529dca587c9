#ifndef PJD_GENERATOR_HPP
#define PJD_GENERATOR_HPP

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "pjd/marks.hpp"
#include "pjd/poly.hpp"
#include "pjd/report.hpp"

namespace pjd {

/// State space of the factor process, used only to sample validation points;
/// no geometric enforcement happens anywhere. Entries of lo/hi may be
/// +-infinity, which covers boxes, half-spaces, and orthants.
struct StateDomain {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    static StateDomain all(int d);
    static StateDomain box(Eigen::VectorXd lo, Eigen::VectorXd hi);
    static StateDomain positive_orthant(int d);

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Eigen::VectorXd& x) const;
    /// Uniform draw from the box, with infinite edges clipped to a window a
    /// few units wide and kept strictly inside open boundaries.
    Eigen::VectorXd sample(RandomSource& rng) const;
};

/// One finite-activity jump stream. The jump size applied to the factor is
///   delta(x, u) = (size0 + sum_i x_i size[i]) * u,   u ~ marks,
/// so each component is a degree-one polynomial loading times the scalar
/// mark. The optional size_y loading gives the (state-independent) jump of
/// the conditional-Levy component driven by the same event: delta_y(u) =
/// size_y * u.
struct JumpStream {
    double lambda = 0.0;
    MarkDist marks = MarkDist::point_mass(1.0);
    Eigen::VectorXd size0;                // d (may be zero length for pure-Y streams of a d=0 block)
    std::vector<Eigen::VectorXd> size;    // d loadings of length d; may be empty = state-independent
    Eigen::VectorXd size_y;               // e, empty when the stream does not touch Y

    int dim() const { return static_cast<int>(size0.size()); }
    int ydim() const { return static_cast<int>(size_y.size()); }
    bool state_dependent() const;
    /// Component k of the size loading as a polynomial in x.
    Poly size_poly(int k) const;
    /// delta(x, u) evaluated at a state (the loading vector times u).
    Eigen::VectorXd loading_at(const Eigen::VectorXd& x) const;
};

struct MarkJumpSpec {
    std::vector<JumpStream> streams;
};

/// Coefficient-level description of a polynomial jump-diffusion generator:
/// drift b, modified diffusion A~ = a + int xi xi' nu, and jump moment
/// polynomials M_alpha = int xi^alpha nu for |alpha| >= 3. The optional
/// kernel pins down the jump measure itself (needed for simulation and
/// pointwise carre-du-champ evaluations; the moments never determine it).
struct GeneratorSpec {
    int dim = 0;
    std::vector<Poly> drift;                                  // d, deg <= 1
    std::vector<std::vector<Poly>> mod_diffusion;             // d x d symmetric, deg <= 2
    std::map<MultiIndex, Poly, GradedLexLess> jump_moments;   // |alpha| >= 3, deg <= |alpha|
    int max_jump_order = 0;  // 0 = infer (max declared order, or unlimited without jumps)
    std::optional<MarkJumpSpec> kernel;
    StateDomain domain;

    static GeneratorSpec diffusion(int d, std::vector<Poly> drift, std::vector<std::vector<Poly>> mod_diff,
                                   StateDomain domain);
};

/// Matrix of the generator on an ordered monomial basis: column j holds the
/// coordinates of G applied to basis element j. First column is zero and the
/// matrix is block upper triangular in the graded order.
struct GeneratorMatrix {
    GradedBasis basis;
    Eigen::MatrixXd G;

    int size() const { return basis.size(); }
};

/// Highest jump-moment order resolvable from the spec (declared entries, a
/// kernel, or "no jumps at all" which covers every order with zeros).
int jump_moment_budget(const GeneratorSpec& spec);

/// M_alpha(x) = int xi^alpha nu(x, dxi); throws MissingJumpMoments past the
/// budget. |alpha| >= 3.
Poly jump_moment(const GeneratorSpec& spec, const MultiIndex& alpha);

/// Jump moments implied by a kernel for every 2 <= |alpha| <= max_order:
/// M_alpha(x) = sum_j lambda_j m_{|alpha|}(D_j) prod_k L^j_k(x)^{alpha_k}.
std::map<MultiIndex, Poly, GradedLexLess> moments_from_kernel(const MarkJumpSpec& kernel, int dim,
                                                              int max_order);

/// Second jump-moment matrix int xi xi' nu(x, dxi) as polynomials.
std::vector<std::vector<Poly>> kernel_second_moments(const MarkJumpSpec& kernel, int dim);

/// Compensator mean int xi nu(x, dxi) (one poly per component).
std::vector<Poly> kernel_mean(const MarkJumpSpec& kernel, int dim);

/// Degree bounds of the coefficient characterization plus kernel/declared
/// moment agreement; throws DegreeViolation / MomentMismatch on the first
/// failure. Returns the spec for fluent use.
const GeneratorSpec& validate_spec(const GeneratorSpec& spec);

/// Same checks, reported row by row instead of thrown (CLI `validate`).
ValidationReport validation_report(const GeneratorSpec& spec);

/// Symbolic application of the generator to a polynomial:
///   Gf = 1/2 sum_ik A~_ik d_i d_k f + b . grad f
///        + sum_{3 <= |g| <= deg f} (d^g f / g!) M_g.
Poly apply_generator(const GeneratorSpec& spec, const Poly& f);

GeneratorMatrix build_generator_matrix(const GeneratorSpec& spec, int n);

/// Carre-du-champ Gamma(f,g) = G(fg) - f Gg - g Gf, symbolically.
Poly carre_du_champ(const GeneratorSpec& spec, const Poly& f, const Poly& g);

/// Pointwise carre-du-champ for general (non-polynomial) scalar functions,
/// using the kernel representation:
///   grad f' a grad g + sum_j lambda_j E[(f(x+delta)-f(x))(g(x+delta)-g(x))]
/// with a = A~ - kernel second moments. Gradients by central differences
/// unless the caller provides them. Requires a kernel.
double gamma_pointwise(const GeneratorSpec& spec, const std::function<double(const Eigen::VectorXd&)>& f,
                       const std::function<double(const Eigen::VectorXd&)>& g, const Eigen::VectorXd& x,
                       int quadrature_nodes = 64);

/// Pure diffusion matrix a(x) = A~(x) - kernel second moments, evaluated at
/// x; throws NegativeDiffusion if the result is not PSD (beyond tolerance).
Eigen::MatrixXd diffusion_at(const GeneratorSpec& spec, const Eigen::VectorXd& x);

} // namespace pjd

#endif
