#ifndef PJD_MC_HPP
#define PJD_MC_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pjd/generator.hpp"
#include "pjd/timechange.hpp"
#include "pjd/transform.hpp"

namespace pjd {

/// Philox4x32-10 counter-based generator: the stream is a pure function of
/// (seed, path index, draw counter), so estimates are independent of how
/// paths are partitioned into batches or threads.
class CounterRng final : public RandomSource {
public:
    CounterRng(std::uint64_t seed, std::uint64_t path);

    double uniform() override;
    double normal() override;
    /// Mirror a stream for antithetic pairing: uniforms identical, normals
    /// negated.
    void set_antithetic(bool on) { antithetic_ = on; }

private:
    std::uint64_t next_u64();

    std::uint32_t key_[2];
    std::uint64_t path_;
    std::uint64_t counter_ = 0;
    std::uint32_t block_[4];
    int block_pos_ = 2;  // in units of u64 halves consumed
    bool antithetic_ = false;
    bool have_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

struct SimConfig {
    long long paths = 100000;
    int steps_per_unit = 500;
    std::uint64_t seed = 1;
    enum class Scheme { euler, exact_ou };
    Scheme scheme = Scheme::euler;
    bool antithetic = false;
    int threads = 1;
};

/// Path-level description of the joint process Z = (X, Y): polynomial drift
/// and pure-diffusion matrix (jump second moments stripped), plus the jump
/// streams whose loadings read the first dx coordinates. Everything the
/// Euler scheme needs and nothing it cannot use.
struct PathModel {
    int dz = 0;  // total state dimension
    int dx = 0;  // factor block (jump loadings and the domain act on it)
    std::vector<Poly> drift;                    // dz polys in dx variables
    std::vector<std::vector<Poly>> diffusion;   // dz x dz polys in dx variables (a(x), PSD)
    std::vector<JumpStream> streams;
    StateDomain domain;                         // factor domain, for exit counting
    Eigen::VectorXd z0;
};

/// Build a path model from a kernel-backed generator spec; moment-only jump
/// specs cannot be simulated (KernelRequired).
PathModel path_model(const GeneratorSpec& spec, const Eigen::VectorXd& x0);

/// Joint path model for (X, Y); needs the joint kernel when the base has
/// jumps that touch Y.
PathModel path_model(const AugmentedSpec& aug, const Eigen::VectorXd& z0);

/// Grid-accumulated path functionals int P(X) dt and int Q(X-) dX.
struct PathFunctionals {
    std::vector<Poly> P;
    std::vector<std::vector<Poly>> Q;
    int size() const { return static_cast<int>(P.size() + Q.size()); }
};

struct SimResult {
    Eigen::MatrixXd terminal;     // paths x dz
    Eigen::MatrixXd functionals;  // paths x (#P + #Q), zero columns when unused
    long long exits = 0;          // paths that left the factor domain at some step
    long long jumps = 0;          // total jump events
};

SimResult simulate(const PathModel& model, double T, const SimConfig& cfg,
                   const PathFunctionals* functionals = nullptr);

/// Two-stage simulation of X_{Z_T}: draw the subordinator value, then run X
/// over [0, Z_T]. Atoms plus drift only.
SimResult simulate_subordinated(const PathModel& model, const SubordinatorSpec& sub, double T,
                                const SimConfig& cfg);

struct EstimateWithSE {
    double mean = 0.0;
    double se = 0.0;
    long long paths = 0;
};

/// Sample mean and standard error of payoff(row) over the sample rows,
/// accumulated in row order (deterministic).
EstimateWithSE estimate(const std::function<double(const Eigen::VectorXd&)>& payoff,
                        const Eigen::MatrixXd& samples);

/// Polynomial payoff convenience.
EstimateWithSE estimate(const Poly& p, const Eigen::MatrixXd& samples);

} // namespace pjd

#endif
