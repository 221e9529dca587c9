#ifndef PJD_MARKS_HPP
#define PJD_MARKS_HPP

#include <string>
#include <utility>
#include <vector>

#include "pjd/errors.hpp"
#include "pjd/quadrature.hpp"

namespace pjd {

/// Source of randomness handed to sampling routines. The Monte Carlo engine
/// supplies a counter-based implementation; tests may supply anything.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual double uniform() = 0;  // U(0,1), never exactly 0
    virtual double normal() = 0;   // N(0,1)
};

enum class MarkFamily { point_masses, gaussian, exponential, uniform };

std::string to_string(MarkFamily f);

/// Scalar mark distribution with closed-form raw moments of all orders.
/// A jump stream's size map is a (state-dependent) vector loading times a
/// draw from one of these families.
class MarkDist {
public:
    /// Point-mass mixture sum p_k delta_{v_k}; probabilities must sum to 1.
    static MarkDist point_masses(std::vector<double> values, std::vector<double> probs);
    static MarkDist point_mass(double value) { return point_masses({value}, {1.0}); }
    static MarkDist gaussian(double mean, double sd);
    static MarkDist exponential(double rate);
    static MarkDist uniform(double lo, double hi);

    MarkFamily family() const { return family_; }
    const std::vector<double>& params() const { return params_; }

    /// E[U^k], closed form.
    double raw_moment(int k) const;
    double mean() const { return raw_moment(1); }

    /// Whether E[e^{cU}] is finite.
    bool has_exp_moment(double c) const;
    /// E[e^{cU}]; throws ExponentialMomentFailure when divergent.
    double exp_moment(double c) const;
    /// E[U e^{cU}]; same finiteness condition as exp_moment.
    double mean_exp_moment(double c) const;

    /// Exponential tilt: returns (mass, D') with dD'/dD proportional to
    /// e^{-cU} and mass = E[e^{-cU}], so that e^{-cu} D(du) = mass * D'(du).
    /// Uniform marks do not stay in family and are rejected.
    std::pair<double, MarkDist> tilt(double c) const;

    /// Pairs (u_i, w_i) with E[f(U)] ~= sum w_i f(u_i); exact for point
    /// masses, Gauss-type rules otherwise.
    std::vector<std::pair<double, double>> expectation_rule(int nodes) const;

    double sample(RandomSource& rng) const;

    bool operator==(const MarkDist& o) const {
        return family_ == o.family_ && params_ == o.params_;
    }

private:
    MarkDist(MarkFamily family, std::vector<double> params)
        : family_(family), params_(std::move(params)) {}

    MarkFamily family_;
    // point_masses: [v_1..v_k, p_1..p_k]; gaussian: [mean, sd];
    // exponential: [rate]; uniform: [lo, hi]
    std::vector<double> params_;
};

} // namespace pjd

#endif
