#include "pjd/marks.hpp"

#include <cmath>

namespace pjd {

std::string to_string(MarkFamily f) {
    switch (f) {
        case MarkFamily::point_masses: return "point_masses";
        case MarkFamily::gaussian: return "gaussian";
        case MarkFamily::exponential: return "exponential";
        case MarkFamily::uniform: return "uniform";
    }
    return "?";
}

MarkDist MarkDist::point_masses(std::vector<double> values, std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size())
        throw Error("MarkDist: point-mass values/probs size mismatch");
    double total = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw Error("MarkDist: negative point-mass probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error("MarkDist: point-mass probabilities must sum to 1");
    std::vector<double> params(values);
    params.insert(params.end(), probs.begin(), probs.end());
    return MarkDist(MarkFamily::point_masses, std::move(params));
}

MarkDist MarkDist::gaussian(double mean, double sd) {
    if (sd < 0.0) throw Error("MarkDist: gaussian sd must be nonnegative");
    return MarkDist(MarkFamily::gaussian, {mean, sd});
}

MarkDist MarkDist::exponential(double rate) {
    if (rate <= 0.0) throw Error("MarkDist: exponential rate must be positive");
    return MarkDist(MarkFamily::exponential, {rate});
}

MarkDist MarkDist::uniform(double lo, double hi) {
    if (hi <= lo) throw Error("MarkDist: uniform needs lo < hi");
    return MarkDist(MarkFamily::uniform, {lo, hi});
}

double MarkDist::raw_moment(int k) const {
    if (k < 0) throw Error("MarkDist::raw_moment: negative order");
    if (k == 0) return 1.0;
    switch (family_) {
        case MarkFamily::point_masses: {
            const size_t n = params_.size() / 2;
            double m = 0.0;
            for (size_t i = 0; i < n; ++i) m += params_[n + i] * std::pow(params_[i], k);
            return m;
        }
        case MarkFamily::gaussian: {
            // m_k = mean*m_{k-1} + (k-1)*sd^2*m_{k-2}
            const double mu = params_[0], s2 = params_[1] * params_[1];
            double m_prev = 1.0, m = mu;
            for (int j = 2; j <= k; ++j) {
                const double m_next = mu * m + (j - 1) * s2 * m_prev;
                m_prev = m;
                m = m_next;
            }
            return m;
        }
        case MarkFamily::exponential: {
            double m = 1.0;
            for (int j = 1; j <= k; ++j) m *= j / params_[0];
            return m;
        }
        case MarkFamily::uniform: {
            const double a = params_[0], b = params_[1];
            return (std::pow(b, k + 1) - std::pow(a, k + 1)) / ((k + 1) * (b - a));
        }
    }
    return 0.0;
}

bool MarkDist::has_exp_moment(double c) const {
    return family_ != MarkFamily::exponential || c < params_[0];
}

double MarkDist::exp_moment(double c) const {
    switch (family_) {
        case MarkFamily::point_masses: {
            const size_t n = params_.size() / 2;
            double m = 0.0;
            for (size_t i = 0; i < n; ++i) m += params_[n + i] * std::exp(c * params_[i]);
            return m;
        }
        case MarkFamily::gaussian:
            return std::exp(c * params_[0] + 0.5 * c * c * params_[1] * params_[1]);
        case MarkFamily::exponential: {
            if (c >= params_[0])
                throw ExponentialMomentFailure("exp moment diverges: tilt " + std::to_string(c) +
                                               " >= exponential rate " + std::to_string(params_[0]));
            return params_[0] / (params_[0] - c);
        }
        case MarkFamily::uniform: {
            const double a = params_[0], b = params_[1];
            if (c == 0.0) return 1.0;
            return (std::exp(c * b) - std::exp(c * a)) / (c * (b - a));
        }
    }
    return 0.0;
}

double MarkDist::mean_exp_moment(double c) const {
    switch (family_) {
        case MarkFamily::point_masses: {
            const size_t n = params_.size() / 2;
            double m = 0.0;
            for (size_t i = 0; i < n; ++i) m += params_[n + i] * params_[i] * std::exp(c * params_[i]);
            return m;
        }
        case MarkFamily::gaussian: {
            const double mu = params_[0], s2 = params_[1] * params_[1];
            return (mu + c * s2) * std::exp(c * mu + 0.5 * c * c * s2);
        }
        case MarkFamily::exponential: {
            if (c >= params_[0])
                throw ExponentialMomentFailure("exp moment diverges: tilt " + std::to_string(c) +
                                               " >= exponential rate " + std::to_string(params_[0]));
            const double r = params_[0];
            return r / ((r - c) * (r - c));
        }
        case MarkFamily::uniform: {
            const double a = params_[0], b = params_[1];
            if (c == 0.0) return 0.5 * (a + b);
            const double ea = std::exp(c * a), eb = std::exp(c * b);
            return ((b * eb - a * ea) * c - (eb - ea)) / (c * c * (b - a));
        }
    }
    return 0.0;
}

std::pair<double, MarkDist> MarkDist::tilt(double c) const {
    switch (family_) {
        case MarkFamily::point_masses: {
            const size_t n = params_.size() / 2;
            std::vector<double> values(params_.begin(), params_.begin() + n);
            std::vector<double> probs(n);
            double mass = 0.0;
            for (size_t i = 0; i < n; ++i) {
                probs[i] = params_[n + i] * std::exp(-c * params_[i]);
                mass += probs[i];
            }
            for (double& p : probs) p /= mass;
            return {mass, point_masses(std::move(values), std::move(probs))};
        }
        case MarkFamily::gaussian: {
            const double mu = params_[0], sd = params_[1];
            const double mass = std::exp(-c * mu + 0.5 * c * c * sd * sd);
            return {mass, gaussian(mu - c * sd * sd, sd)};
        }
        case MarkFamily::exponential: {
            const double r = params_[0];
            if (r + c <= 0.0)
                throw ExponentialMomentFailure("tilted exponential rate would be nonpositive");
            return {r / (r + c), exponential(r + c)};
        }
        case MarkFamily::uniform:
            throw UnsupportedMarkFamily("exponential tilt leaves the uniform family");
    }
    throw UnsupportedMarkFamily("unknown mark family");
}

std::vector<std::pair<double, double>> MarkDist::expectation_rule(int nodes) const {
    std::vector<std::pair<double, double>> rule;
    switch (family_) {
        case MarkFamily::point_masses: {
            const size_t n = params_.size() / 2;
            for (size_t i = 0; i < n; ++i) rule.emplace_back(params_[i], params_[n + i]);
            return rule;
        }
        case MarkFamily::gaussian: {
            const QuadratureRule gh = gauss_hermite(nodes);
            const double norm = 1.0 / std::sqrt(M_PI);
            for (int i = 0; i < gh.size(); ++i)
                rule.emplace_back(params_[0] + std::sqrt(2.0) * params_[1] * gh.nodes[i],
                                  norm * gh.weights[i]);
            return rule;
        }
        case MarkFamily::exponential: {
            const QuadratureRule gl = gauss_laguerre(nodes);
            for (int i = 0; i < gl.size(); ++i) rule.emplace_back(gl.nodes[i] / params_[0], gl.weights[i]);
            return rule;
        }
        case MarkFamily::uniform: {
            const QuadratureRule leg = gauss_legendre(nodes);
            const double a = params_[0], b = params_[1];
            for (int i = 0; i < leg.size(); ++i)
                rule.emplace_back(0.5 * (a + b) + 0.5 * (b - a) * leg.nodes[i], 0.5 * leg.weights[i]);
            return rule;
        }
    }
    return rule;
}

double MarkDist::sample(RandomSource& rng) const {
    switch (family_) {
        case MarkFamily::point_masses: {
            const size_t n = params_.size() / 2;
            double u = rng.uniform();
            for (size_t i = 0; i < n; ++i) {
                u -= params_[n + i];
                if (u <= 0.0) return params_[i];
            }
            return params_[n - 1];
        }
        case MarkFamily::gaussian:
            return params_[0] + params_[1] * rng.normal();
        case MarkFamily::exponential:
            return -std::log(rng.uniform()) / params_[0];
        case MarkFamily::uniform:
            return params_[0] + (params_[1] - params_[0]) * rng.uniform();
    }
    return 0.0;
}

} // namespace pjd
