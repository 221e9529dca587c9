#include "pjd/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pjd {

namespace {

// Pade-13 numerator coefficients (Higham 2005).
constexpr double kPade13[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                              1187353796428800.0,  129060195264000.0,   10559470521600.0,
                              670442572800.0,      33522128640.0,       1323241920.0,
                              40840800.0,          960960.0,            16380.0,
                              182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;
constexpr int kMaxSquarings = 64;

} // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw DimensionMismatch("expm: matrix must be square");
    if (!A.allFinite()) throw Error("expm: non-finite entries");
    const int n = static_cast<int>(A.rows());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

    const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
    if (norm1 == 0.0) return I;
    int squarings = 0;
    if (norm1 > kTheta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
        if (squarings > kMaxSquarings)
            throw Error("expm: norm " + std::to_string(norm1) + " beyond scaling budget");
    }
    const Eigen::MatrixXd As = A / std::ldexp(1.0, squarings);

    const Eigen::MatrixXd A2 = As * As;
    const Eigen::MatrixXd A4 = A2 * A2;
    const Eigen::MatrixXd A6 = A4 * A2;
    const Eigen::MatrixXd U =
        As * (A6 * (kPade13[13] * A6 + kPade13[11] * A4 + kPade13[9] * A2) + kPade13[7] * A6 +
              kPade13[5] * A4 + kPade13[3] * A2 + kPade13[1] * I);
    const Eigen::MatrixXd V = A6 * (kPade13[12] * A6 + kPade13[10] * A4 + kPade13[8] * A2) +
                              kPade13[6] * A6 + kPade13[4] * A4 + kPade13[2] * A2 + kPade13[0] * I;

    Eigen::MatrixXd R = (V - U).partialPivLu().solve(V + U);
    for (int s = 0; s < squarings; ++s) R = R * R;
    return R;
}

double conditional_moment(const GeneratorMatrix& gm, const MomentQuery& q) {
    if (q.horizon < 0.0) throw Error("conditional_moment: negative horizon");
    const std::span<const double> xs(q.state.data(), q.state.size());
    if (q.horizon == 0.0) return q.p.eval(xs);
    const std::vector<double> vp = to_coordinates(q.p, gm.basis);
    const std::vector<double> h = gm.basis.eval_monomials(xs);
    const Eigen::Map<const Eigen::VectorXd> vpv(vp.data(), vp.size());
    const Eigen::Map<const Eigen::RowVectorXd> hv(h.data(), h.size());
    return hv * expm(q.horizon * gm.G) * vpv;
}

std::vector<double> moment_path(const GeneratorMatrix& gm, const Poly& p, const Eigen::VectorXd& x,
                                const std::vector<double>& horizons) {
    if (!std::is_sorted(horizons.begin(), horizons.end()))
        throw Error("moment_path: grid must be ascending");
    const std::vector<double> vp = to_coordinates(p, gm.basis);
    const std::vector<double> h = gm.basis.eval_monomials(std::span<const double>(x.data(), x.size()));
    const Eigen::Map<const Eigen::VectorXd> vpv(vp.data(), vp.size());
    const Eigen::Map<const Eigen::RowVectorXd> hv(h.data(), h.size());

    std::map<double, Eigen::MatrixXd> step_cache;
    Eigen::MatrixXd accum = Eigen::MatrixXd::Identity(gm.size(), gm.size());
    std::vector<double> out;
    out.reserve(horizons.size());
    double prev = 0.0;
    for (double tau : horizons) {
        if (tau < 0.0) throw Error("moment_path: negative horizon");
        const double step = tau - prev;
        if (step > 0.0) {
            auto it = step_cache.find(step);
            if (it == step_cache.end()) it = step_cache.emplace(step, expm(step * gm.G)).first;
            accum = accum * it->second;
        }
        prev = tau;
        out.push_back(hv * accum * vpv);
    }
    return out;
}

Poly propagate(const GeneratorMatrix& gm, const Poly& f, double tau) {
    const std::vector<double> vf = to_coordinates(f, gm.basis);
    const Eigen::Map<const Eigen::VectorXd> vfe(vf.data(), vf.size());
    const Eigen::VectorXd out = expm(tau * gm.G) * vfe;
    return from_coordinates(std::span<const double>(out.data(), out.size()), gm.basis);
}

double multi_time_moment(const GeneratorMatrix& gm, const std::vector<Poly>& factors,
                         const std::vector<double>& times, const Eigen::VectorXd& x) {
    if (factors.empty() || factors.size() != times.size())
        throw Error("multi_time_moment: need one factor per time");
    if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0)
        throw Error("multi_time_moment: times must be ascending and nonnegative");
    Poly f = factors.back();
    for (int k = static_cast<int>(factors.size()) - 1; k > 0; --k)
        f = factors[k - 1] * propagate(gm, f, times[k] - times[k - 1]);
    return conditional_moment(gm, {f, times.front(), x});
}

} // namespace pjd
