#include "pjd/mc.hpp"

#include <cmath>
#include <thread>

namespace pjd {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t out[4] = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    ctr[0] = out[0];
    ctr[1] = out[1];
    ctr[2] = out[2];
    ctr[3] = out[3];
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t path) : path_(path) {
    key_[0] = static_cast<std::uint32_t>(seed);
    key_[1] = static_cast<std::uint32_t>(seed >> 32);
}

std::uint64_t CounterRng::next_u64() {
    if (block_pos_ >= 2) {
        std::uint32_t ctr[4] = {static_cast<std::uint32_t>(counter_),
                                static_cast<std::uint32_t>(counter_ >> 32),
                                static_cast<std::uint32_t>(path_),
                                static_cast<std::uint32_t>(path_ >> 32)};
        std::uint32_t key[2] = {key_[0], key_[1]};
        for (int r = 0; r < 10; ++r) {
            philox_round(ctr, key);
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        block_[0] = ctr[0];
        block_[1] = ctr[1];
        block_[2] = ctr[2];
        block_[3] = ctr[3];
        ++counter_;
        block_pos_ = 0;
    }
    const std::uint64_t lo = block_[2 * block_pos_];
    const std::uint64_t hi = block_[2 * block_pos_ + 1];
    ++block_pos_;
    return (hi << 32) | lo;
}

double CounterRng::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
    if (have_cached_normal_) {
        have_cached_normal_ = false;
        return antithetic_ ? -cached_normal_ : cached_normal_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cached_normal_ = r * std::sin(2.0 * M_PI * u2);
    have_cached_normal_ = true;
    const double z = r * std::cos(2.0 * M_PI * u2);
    return antithetic_ ? -z : z;
}

namespace {

/// Flat polynomial evaluator; std::map iteration is too slow inside the
/// inner Euler loop.
struct CompiledPoly {
    struct Term {
        double c;
        std::vector<int> exps;
    };
    std::vector<Term> terms;
    int degree = 0;

    static CompiledPoly from(const Poly& p) {
        CompiledPoly out;
        out.degree = p.degree();
        for (const auto& [alpha, c] : p.terms()) out.terms.push_back({c, alpha.exps()});
        return out;
    }

    double eval(const Eigen::VectorXd& x) const {
        double sum = 0.0;
        for (const auto& t : terms) {
            double v = t.c;
            for (size_t i = 0; i < t.exps.size(); ++i) {
                const double xi = x(static_cast<int>(i));
                for (int k = 0; k < t.exps[i]; ++k) v *= xi;
            }
            sum += v;
        }
        return sum;
    }
};

struct CompiledModel {
    int dz, dx;
    std::vector<CompiledPoly> drift;
    std::vector<std::vector<CompiledPoly>> diffusion;
    bool diffusion_diagonal = true;
    std::vector<CompiledPoly> compensator;  // sum_j lambda_j E[u] W_j(x), per z-component
    const PathModel* model;

    explicit CompiledModel(const PathModel& m) : dz(m.dz), dx(m.dx), model(&m) {
        for (const auto& b : m.drift) drift.push_back(CompiledPoly::from(b));
        diffusion.resize(dz);
        for (int i = 0; i < dz; ++i)
            for (int k = 0; k < dz; ++k) {
                diffusion[i].push_back(CompiledPoly::from(m.diffusion[i][k]));
                if (i != k && !m.diffusion[i][k].is_zero()) diffusion_diagonal = false;
            }
        std::vector<Poly> comp(dz, Poly(dx));
        for (const auto& stream : m.streams) {
            const double lm = stream.lambda * stream.marks.raw_moment(1);
            if (lm == 0.0) continue;
            for (int k = 0; k < dx; ++k) comp[k] += stream.size_poly(k) * lm;
            for (int l = 0; l < dz - dx; ++l)
                if (stream.ydim() > 0) comp[dx + l] += Poly::constant(dx, stream.size_y(l) * lm);
        }
        for (const auto& c : comp) compensator.push_back(CompiledPoly::from(c));
    }
};

/// One Euler increment over dt (no jumps inside).
void euler_step(const CompiledModel& cm, Eigen::VectorXd& z, double dt, CounterRng& rng,
                Eigen::VectorXd& scratch_x) {
    const int dz = cm.dz;
    scratch_x = z.head(cm.dx);
    Eigen::VectorXd dznoise(dz);
    const double sqdt = std::sqrt(dt);
    if (cm.diffusion_diagonal) {
        for (int i = 0; i < dz; ++i) {
            const double a = std::max(0.0, cm.diffusion[i][i].eval(scratch_x));
            dznoise(i) = std::sqrt(a) * sqdt * rng.normal();
        }
    } else {
        Eigen::MatrixXd a(dz, dz);
        for (int i = 0; i < dz; ++i)
            for (int k = 0; k < dz; ++k) a(i, k) = cm.diffusion[i][k].eval(scratch_x);
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        Eigen::MatrixXd root;
        if (llt.info() == Eigen::Success) {
            root = llt.matrixL();
        } else {
            // clamp to the PSD cone (Euler excursions can leave it)
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
            root = es.eigenvectors() *
                   es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
        }
        Eigen::VectorXd normals(dz);
        for (int i = 0; i < dz; ++i) normals(i) = rng.normal();
        dznoise = root * normals * sqdt;
    }
    for (int i = 0; i < dz; ++i)
        z(i) += (cm.drift[i].eval(scratch_x) - cm.compensator[i].eval(scratch_x)) * dt + dznoise(i);
}

/// Exact one-dimensional OU transition (scheme == exact_ou).
void exact_ou_step(const PathModel& m, Eigen::VectorXd& z, double dt, CounterRng& rng) {
    // drift = kappa (theta - x); constant diffusion sigma^2
    const double b0 = m.drift[0].coeff(MultiIndex::zero(1));
    const double b1 = m.drift[0].coeff(MultiIndex({1}));
    const double kappa = -b1;
    const double sigma2 = m.diffusion[0][0].coeff(MultiIndex::zero(1));
    const double x = z(0);
    if (kappa == 0.0) {
        z(0) = x + b0 * dt + std::sqrt(sigma2 * dt) * rng.normal();
        return;
    }
    const double theta = b0 / kappa;
    const double decay = std::exp(-kappa * dt);
    const double var = sigma2 / (2.0 * kappa) * (1.0 - decay * decay);
    z(0) = theta + (x - theta) * decay + std::sqrt(var) * rng.normal();
}

struct FunctionalState {
    std::vector<CompiledPoly> P;
    std::vector<std::vector<CompiledPoly>> Q;
};

void run_one_path(const CompiledModel& cm, double T, const SimConfig& cfg, std::uint64_t path_index,
                  const FunctionalState* fn, Eigen::VectorXd& terminal_out,
                  Eigen::VectorXd& functional_out, long long& exits, long long& jumps) {
    const PathModel& m = *cm.model;
    CounterRng rng(cfg.seed, cfg.antithetic ? path_index / 2 : path_index);
    rng.set_antithetic(cfg.antithetic && path_index % 2 == 1);

    Eigen::VectorXd z = m.z0;
    Eigen::VectorXd x_scratch(m.dx);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(fn ? static_cast<int>(fn->P.size() + fn->Q.size()) : 0);

    // next jump time per stream
    std::vector<double> next_jump(m.streams.size());
    for (size_t j = 0; j < m.streams.size(); ++j)
        next_jump[j] = -std::log(rng.uniform()) / m.streams[j].lambda;

    const double h = 1.0 / cfg.steps_per_unit;
    bool exited = false;
    double t = 0.0;
    while (t < T) {
        // next event: the next canonical grid point or the earliest jump
        double t_next = std::min(T, h * (std::floor(t / h + 1e-9) + 1.0));
        int jump_stream = -1;
        for (size_t j = 0; j < m.streams.size(); ++j)
            if (next_jump[j] < t_next) {
                t_next = next_jump[j];
                jump_stream = static_cast<int>(j);
            }
        const double dt = t_next - t;
        const Eigen::VectorXd z_pre_step = z;
        if (dt > 0.0) {
            if (cfg.scheme == SimConfig::Scheme::exact_ou)
                exact_ou_step(m, z, dt, rng);
            else
                euler_step(cm, z, dt, rng, x_scratch);
        }
        if (fn) {
            const Eigen::VectorXd xs = z_pre_step.head(m.dx);
            int col = 0;
            for (const auto& p : fn->P) acc(col++) += p.eval(xs) * dt;
            for (const auto& qrow : fn->Q) {
                double val = 0.0;
                for (int k = 0; k < m.dx; ++k) val += qrow[k].eval(xs) * (z(k) - z_pre_step(k));
                acc(col++) += val;
            }
        }
        if (jump_stream >= 0) {
            const auto& stream = m.streams[jump_stream];
            const Eigen::VectorXd x_pre = z.head(m.dx);
            const double u = stream.marks.sample(rng);
            const Eigen::VectorXd dx = stream.loading_at(x_pre) * u;
            z.head(m.dx) += dx;
            if (stream.ydim() > 0) z.tail(m.dz - m.dx) += stream.size_y * u;
            ++jumps;
            if (fn) {
                int col = static_cast<int>(fn->P.size());
                for (const auto& qrow : fn->Q) {
                    double val = 0.0;
                    for (int k = 0; k < m.dx; ++k) val += qrow[k].eval(x_pre) * dx(k);
                    acc(col++) += val;
                }
            }
            next_jump[jump_stream] += -std::log(rng.uniform()) / stream.lambda;
        }
        t = t_next;
        if (!exited && !m.domain.contains(z.head(m.dx))) {
            exited = true;
            ++exits;
        }
    }
    terminal_out = z;
    if (fn) functional_out = acc;
}

} // namespace

PathModel path_model(const GeneratorSpec& spec, const Eigen::VectorXd& x0) {
    validate_spec(spec);
    if (!spec.kernel && !spec.jump_moments.empty())
        throw KernelRequired("moment-only jump specs cannot be simulated");
    PathModel m;
    m.dz = m.dx = spec.dim;
    m.drift = spec.drift;
    m.diffusion = spec.mod_diffusion;
    if (spec.kernel) {
        const auto second = kernel_second_moments(*spec.kernel, spec.dim);
        for (int i = 0; i < spec.dim; ++i)
            for (int k = 0; k < spec.dim; ++k) m.diffusion[i][k] -= second[i][k];
        m.streams = spec.kernel->streams;
    }
    m.domain = spec.domain;
    m.z0 = x0;
    return m;
}

PathModel path_model(const AugmentedSpec& aug, const Eigen::VectorXd& z0) {
    validate_augmented(aug);
    const int d = aug.base.dim, e = aug.e;
    const bool base_jumps = aug.base.kernel.has_value() || !aug.base.jump_moments.empty();
    if (base_jumps && !aug.base.kernel)
        throw KernelRequired("moment-only jump specs cannot be simulated");
    if (!aug.joint_kernel && !aug.mixed_moments.empty())
        throw KernelRequired("Y jumps without a joint kernel cannot be simulated");
    PathModel m;
    m.dz = d + e;
    m.dx = d;
    m.drift = aug.base.drift;
    for (const auto& b : aug.bY) m.drift.push_back(b);
    m.diffusion.assign(m.dz, std::vector<Poly>(m.dz, Poly(d)));
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) m.diffusion[i][k] = aug.base.mod_diffusion[i][k];
    for (int i = 0; i < d; ++i)
        for (int l = 0; l < e; ++l) m.diffusion[i][d + l] = m.diffusion[d + l][i] = aug.modAXY[i][l];
    for (int l = 0; l < e; ++l)
        for (int r = 0; r < e; ++r) m.diffusion[d + l][d + r] = aug.modAY[l][r];
    if (aug.base.kernel) {
        m.streams = aug.base.kernel->streams;
        for (auto& stream : m.streams)
            if (!aug.joint_kernel || stream.ydim() == 0) stream.size_y = Eigen::VectorXd::Zero(e);
        for (const auto& stream : m.streams) {
            const double m2 = stream.lambda * stream.marks.raw_moment(2);
            for (int i = 0; i < d; ++i) {
                for (int k = 0; k < d; ++k)
                    m.diffusion[i][k] -= stream.size_poly(i) * stream.size_poly(k) * m2;
                for (int l = 0; l < e; ++l) {
                    const Poly cross = stream.size_poly(i) * (stream.size_y(l) * m2);
                    m.diffusion[i][d + l] -= cross;
                    m.diffusion[d + l][i] -= cross;
                }
            }
            for (int l = 0; l < e; ++l)
                for (int r = 0; r < e; ++r)
                    m.diffusion[d + l][d + r] -=
                        Poly::constant(d, stream.size_y(l) * stream.size_y(r) * m2);
        }
    }
    m.domain = aug.base.domain;
    m.z0 = z0;
    return m;
}

SimResult simulate(const PathModel& model, double T, const SimConfig& cfg,
                   const PathFunctionals* functionals) {
    if (cfg.paths < 1) throw Error("SimConfig: need at least one path");
    if (cfg.steps_per_unit < 1) throw Error("SimConfig: need at least one step per unit time");
    if (cfg.scheme == SimConfig::Scheme::exact_ou) {
        const bool ou_like = model.dz == 1 && model.streams.empty() &&
                             model.diffusion[0][0].degree() == 0 && model.drift[0].degree() <= 1;
        if (!ou_like) throw Error("exact_ou scheme requires a one-dimensional constant-volatility model");
    }
    const CompiledModel cm(model);
    FunctionalState fstate;
    if (functionals) {
        for (const auto& p : functionals->P) fstate.P.push_back(CompiledPoly::from(p));
        for (const auto& row : functionals->Q) {
            std::vector<CompiledPoly> qrow;
            for (const auto& q : row) qrow.push_back(CompiledPoly::from(q));
            fstate.Q.push_back(std::move(qrow));
        }
    }

    SimResult result;
    result.terminal.resize(cfg.paths, model.dz);
    result.functionals.resize(cfg.paths, functionals ? functionals->size() : 0);

    const int threads = std::max(1, cfg.threads);
    std::vector<long long> exits(threads, 0), jumps(threads, 0);
    auto worker = [&](int tid, long long begin, long long end) {
        Eigen::VectorXd zout(model.dz), fout;
        for (long long p = begin; p < end; ++p) {
            run_one_path(cm, T, cfg, static_cast<std::uint64_t>(p), functionals ? &fstate : nullptr,
                         zout, fout, exits[tid], jumps[tid]);
            result.terminal.row(p) = zout.transpose();
            if (functionals) result.functionals.row(p) = fout.transpose();
        }
    };
    if (threads == 1) {
        worker(0, 0, cfg.paths);
    } else {
        std::vector<std::thread> pool;
        const long long chunk = (cfg.paths + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const long long begin = t * chunk;
            const long long end = std::min<long long>(cfg.paths, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, t, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    for (int t = 0; t < threads; ++t) {
        result.exits += exits[t];
        result.jumps += jumps[t];
    }
    return result;
}

SimResult simulate_subordinated(const PathModel& model, const SubordinatorSpec& sub, double T,
                                const SimConfig& cfg) {
    validate_subordinator(sub);
    if (sub.continuous)
        throw Error("simulate_subordinated supports drift plus atoms only");
    const CompiledModel cm(model);

    SimResult result;
    result.terminal.resize(cfg.paths, model.dz);
    result.functionals.resize(cfg.paths, 0);

    const int threads = std::max(1, cfg.threads);
    std::vector<long long> exits(threads, 0), jumps(threads, 0);
    auto worker = [&](int tid, long long begin, long long end) {
        Eigen::VectorXd zout(model.dz), fout;
        for (long long p = begin; p < end; ++p) {
            // Stage one: Z_T from an offset stream so stage two is untouched.
            CounterRng clock_rng(cfg.seed ^ 0x50b0cULL, static_cast<std::uint64_t>(p));
            double zt = sub.drift * T;
            for (const auto& atom : sub.atoms) {
                // Poisson(lambda T) by exponential gaps
                double t = -std::log(clock_rng.uniform()) / atom.lambda;
                while (t < T) {
                    zt += atom.zeta;
                    t += -std::log(clock_rng.uniform()) / atom.lambda;
                }
            }
            run_one_path(cm, zt, cfg, static_cast<std::uint64_t>(p), nullptr, zout, fout, exits[tid],
                         jumps[tid]);
            result.terminal.row(p) = zout.transpose();
        }
    };
    if (threads == 1) {
        worker(0, 0, cfg.paths);
    } else {
        std::vector<std::thread> pool;
        const long long chunk = (cfg.paths + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const long long begin = t * chunk;
            const long long end = std::min<long long>(cfg.paths, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, t, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    for (int t = 0; t < threads; ++t) {
        result.exits += exits[t];
        result.jumps += jumps[t];
    }
    return result;
}

EstimateWithSE estimate(const std::function<double(const Eigen::VectorXd&)>& payoff,
                        const Eigen::MatrixXd& samples) {
    const long long n = samples.rows();
    if (n < 1) throw Error("estimate: empty sample");
    double sum = 0.0, sumsq = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double v = payoff(samples.row(i).transpose());
        sum += v;
        sumsq += v * v;
    }
    EstimateWithSE out;
    out.paths = n;
    out.mean = sum / n;
    if (n > 1) {
        const double var = std::max(0.0, (sumsq - n * out.mean * out.mean) / (n - 1));
        out.se = std::sqrt(var / n);
    }
    return out;
}

EstimateWithSE estimate(const Poly& p, const Eigen::MatrixXd& samples) {
    return estimate(
        [&p](const Eigen::VectorXd& z) {
            return p.eval(std::span<const double>(z.data(), z.size()));
        },
        samples);
}

} // namespace pjd
