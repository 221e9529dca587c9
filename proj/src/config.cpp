#include "pjd/config.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace pjd::config {

namespace {

void expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    expect_object(j, path);
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw ConfigError(path + ": unknown key '" + key + "'");
}

double get_number(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path + ": missing key '" + key + "'");
    if (!j[key].is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

double get_number_or(const json& j, const std::string& key, double fallback) {
    return j.contains(key) ? j[key].get<double>() : fallback;
}

int get_int(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path + ": missing key '" + key + "'");
    if (!j[key].is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
    return j[key].get<int>();
}

Eigen::VectorXd get_vector(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]: expected a number");
        v(i) = j[i].get<double>();
    }
    return v;
}

Eigen::MatrixXd get_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw ConfigError(path + ": expected an array of rows");
    const size_t cols = j[0].size();
    Eigen::MatrixXd m(j.size(), cols);
    for (size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ConfigError(path + ": ragged matrix rows");
        for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

} // namespace

json poly_to_json(const Poly& p) {
    json terms = json::array();
    for (const auto& [alpha, c] : p.terms()) {
        json term;
        term["exponents"] = alpha.exps();
        term["coeff"] = c;
        terms.push_back(term);
    }
    return terms;
}

Poly poly_from_json(const json& j, int dim, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected a list of {exponents, coeff} terms");
    Poly p(dim);
    for (size_t i = 0; i < j.size(); ++i) {
        const std::string tp = path + "[" + std::to_string(i) + "]";
        check_keys(j[i], {"exponents", "coeff"}, tp);
        const auto exps = j[i].at("exponents").get<std::vector<int>>();
        if (static_cast<int>(exps.size()) != dim)
            throw ConfigError(tp + ": exponent vector has length " + std::to_string(exps.size()) +
                              ", expected " + std::to_string(dim));
        p.add_term(MultiIndex(exps), get_number(j[i], "coeff", tp));
    }
    return p;
}

json marks_to_json(const MarkDist& m) {
    json out;
    out["family"] = to_string(m.family());
    const auto& p = m.params();
    switch (m.family()) {
        case MarkFamily::point_masses: {
            const size_t n = p.size() / 2;
            out["params"]["values"] = std::vector<double>(p.begin(), p.begin() + n);
            out["params"]["probs"] = std::vector<double>(p.begin() + n, p.end());
            break;
        }
        case MarkFamily::gaussian:
            out["params"]["mean"] = p[0];
            out["params"]["sd"] = p[1];
            break;
        case MarkFamily::exponential:
            out["params"]["rate"] = p[0];
            break;
        case MarkFamily::uniform:
            out["params"]["lo"] = p[0];
            out["params"]["hi"] = p[1];
            break;
    }
    return out;
}

MarkDist marks_from_json(const json& j, const std::string& path) {
    check_keys(j, {"family", "params"}, path);
    const std::string family = j.at("family").get<std::string>();
    const json& p = j.at("params");
    if (family == "point_masses") {
        check_keys(p, {"values", "probs"}, path + ".params");
        return MarkDist::point_masses(p.at("values").get<std::vector<double>>(),
                                      p.at("probs").get<std::vector<double>>());
    }
    if (family == "gaussian") {
        check_keys(p, {"mean", "sd"}, path + ".params");
        return MarkDist::gaussian(get_number(p, "mean", path), get_number(p, "sd", path));
    }
    if (family == "exponential") {
        check_keys(p, {"rate"}, path + ".params");
        return MarkDist::exponential(get_number(p, "rate", path));
    }
    if (family == "uniform") {
        check_keys(p, {"lo", "hi"}, path + ".params");
        return MarkDist::uniform(get_number(p, "lo", path), get_number(p, "hi", path));
    }
    throw ConfigError(path + ": unknown mark family '" + family + "'");
}

json stream_to_json(const JumpStream& s) {
    json out;
    out["lambda"] = s.lambda;
    out["marks"] = marks_to_json(s.marks);
    out["delta0"] = vector_to_json(s.size0);
    if (!s.size.empty()) {
        json loadings = json::array();
        for (const auto& v : s.size) loadings.push_back(vector_to_json(v));
        out["delta"] = loadings;
    }
    if (s.ydim() > 0) out["deltaY"] = vector_to_json(s.size_y);
    return out;
}

JumpStream stream_from_json(const json& j, int dim, const std::string& path) {
    check_keys(j, {"lambda", "marks", "delta0", "delta", "deltaY"}, path);
    JumpStream s;
    s.lambda = get_number(j, "lambda", path);
    s.marks = marks_from_json(j.at("marks"), path + ".marks");
    s.size0 = get_vector(j.at("delta0"), path + ".delta0");
    if (s.size0.size() != dim) throw ConfigError(path + ".delta0: wrong length");
    if (j.contains("delta")) {
        for (size_t i = 0; i < j["delta"].size(); ++i)
            s.size.push_back(get_vector(j["delta"][i], path + ".delta[" + std::to_string(i) + "]"));
        if (static_cast<int>(s.size.size()) != dim)
            throw ConfigError(path + ".delta: need one loading per state variable");
    }
    if (j.contains("deltaY")) s.size_y = get_vector(j["deltaY"], path + ".deltaY");
    return s;
}

json domain_to_json(const StateDomain& d) {
    json out;
    json lo = json::array(), hi = json::array();
    for (int i = 0; i < d.dim(); ++i) {
        lo.push_back(std::isfinite(d.lo(i)) ? json(d.lo(i)) : json());
        hi.push_back(std::isfinite(d.hi(i)) ? json(d.hi(i)) : json());
    }
    out["lo"] = lo;
    out["hi"] = hi;
    return out;
}

StateDomain domain_from_json(const json& j, const std::string& path) {
    check_keys(j, {"lo", "hi"}, path);
    const json& lo = j.at("lo");
    const json& hi = j.at("hi");
    if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size())
        throw ConfigError(path + ": lo/hi must be arrays of equal length");
    const double inf = std::numeric_limits<double>::infinity();
    StateDomain d;
    d.lo.resize(lo.size());
    d.hi.resize(hi.size());
    for (size_t i = 0; i < lo.size(); ++i) {
        d.lo(i) = lo[i].is_null() ? -inf : lo[i].get<double>();
        d.hi(i) = hi[i].is_null() ? inf : hi[i].get<double>();
    }
    return d;
}

json generator_to_json(const GeneratorSpec& s) {
    json out;
    out["dim"] = s.dim;
    json drift = json::array();
    for (const auto& b : s.drift) drift.push_back(poly_to_json(b));
    out["drift"] = drift;
    json diff = json::array();
    for (const auto& row : s.mod_diffusion) {
        json r = json::array();
        for (const auto& a : row) r.push_back(poly_to_json(a));
        diff.push_back(r);
    }
    out["mod_diffusion"] = diff;
    if (!s.jump_moments.empty()) {
        json moments = json::array();
        for (const auto& [alpha, p] : s.jump_moments) {
            json m;
            m["alpha"] = alpha.exps();
            m["poly"] = poly_to_json(p);
            moments.push_back(m);
        }
        out["jump_moments"] = moments;
    }
    if (s.max_jump_order > 0) out["max_jump_order"] = s.max_jump_order;
    if (s.kernel) {
        json streams = json::array();
        for (const auto& st : s.kernel->streams) streams.push_back(stream_to_json(st));
        out["kernel"]["streams"] = streams;
    }
    out["domain"] = domain_to_json(s.domain);
    return out;
}

GeneratorSpec generator_from_json(const json& j, const std::string& path) {
    check_keys(j, {"dim", "drift", "mod_diffusion", "jump_moments", "max_jump_order", "kernel", "domain"},
               path);
    GeneratorSpec s;
    s.dim = get_int(j, "dim", path);
    if (!j.contains("drift") || !j["drift"].is_array())
        throw ConfigError(path + ": missing drift polynomials");
    for (size_t i = 0; i < j["drift"].size(); ++i)
        s.drift.push_back(poly_from_json(j["drift"][i], s.dim, path + ".drift[" + std::to_string(i) + "]"));
    for (size_t r = 0; r < j.at("mod_diffusion").size(); ++r) {
        std::vector<Poly> row;
        for (size_t c = 0; c < j["mod_diffusion"][r].size(); ++c)
            row.push_back(poly_from_json(j["mod_diffusion"][r][c], s.dim,
                                         path + ".mod_diffusion[" + std::to_string(r) + "][" +
                                             std::to_string(c) + "]"));
        s.mod_diffusion.push_back(std::move(row));
    }
    if (j.contains("jump_moments"))
        for (size_t i = 0; i < j["jump_moments"].size(); ++i) {
            const std::string mp = path + ".jump_moments[" + std::to_string(i) + "]";
            check_keys(j["jump_moments"][i], {"alpha", "poly"}, mp);
            const auto alpha = j["jump_moments"][i].at("alpha").get<std::vector<int>>();
            s.jump_moments.emplace(MultiIndex(alpha),
                                   poly_from_json(j["jump_moments"][i].at("poly"), s.dim, mp + ".poly"));
        }
    if (j.contains("max_jump_order")) s.max_jump_order = get_int(j, "max_jump_order", path);
    if (j.contains("kernel")) {
        check_keys(j["kernel"], {"streams"}, path + ".kernel");
        MarkJumpSpec kernel;
        for (size_t i = 0; i < j["kernel"]["streams"].size(); ++i)
            kernel.streams.push_back(stream_from_json(
                j["kernel"]["streams"][i], s.dim, path + ".kernel.streams[" + std::to_string(i) + "]"));
        s.kernel = std::move(kernel);
    }
    if (j.contains("domain"))
        s.domain = domain_from_json(j["domain"], path + ".domain");
    else
        s.domain = StateDomain::all(s.dim);
    return s;
}

json augmented_to_json(const AugmentedSpec& s) {
    json out;
    out["base"] = generator_to_json(s.base);
    out["n"] = s.n;
    out["e"] = s.e;
    json by = json::array();
    for (const auto& b : s.bY) by.push_back(poly_to_json(b));
    out["bY"] = by;
    json ay = json::array();
    for (const auto& row : s.modAY) {
        json r = json::array();
        for (const auto& a : row) r.push_back(poly_to_json(a));
        ay.push_back(r);
    }
    out["modAY"] = ay;
    json axy = json::array();
    for (const auto& row : s.modAXY) {
        json r = json::array();
        for (const auto& a : row) r.push_back(poly_to_json(a));
        axy.push_back(r);
    }
    out["modAXY"] = axy;
    if (!s.mixed_moments.empty()) {
        json mixed = json::array();
        for (const auto& [key, p] : s.mixed_moments) {
            json m;
            m["alpha"] = key.first.exps();
            m["beta"] = key.second.exps();
            m["poly"] = poly_to_json(p);
            mixed.push_back(m);
        }
        out["mixed_moments"] = mixed;
    }
    if (s.max_mixed_order > 0) out["max_mixed_order"] = s.max_mixed_order;
    if (s.joint_kernel) out["joint_kernel"] = true;
    return out;
}

AugmentedSpec augmented_from_json(const json& j, const std::string& path) {
    check_keys(j, {"base", "n", "e", "bY", "modAY", "modAXY", "mixed_moments", "max_mixed_order",
                   "joint_kernel"},
               path);
    AugmentedSpec s;
    s.base = generator_from_json(j.at("base"), path + ".base");
    s.n = get_int(j, "n", path);
    s.e = get_int(j, "e", path);
    for (size_t i = 0; i < j.at("bY").size(); ++i)
        s.bY.push_back(poly_from_json(j["bY"][i], s.base.dim, path + ".bY[" + std::to_string(i) + "]"));
    for (size_t r = 0; r < j.at("modAY").size(); ++r) {
        std::vector<Poly> row;
        for (size_t c = 0; c < j["modAY"][r].size(); ++c)
            row.push_back(poly_from_json(j["modAY"][r][c], s.base.dim, path + ".modAY"));
        s.modAY.push_back(std::move(row));
    }
    for (size_t r = 0; r < j.at("modAXY").size(); ++r) {
        std::vector<Poly> row;
        for (size_t c = 0; c < j["modAXY"][r].size(); ++c)
            row.push_back(poly_from_json(j["modAXY"][r][c], s.base.dim, path + ".modAXY"));
        s.modAXY.push_back(std::move(row));
    }
    if (j.contains("mixed_moments"))
        for (size_t i = 0; i < j["mixed_moments"].size(); ++i) {
            const std::string mp = path + ".mixed_moments[" + std::to_string(i) + "]";
            check_keys(j["mixed_moments"][i], {"alpha", "beta", "poly"}, mp);
            s.mixed_moments.emplace(
                std::make_pair(MultiIndex(j["mixed_moments"][i].at("alpha").get<std::vector<int>>()),
                               MultiIndex(j["mixed_moments"][i].at("beta").get<std::vector<int>>())),
                poly_from_json(j["mixed_moments"][i].at("poly"), s.base.dim, mp + ".poly"));
        }
    if (j.contains("max_mixed_order")) s.max_mixed_order = get_int(j, "max_mixed_order", path);
    if (j.contains("joint_kernel")) s.joint_kernel = j["joint_kernel"].get<bool>();
    return s;
}

json subordinator_to_json(const SubordinatorSpec& s) {
    json out;
    out["drift"] = s.drift;
    json atoms = json::array();
    for (const auto& a : s.atoms) {
        json atom;
        atom["lambda"] = a.lambda;
        atom["zeta"] = a.zeta;
        atoms.push_back(atom);
    }
    out["atoms"] = atoms;
    if (s.continuous) {
        out["gamma"]["weight"] = s.continuous->weight;
        out["gamma"]["shape"] = s.continuous->shape;
        out["gamma"]["rate"] = s.continuous->rate;
        out["gamma"]["nodes"] = s.continuous->nodes;
    }
    return out;
}

SubordinatorSpec subordinator_from_json(const json& j, const std::string& path) {
    check_keys(j, {"drift", "atoms", "gamma"}, path);
    SubordinatorSpec s;
    s.drift = get_number_or(j, "drift", 0.0);
    if (j.contains("atoms"))
        for (size_t i = 0; i < j["atoms"].size(); ++i) {
            const std::string ap = path + ".atoms[" + std::to_string(i) + "]";
            check_keys(j["atoms"][i], {"lambda", "zeta"}, ap);
            s.atoms.push_back({get_number(j["atoms"][i], "lambda", ap),
                               get_number(j["atoms"][i], "zeta", ap)});
        }
    if (j.contains("gamma")) {
        check_keys(j["gamma"], {"weight", "shape", "rate", "nodes"}, path + ".gamma");
        SubordinatorSpec::GammaPart g;
        g.weight = get_number_or(j["gamma"], "weight", 1.0);
        g.shape = get_number(j["gamma"], "shape", path + ".gamma");
        g.rate = get_number(j["gamma"], "rate", path + ".gamma");
        if (j["gamma"].contains("nodes")) g.nodes = get_int(j["gamma"], "nodes", path + ".gamma");
        s.continuous = g;
    }
    return s;
}

json affine_to_json(const AffineSpec& s) {
    json out;
    out["dim"] = s.dim;
    json a = json::array(), b = json::array(), nu = json::array();
    for (const auto& ai : s.a) a.push_back(matrix_to_json(ai));
    for (const auto& bi : s.b) b.push_back(vector_to_json(bi));
    for (const auto& ni : s.nu) {
        json comp;
        json points = json::array();
        for (const auto& p : ni.points) {
            json pm;
            pm["weight"] = p.weight;
            pm["location"] = vector_to_json(p.location);
            points.push_back(pm);
        }
        comp["points"] = points;
        json gaussians = json::array();
        for (const auto& g : ni.gaussians) {
            json gp;
            gp["weight"] = g.weight;
            gp["mean"] = vector_to_json(g.mean);
            gp["cov"] = matrix_to_json(g.cov);
            gaussians.push_back(gp);
        }
        comp["gaussians"] = gaussians;
        nu.push_back(comp);
    }
    out["a"] = a;
    out["b"] = b;
    out["nu"] = nu;
    out["domain"] = domain_to_json(s.domain);
    return out;
}

AffineSpec affine_from_json(const json& j, const std::string& path) {
    check_keys(j, {"dim", "a", "b", "nu", "domain"}, path);
    AffineSpec s;
    s.dim = get_int(j, "dim", path);
    for (size_t i = 0; i < j.at("a").size(); ++i)
        s.a.push_back(get_matrix(j["a"][i], path + ".a[" + std::to_string(i) + "]"));
    for (size_t i = 0; i < j.at("b").size(); ++i)
        s.b.push_back(get_vector(j["b"][i], path + ".b[" + std::to_string(i) + "]"));
    for (size_t i = 0; i < j.at("nu").size(); ++i) {
        const std::string np = path + ".nu[" + std::to_string(i) + "]";
        check_keys(j["nu"][i], {"points", "gaussians"}, np);
        AffineJumpComponent comp;
        if (j["nu"][i].contains("points"))
            for (size_t k = 0; k < j["nu"][i]["points"].size(); ++k) {
                const json& pm = j["nu"][i]["points"][k];
                check_keys(pm, {"weight", "location"}, np + ".points");
                comp.points.push_back(
                    {get_number(pm, "weight", np), get_vector(pm.at("location"), np + ".location")});
            }
        if (j["nu"][i].contains("gaussians"))
            for (size_t k = 0; k < j["nu"][i]["gaussians"].size(); ++k) {
                const json& g = j["nu"][i]["gaussians"][k];
                check_keys(g, {"weight", "mean", "cov"}, np + ".gaussians");
                comp.gaussians.push_back({get_number(g, "weight", np),
                                          get_vector(g.at("mean"), np + ".mean"),
                                          get_matrix(g.at("cov"), np + ".cov")});
            }
        s.nu.push_back(std::move(comp));
    }
    s.domain = domain_from_json(j.at("domain"), path + ".domain");
    return s;
}

json model_to_json(const ModelSpec& m) {
    json out;
    out["type"] = "model";
    out["name"] = m.name;
    if (!m.note.empty()) out["note"] = m.note;
    json factor;
    factor["d"] = m.factor.d;
    factor["m"] = m.factor.m;
    factor["beta0"] = vector_to_json(m.factor.beta0);
    json betas = json::array();
    for (const auto& b : m.factor.beta) betas.push_back(vector_to_json(b));
    factor["beta"] = betas;
    switch (m.factor.vol) {
        case FactorSde::VolKind::linear: {
            factor["vol"]["kind"] = "linear";
            factor["vol"]["Gamma0"] = matrix_to_json(m.factor.Gamma0);
            json gammas = json::array();
            for (const auto& g : m.factor.Gamma) gammas.push_back(matrix_to_json(g));
            factor["vol"]["Gamma"] = gammas;
            break;
        }
        case FactorSde::VolKind::sqrt1d:
            factor["vol"]["kind"] = "sqrt";
            factor["vol"]["sigma"] = m.factor.sigma;
            break;
        case FactorSde::VolKind::jacobi1d:
            factor["vol"]["kind"] = "jacobi";
            factor["vol"]["sigma"] = m.factor.sigma;
            break;
    }
    factor["domain"] = domain_to_json(m.factor.domain);
    factor["x0"] = vector_to_json(m.factor.x0);
    out["factor"] = factor;
    if (m.e > 0) {
        json assets;
        assets["e"] = m.e;
        assets["GammaY0"] = matrix_to_json(m.GammaY0);
        json gy = json::array();
        for (const auto& g : m.GammaY) gy.push_back(matrix_to_json(g));
        assets["GammaY"] = gy;
        if (m.s0.size() > 0) assets["s0"] = vector_to_json(m.s0);
        out["assets"] = assets;
        json by = json::array();
        for (const auto& b : m.bY) by.push_back(poly_to_json(b));
        if (!m.bY.empty()) out["bY"] = by;
    }
    if (!m.jumps.empty()) {
        json jumps = json::array();
        for (const auto& s : m.jumps) jumps.push_back(stream_to_json(s));
        out["jumps"] = jumps;
    }
    out["rate"] = m.rate;
    out["risk_neutral"] = m.risk_neutral;
    if (m.subordinator) out["subordinator"] = subordinator_to_json(*m.subordinator);
    if (m.affine_form) out["affine"] = affine_to_json(*m.affine_form);
    return out;
}

ModelSpec model_from_json(const json& j, const std::string& path) {
    check_keys(j, {"type", "name", "note", "factor", "assets", "bY", "jumps", "rate", "risk_neutral",
                   "subordinator", "affine"},
               path);
    ModelSpec m;
    if (j.contains("name")) m.name = j["name"].get<std::string>();
    if (j.contains("note")) m.note = j["note"].get<std::string>();
    const json& f = j.at("factor");
    check_keys(f, {"d", "m", "beta0", "beta", "vol", "domain", "x0"}, path + ".factor");
    m.factor.d = get_int(f, "d", path + ".factor");
    m.factor.m = get_int(f, "m", path + ".factor");
    m.factor.beta0 = get_vector(f.at("beta0"), path + ".factor.beta0");
    for (size_t i = 0; i < f.at("beta").size(); ++i)
        m.factor.beta.push_back(get_vector(f["beta"][i], path + ".factor.beta"));
    const json& vol = f.at("vol");
    check_keys(vol, {"kind", "Gamma0", "Gamma", "sigma"}, path + ".factor.vol");
    const std::string kind = vol.at("kind").get<std::string>();
    if (kind == "linear") {
        m.factor.vol = FactorSde::VolKind::linear;
        m.factor.Gamma0 = get_matrix(vol.at("Gamma0"), path + ".factor.vol.Gamma0");
        for (size_t i = 0; i < vol.at("Gamma").size(); ++i)
            m.factor.Gamma.push_back(get_matrix(vol["Gamma"][i], path + ".factor.vol.Gamma"));
    } else if (kind == "sqrt" || kind == "jacobi") {
        m.factor.vol = kind == "sqrt" ? FactorSde::VolKind::sqrt1d : FactorSde::VolKind::jacobi1d;
        m.factor.sigma = get_number(vol, "sigma", path + ".factor.vol");
    } else {
        throw ConfigError(path + ".factor.vol.kind: unknown kind '" + kind + "'");
    }
    m.factor.domain = domain_from_json(f.at("domain"), path + ".factor.domain");
    m.factor.x0 = get_vector(f.at("x0"), path + ".factor.x0");
    if (j.contains("assets")) {
        const json& a = j["assets"];
        check_keys(a, {"e", "GammaY0", "GammaY", "s0"}, path + ".assets");
        m.e = get_int(a, "e", path + ".assets");
        m.GammaY0 = get_matrix(a.at("GammaY0"), path + ".assets.GammaY0");
        for (size_t i = 0; i < a.at("GammaY").size(); ++i)
            m.GammaY.push_back(get_matrix(a["GammaY"][i], path + ".assets.GammaY"));
        if (a.contains("s0")) m.s0 = get_vector(a["s0"], path + ".assets.s0");
    }
    if (j.contains("bY"))
        for (size_t i = 0; i < j["bY"].size(); ++i)
            m.bY.push_back(poly_from_json(j["bY"][i], m.factor.d, path + ".bY"));
    if (j.contains("jumps"))
        for (size_t i = 0; i < j["jumps"].size(); ++i)
            m.jumps.push_back(
                stream_from_json(j["jumps"][i], m.factor.d, path + ".jumps[" + std::to_string(i) + "]"));
    m.rate = get_number_or(j, "rate", 0.0);
    if (j.contains("risk_neutral")) m.risk_neutral = j["risk_neutral"].get<bool>();
    if (j.contains("subordinator"))
        m.subordinator = subordinator_from_json(j["subordinator"], path + ".subordinator");
    if (j.contains("affine")) m.affine_form = affine_from_json(j["affine"], path + ".affine");
    return m;
}

Document document_from_json(const json& j) {
    expect_object(j, "$");
    const std::string type = j.contains("type") ? j["type"].get<std::string>() : "model";
    Document d;
    if (type == "model") {
        d.type = Document::Type::model;
        d.model = model_from_json(j);
    } else if (type == "generator") {
        json body = j;
        body.erase("type");
        d.type = Document::Type::generator;
        d.generator = generator_from_json(body);
    } else if (type == "augmented") {
        json body = j;
        body.erase("type");
        d.type = Document::Type::augmented;
        d.augmented = augmented_from_json(body);
    } else {
        throw ConfigError("$.type: unknown document type '" + type + "'");
    }
    return d;
}

json document_to_json(const Document& d) {
    switch (d.type) {
        case Document::Type::model: return model_to_json(d.model);
        case Document::Type::generator: {
            json j = generator_to_json(d.generator);
            j["type"] = "generator";
            return j;
        }
        case Document::Type::augmented: {
            json j = augmented_to_json(d.augmented);
            j["type"] = "augmented";
            return j;
        }
    }
    throw ConfigError("unreachable document type");
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

json load_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file: " + file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string value_text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(value_text);
    } catch (const json::parse_error&) {
        value = value_text;  // bare strings are allowed
    }

    json* node = &doc;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (size_t i = 0; i < parts.size(); ++i) {
        const bool last = i + 1 == parts.size();
        json* next = nullptr;
        if (node->is_array()) {
            char* end = nullptr;
            const long idx = std::strtol(parts[i].c_str(), &end, 10);
            if (end == parts[i].c_str() || *end != '\0')
                throw ConfigError("override path '" + path + "': '" + parts[i] + "' is not an index");
            if (idx < 0 || idx >= static_cast<long>(node->size()))
                throw ConfigError("override path '" + path + "': index out of range");
            next = &(*node)[idx];
        } else if (node->is_object()) {
            if (!node->contains(parts[i]))
                throw ConfigError("override path '" + path + "': unknown key '" + parts[i] + "'");
            next = &(*node)[parts[i]];
        } else {
            throw ConfigError("override path '" + path + "' descends into a scalar");
        }
        if (last) {
            if (next->type() != value.type() &&
                !(next->is_number() && value.is_number()))
                throw ConfigError("override '" + assignment + "' changes the value type");
            *next = value;
            return;
        }
        node = next;
    }
    throw ConfigError("empty override path");
}

namespace {

void dump_rec(const json& j, std::string& out, int indent, int depth) {
    const std::string pad = indent >= 0 ? "\n" + std::string(indent * (depth + 1), ' ') : "";
    const std::string pad_close = indent >= 0 ? "\n" + std::string(indent * depth, ' ') : "";
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ',';
                out += pad;
                out += json(key).dump();
                out += indent >= 0 ? ": " : ":";
                dump_rec(value, out, indent, depth + 1);
                first = false;
            }
            if (!first) out += pad_close;
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& value : j) {
                if (!first) out += ',';
                out += pad;
                dump_rec(value, out, indent, depth + 1);
                first = false;
            }
            if (!first) out += pad_close;
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", j.get<double>());
            out += buf;
            break;
        }
        default:
            out += j.dump();
    }
}

} // namespace

std::string canonical_dump(const json& j, int indent) {
    std::string out;
    dump_rec(j, out, indent, 0);
    return out;
}

std::string config_hash(const json& j) {
    const std::string text = canonical_dump(j);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, hash);
    return buf;
}

} // namespace pjd::config
