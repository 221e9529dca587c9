#include "pjd/cli.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pjd/config.hpp"
#include "pjd/mc.hpp"
#include "pjd/moments.hpp"
#include "pjd/pricer.hpp"
#include "pjd/timechange.hpp"

namespace pjd::cli {

namespace {

using config::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CommonOpts {
    std::string model_file;
    std::string zoo_name;
    std::vector<std::string> overrides;
    std::string out;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = env default, else 1
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_model = true) {
    if (needs_model) {
        cmd->add_option("--model", opts.model_file, "model config document (JSON)");
        cmd->add_option("--zoo", opts.zoo_name, "preconfigured model name");
    }
    cmd->add_option("--set", opts.overrides, "dotted-path override, e.g. factor.x0.0=0.3");
    cmd->add_option("--out", opts.out, "output file (default: stdout)");
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--threads", opts.threads, "worker threads (default: PJD_THREADS or 1)");
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("PJD_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

json load_document_json(const CommonOpts& opts) {
    json doc;
    if (!opts.zoo_name.empty())
        doc = config::model_to_json(model_zoo(opts.zoo_name));
    else if (!opts.model_file.empty())
        doc = config::load_file(opts.model_file);
    else
        throw ConfigError("pass --model FILE or --zoo NAME");
    for (const auto& assignment : opts.overrides) config::apply_override(doc, assignment);
    return doc;
}

void write_output(const CommonOpts& opts, const std::string& text) {
    if (opts.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(opts.out, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + opts.out);
    out << text;
}

json provenance(const json& doc, const CommonOpts& opts, const std::string& command) {
    json p;
    p["command"] = command;
    p["config_hash"] = config::config_hash(doc);
    p["seed"] = opts.seed;
    p["version"] = kVersion;
    return p;
}

std::string csv_provenance(const json& doc, const CommonOpts& opts, const std::string& command) {
    std::ostringstream os;
    os << "# command=" << command << "\n";
    os << "# config_hash=" << config::config_hash(doc) << "\n";
    os << "# seed=" << opts.seed << "\n";
    os << "# version=" << kVersion << "\n";
    return os.str();
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> grid;
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const auto second = spec.find(':', colon + 1);
        if (second == std::string::npos) throw ConfigError("grid spec must be a:b:step or a comma list");
        const double a = std::stod(spec.substr(0, colon));
        const double b = std::stod(spec.substr(colon + 1, second - colon - 1));
        const double step = std::stod(spec.substr(second + 1));
        if (step <= 0.0) throw ConfigError("grid step must be positive");
        for (double v = a; v <= b + 1e-12; v += step) grid.push_back(v);
        return grid;
    }
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) grid.push_back(std::stod(part));
    return grid;
}

Eigen::VectorXd parse_point(const std::string& spec) {
    std::vector<double> values;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) values.push_back(std::stod(part));
    return Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
}

GeneratorSpec factor_of(const config::Document& doc) {
    switch (doc.type) {
        case config::Document::Type::model: return factor_spec(doc.model);
        case config::Document::Type::generator: return doc.generator;
        case config::Document::Type::augmented: return doc.augmented.base;
    }
    throw ConfigError("unreachable document type");
}

Eigen::VectorXd initial_state(const config::Document& doc, const std::string& x_flag) {
    if (!x_flag.empty()) return parse_point(x_flag);
    if (doc.type == config::Document::Type::model) return doc.model.factor.x0;
    throw ConfigError("generator documents need an explicit --x state");
}

// ---------------------------------------------------------------- commands

int cmd_zoo(const CommonOpts& opts, const std::string& name) {
    if (name.empty()) {
        std::ostringstream os;
        for (const auto& n : zoo_names()) os << n << "\n";
        write_output(opts, os.str());
        return 0;
    }
    json doc = config::model_to_json(model_zoo(name));
    for (const auto& assignment : opts.overrides) config::apply_override(doc, assignment);
    write_output(opts, config::canonical_dump(doc, 2) + "\n");
    return 0;
}

int cmd_validate(const CommonOpts& opts, const std::string& format) {
    const json doc_json = load_document_json(opts);
    const config::Document doc = config::document_from_json(doc_json);

    ValidationReport report;
    const GeneratorSpec factor = factor_of(doc);
    {
        ValidationReport gen = validation_report(factor);
        for (auto& row : gen.rows) report.rows.push_back(std::move(row));
    }
    if (doc.type == config::Document::Type::model) {
        const ModelSpec& m = doc.model;
        try {
            validate_model(m);
            report.add("model shapes", true, 0.0);
        } catch (const Error& e) {
            report.add("model shapes", false, 0.0, e.what());
        }
        if (m.e > 0) {
            try {
                validate_augmented(augmented_spec(m));
                report.add("augmentation degree bounds", true, 0.0);
            } catch (const Error& e) {
                report.add("augmentation degree bounds", false, 0.0, e.what());
            }
            if (m.risk_neutral) {
                try {
                    ModelSpec recomputed = risk_neutral_drift(m);
                    bool same = true;
                    for (int i = 0; i < m.e; ++i)
                        same = same && (m.bY.empty() || m.bY[i].same_terms(recomputed.bY[i], 1e-12));
                    report.add("risk-neutral drift", same, 0.0,
                               same ? "" : "declared bY differs from the martingale drift");
                } catch (const ExponentialMomentFailure& e) {
                    report.add("risk-neutral drift", false, 0.0, e.what());
                }
            }
        }
        if (m.subordinator) {
            const GeneratorMatrix gm = build_generator_matrix(factor, 4);
            ValidationReport sub = check_exponential_moments(*m.subordinator, gm);
            for (auto& row : sub.rows) report.rows.push_back(std::move(row));
        }
    }
    if (doc.type == config::Document::Type::augmented) {
        try {
            validate_augmented(doc.augmented);
            report.add("augmentation degree bounds", true, 0.0);
        } catch (const Error& e) {
            report.add("augmentation degree bounds", false, 0.0, e.what());
        }
    }

    if (format == "json") {
        json rows = json::array();
        for (const auto& row : report.rows) {
            json r;
            r["name"] = row.name;
            r["pass"] = row.pass;
            r["margin"] = row.margin;
            if (!row.detail.empty()) r["detail"] = row.detail;
            rows.push_back(r);
        }
        json out;
        out["provenance"] = provenance(doc_json, opts, "validate");
        out["checks"] = rows;
        out["pass"] = report.all_pass();
        write_output(opts, config::canonical_dump(out, 2) + "\n");
    } else {
        std::ostringstream os;
        for (const auto& row : report.rows) {
            os << (row.pass ? "[PASS] " : "[FAIL] ") << row.name << " (margin=" << fmt(row.margin)
               << ")";
            if (!row.detail.empty()) os << " " << row.detail;
            os << "\n";
        }
        os << (report.all_pass() ? "all checks passed" : "validation failed") << "\n";
        write_output(opts, os.str());
    }
    return report.all_pass() ? 0 : 2;
}

int cmd_moments(const CommonOpts& opts, const std::string& p_expr, int order,
                const std::string& tau_spec, const std::string& x_flag) {
    const json doc_json = load_document_json(opts);
    const config::Document doc = config::document_from_json(doc_json);
    const GeneratorSpec spec = factor_of(doc);
    const Eigen::VectorXd x = initial_state(doc, x_flag);
    const Poly p = p_expr.empty() ? Poly::variable(spec.dim, 0) : parse_poly(p_expr, spec.dim);
    const int degree = std::max(order, p.degree());
    const GeneratorMatrix gm = build_generator_matrix(spec, degree);
    const std::vector<double> taus = parse_grid(tau_spec);
    const std::vector<double> values = moment_path(gm, p, x, taus);

    std::ostringstream os;
    os << csv_provenance(doc_json, opts, "moments");
    os << "tau,value\n";
    for (size_t i = 0; i < taus.size(); ++i) os << fmt(taus[i]) << "," << fmt(values[i]) << "\n";
    write_output(opts, os.str());
    return 0;
}

int cmd_charfn(const CommonOpts& opts, const std::string& u_spec, double T,
               const std::string& x_flag) {
    const json doc_json = load_document_json(opts);
    const config::Document doc = config::document_from_json(doc_json);
    if (doc.type != config::Document::Type::model || !doc.model.affine_form)
        throw ConfigError("charfn needs a model document with an affine form");
    const AffineSpec& affine = *doc.model.affine_form;
    validate_affine(affine);
    const Eigen::VectorXd x = initial_state(doc, x_flag);

    std::ostringstream os;
    os << csv_provenance(doc_json, opts, "charfn");
    os << "u,re,im,status\n";
    for (double freq : parse_grid(u_spec)) {
        Eigen::VectorXcd u(affine.dim);
        u.setZero();
        u(0) = std::complex<double>(0.0, freq);
        const RiccatiSolution sol = solve_riccati(affine, u, std::max(T, 1e-12));
        if (sol.status == RiccatiSolution::Status::complete) {
            const std::complex<double> value = affine_transform(affine, sol, x, 0.0, T);
            os << fmt(freq) << "," << fmt(value.real()) << "," << fmt(value.imag()) << ",complete\n";
        } else {
            os << fmt(freq) << ",nan,nan,blowup@" << fmt(sol.blowup_tau) << "\n";
        }
    }
    write_output(opts, os.str());
    return 0;
}

int cmd_timechange(const CommonOpts& opts, const std::string& sub_file, int degree) {
    const json doc_json = load_document_json(opts);
    const config::Document doc = config::document_from_json(doc_json);
    SubordinatorSpec sub;
    if (!sub_file.empty())
        sub = config::subordinator_from_json(config::load_file(sub_file));
    else if (doc.type == config::Document::Type::model && doc.model.subordinator)
        sub = *doc.model.subordinator;
    else
        throw ConfigError("timechange needs --subordinator FILE or a model with one");

    const GeneratorSpec spec = factor_of(doc);
    const GeneratorMatrix gm = build_generator_matrix(spec, degree);
    const ValidationReport feasibility = check_exponential_moments(sub, gm);
    std::ostringstream os;
    os << csv_provenance(doc_json, opts, "timechange");
    for (const auto& row : feasibility.rows)
        os << "# " << (row.pass ? "pass" : "FAIL") << " " << row.name << " margin=" << fmt(row.margin)
           << "\n";
    const GeneratorMatrix tilted = subordinate_matrix(gm, sub);
    for (int i = 0; i < tilted.size(); ++i) {
        for (int j = 0; j < tilted.size(); ++j) os << (j ? "," : "") << fmt(tilted.G(i, j));
        os << "\n";
    }
    write_output(opts, os.str());
    return 0;
}

int cmd_simulate(const CommonOpts& opts, double T, long long paths, int steps,
                 const std::string& scheme, bool antithetic, bool raw, bool subordinated) {
    const json doc_json = load_document_json(opts);
    const config::Document doc = config::document_from_json(doc_json);

    PathModel pm = [&] {
        switch (doc.type) {
            case config::Document::Type::model: return to_path_model(doc.model);
            case config::Document::Type::generator: {
                throw ConfigError("simulate needs a model document (generator specs carry no x0)");
            }
            case config::Document::Type::augmented: {
                Eigen::VectorXd z0 = Eigen::VectorXd::Zero(doc.augmented.zdim());
                return path_model(doc.augmented, z0);
            }
        }
        throw ConfigError("unreachable document type");
    }();

    SimConfig cfg;
    cfg.paths = paths;
    cfg.steps_per_unit = steps;
    cfg.seed = opts.seed;
    cfg.antithetic = antithetic;
    cfg.threads = resolve_threads(opts.threads);
    if (scheme == "exact_ou")
        cfg.scheme = SimConfig::Scheme::exact_ou;
    else if (scheme != "euler")
        throw ConfigError("unknown scheme '" + scheme + "'");

    SimResult result;
    if (subordinated) {
        if (doc.type != config::Document::Type::model || !doc.model.subordinator)
            throw ConfigError("--subordinated needs a model with a subordinator");
        result = simulate_subordinated(pm, *doc.model.subordinator, T, cfg);
    } else {
        result = simulate(pm, T, cfg);
    }

    if (raw) {
        std::ostringstream os;
        os << csv_provenance(doc_json, opts, "simulate");
        for (int c = 0; c < result.terminal.cols(); ++c) os << (c ? "," : "") << "z" << c;
        os << "\n";
        for (long long r = 0; r < result.terminal.rows(); ++r) {
            for (int c = 0; c < result.terminal.cols(); ++c)
                os << (c ? "," : "") << fmt(result.terminal(r, c));
            os << "\n";
        }
        write_output(opts, os.str());
        return 0;
    }

    json out;
    out["provenance"] = provenance(doc_json, opts, "simulate");
    out["paths"] = result.terminal.rows();
    out["exits"] = result.exits;
    out["jumps"] = result.jumps;
    json comps = json::array();
    for (int c = 0; c < result.terminal.cols(); ++c) {
        const EstimateWithSE est = estimate(
            [c](const Eigen::VectorXd& z) { return z(c); }, result.terminal);
        json comp;
        comp["component"] = c;
        comp["mean"] = est.mean;
        comp["se"] = est.se;
        comps.push_back(comp);
    }
    out["terminal"] = comps;
    write_output(opts, config::canonical_dump(out, 2) + "\n");
    return 0;
}

int cmd_price(const CommonOpts& opts, const std::string& payoff, double strike, double T, int K,
              int asset, const std::string& aux_spec, const std::string& times_spec,
              const std::string& table_file) {
    const json doc_json = load_document_json(opts);
    const config::Document doc = config::document_from_json(doc_json);
    if (doc.type != config::Document::Type::model)
        throw ConfigError("price needs a model document");

    PricingRequest req;
    req.model = doc.model;
    req.asset = asset;
    req.horizon = T;
    req.K = K;
    req.strike = strike;
    if (payoff == "call")
        req.payoff = PricingRequest::PayoffKind::call;
    else if (payoff == "put")
        req.payoff = PricingRequest::PayoffKind::put;
    else if (payoff == "custom")
        req.payoff = PricingRequest::PayoffKind::custom;
    else
        throw ConfigError("unknown payoff '" + payoff + "'");
    if (req.payoff == PricingRequest::PayoffKind::custom) {
        if (table_file.empty()) throw ConfigError("custom payoffs need --table FILE");
        const json table = config::load_file(table_file);
        for (const auto& row : table)
            req.table.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
    }
    if (!times_spec.empty()) req.times = parse_grid(times_spec);
    if (!aux_spec.empty()) {
        // "mean,var" pair for a single-Gaussian auxiliary
        const Eigen::VectorXd mv = parse_point(aux_spec);
        if (mv.size() != 2) throw ConfigError("--aux must be mean,variance");
        req.auxiliary = AuxiliaryMeasure::gaussian1d(mv(0), mv(1));
    }

    const PriceResult result = price(req);
    json out;
    out["provenance"] = provenance(doc_json, opts, "price");
    out["price"] = result.value;
    out["partial_sums"] = result.partial_sums;
    out["ell"] = result.ell;
    out["F"] = result.F;
    json diag;
    diag["tail"] = result.tail;
    diag["gram_condition"] = result.gram_condition;
    diag["notes"] = result.notes;
    out["diagnostics"] = diag;
    write_output(opts, config::canonical_dump(out, 2) + "\n");
    return 0;
}

} // namespace

Poly parse_poly(const std::string& text, int dim) {
    // expr := ['+'|'-'] term (('+'|'-') term)* ; term := factor ('*' factor)*
    // factor := number | 'x' [index] ['^' power]
    size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto parse_factor = [&](double& coeff, MultiIndex& alpha) {
        skip();
        if (pos >= text.size()) throw ConfigError("polynomial expression ends unexpectedly");
        if (text[pos] == 'x') {
            ++pos;
            int var = 1;
            if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                var = 0;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                    var = var * 10 + (text[pos++] - '0');
            }
            if (var < 1 || var > dim)
                throw ConfigError("variable x" + std::to_string(var) + " out of range for dimension " +
                                  std::to_string(dim));
            int power = 1;
            skip();
            if (pos < text.size() && text[pos] == '^') {
                ++pos;
                skip();
                power = 0;
                if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
                    throw ConfigError("expected an exponent after '^'");
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                    power = power * 10 + (text[pos++] - '0');
            }
            std::vector<int> exps(alpha.exps());
            exps[var - 1] += power;
            alpha = MultiIndex(std::move(exps));
            return;
        }
        size_t consumed = 0;
        const double value = std::stod(text.substr(pos), &consumed);
        if (consumed == 0) throw ConfigError("cannot parse polynomial near '" + text.substr(pos) + "'");
        pos += consumed;
        coeff *= value;
    };

    Poly p(dim);
    skip();
    while (pos < text.size()) {
        double sign = 1.0;
        skip();
        if (text[pos] == '+' || text[pos] == '-') {
            sign = text[pos] == '-' ? -1.0 : 1.0;
            ++pos;
        }
        double coeff = sign;
        MultiIndex alpha = MultiIndex::zero(dim);
        parse_factor(coeff, alpha);
        skip();
        while (pos < text.size() && text[pos] == '*') {
            ++pos;
            parse_factor(coeff, alpha);
            skip();
        }
        p.add_term(alpha, coeff);
        skip();
    }
    return p;
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"polynomial jump-diffusion toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* zoo = app.add_subcommand("zoo", "list or dump preconfigured models");
    std::string zoo_name;
    zoo->add_option("name", zoo_name, "model name (empty: list)");
    add_common(zoo, opts, false);

    auto* validate = app.add_subcommand("validate", "run all spec validators");
    std::string validate_format = "text";
    validate->add_option("--format", validate_format, "text or json");
    add_common(validate, opts);

    auto* moments = app.add_subcommand("moments", "conditional moments over a horizon grid");
    std::string p_expr, tau_spec, x_flag;
    int order = 4;
    moments->add_option("--p", p_expr, "target polynomial, e.g. \"x\" or \"x^2 - 1\"");
    moments->add_option("--order", order, "basis degree (raised to deg p automatically)");
    moments->add_option("--tau", tau_spec, "horizon grid a:b:step or comma list")->required();
    moments->add_option("--x", x_flag, "initial state, comma separated");
    add_common(moments, opts);

    auto* charfn = app.add_subcommand("charfn", "characteristic function along an imaginary grid");
    std::string u_spec;
    double charfn_T = 1.0;
    charfn->add_option("--u", u_spec, "frequency grid a:b:step (u = i s)")->required();
    charfn->add_option("--T", charfn_T, "horizon");
    charfn->add_option("--x", x_flag, "initial state");
    add_common(charfn, opts);

    auto* timechange = app.add_subcommand("timechange", "subordinated generator matrix");
    std::string sub_file;
    int tc_degree = 4;
    timechange->add_option("--subordinator", sub_file, "subordinator config (JSON)");
    timechange->add_option("--n", tc_degree, "basis degree");
    add_common(timechange, opts);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo paths and summaries");
    double sim_T = 1.0;
    long long sim_paths = 100000;
    int sim_steps = 500;
    std::string sim_scheme = "euler";
    bool sim_antithetic = false, sim_raw = false, sim_subordinated = false;
    simulate->add_option("--T", sim_T, "horizon");
    simulate->add_option("--paths", sim_paths, "number of paths");
    simulate->add_option("--steps", sim_steps, "Euler steps per unit time");
    simulate->add_option("--scheme", sim_scheme, "euler or exact_ou");
    simulate->add_flag("--antithetic", sim_antithetic, "antithetic pairing");
    simulate->add_flag("--raw", sim_raw, "emit raw terminal samples as CSV");
    simulate->add_flag("--subordinated", sim_subordinated, "run on the model's random clock");
    add_common(simulate, opts);

    auto* price_cmd = app.add_subcommand("price", "polynomial-expansion option price");
    std::string payoff = "call", aux_spec, times_spec, table_file;
    double strike = 1.0, price_T = 1.0;
    int K = 20, asset = 0;
    price_cmd->add_option("--payoff", payoff, "call, put, or custom");
    price_cmd->add_option("--strike", strike, "strike");
    price_cmd->add_option("--T", price_T, "horizon");
    price_cmd->add_option("--K", K, "expansion truncation order");
    price_cmd->add_option("--asset", asset, "asset index");
    price_cmd->add_option("--aux", aux_spec, "auxiliary mean,variance (default: auto)");
    price_cmd->add_option("--times", times_spec, "observation times (default: T)");
    price_cmd->add_option("--table", table_file, "custom payoff table (JSON [[y, F(y)], ...])");
    add_common(price_cmd, opts);

    std::vector<const char*> argv = {"pjd"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cout << "{\"error\":{\"type\":\"usage\",\"message\":" << json(e.what()).dump() << "}}\n";
        return 2;
    }

    try {
        if (zoo->parsed()) return cmd_zoo(opts, zoo_name);
        if (validate->parsed()) return cmd_validate(opts, validate_format);
        if (moments->parsed()) return cmd_moments(opts, p_expr, order, tau_spec, x_flag);
        if (charfn->parsed()) return cmd_charfn(opts, u_spec, charfn_T, x_flag);
        if (timechange->parsed()) return cmd_timechange(opts, sub_file, tc_degree);
        if (simulate->parsed())
            return cmd_simulate(opts, sim_T, sim_paths, sim_steps, sim_scheme, sim_antithetic,
                                sim_raw, sim_subordinated);
        if (price_cmd->parsed())
            return cmd_price(opts, payoff, strike, price_T, K, asset, aux_spec, times_spec,
                             table_file);
        return 2;
    } catch (const ConfigError& e) {
        std::cout << "{\"error\":{\"type\":\"config\",\"message\":" << json(e.what()).dump() << "}}\n";
        return 2;
    } catch (const Error& e) {
        std::cout << "{\"error\":{\"type\":\"validation\",\"message\":" << json(e.what()).dump()
                  << "}}\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace pjd::cli
