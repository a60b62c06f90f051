#include "gsf/calculus.hpp"
#include "gsf/error.hpp"
#include "gsf/mollifier.hpp"
#include "gsf/parse.hpp"
#include "gsf/scenarios.hpp"
#include "gsf/suites.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace gsf;

namespace {

enum Exit { ok = 0, invariant_failed = 1, input_error = 2, eval_error = 3 };

struct Manifest {
    std::string gauge = "identity";
    std::optional<std::size_t> grid_n;
    std::optional<double> grid_eps0, grid_ratio;
    double b_exponent = 1.0;
    bool b_exponent_set = false;
    unsigned long seed = 1;
    std::string out;

    Ctx context() const
    {
        GaugeKind kind = parse_gauge_kind(gauge);
        if (!grid_n && !grid_eps0 && !grid_ratio) return make_context(kind);
        const std::size_t n = grid_n.value_or(24);
        if (n < 8) throw InputError("--grid-n must be at least 8");
        EpsGrid base = EpsGrid::default_for(kind, n);
        double eps0 = grid_eps0.value_or(base[0]);
        double ratio = grid_ratio.value_or(base[1] / base[0]);
        if (!(eps0 > 0.0 && eps0 <= 1.0)) throw InputError("--grid-eps0 must lie in (0, 1]");
        if (!(ratio > 0.0 && ratio < 1.0)) throw InputError("--grid-ratio must lie in (0, 1)");
        return make_context(make_gauge(kind), EpsGrid::geometric(n, eps0, ratio));
    }
};

// "" means stdout
std::ofstream open_out(const std::string& dir, const std::string& name)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    fs::path p = fs::path(dir) / name;
    std::ofstream f(p);
    if (!f) throw InputError("cannot write " + p.string());
    return f;
}

int cmd_classify(const Manifest& m, const std::string& text)
{
    Ctx c = m.context();
    GenNum x = parse_scalar(text, c);
    for (std::size_t i = c->tail_start(); i < c->size(); ++i)
        if (std::isnan(x.at(i))) throw EvalError("expression undefined", c->grid[i]);
    AsymptoticClass a = classify(x);
    std::cout << std::setprecision(6);
    std::cout << "expression: " << text << '\n'
              << "gauge: " << m.gauge << '\n'
              << "label: " << to_string(a.label) << '\n'
              << "order: " << a.order << '\n'
              << "fit_residual: " << a.fit_residual << '\n'
              << "limit: ";
    if (a.limit)
        std::cout << *a.limit << '\n';
    else
        std::cout << "none\n";
    std::cout << "non_moderate_suspected: " << (a.non_moderate ? "yes" : "no") << '\n'
              << "far_from_zero: " << (a.far_from_zero ? "yes" : "no") << '\n';
    if (!a.diagnostic.empty()) std::cout << "diagnostic: " << a.diagnostic << '\n';
    return ok;
}

int cmd_simulate(const Manifest& m, const std::string& id, const std::string& config)
{
    ScenarioConfig cfg;
    if (config.empty()) {
        cfg = default_config(id);
    } else {
        std::ifstream in(config);
        if (!in) throw InputError("cannot read config " + config);
        cfg = read_config(in, id);
    }
    if (m.grid_n) cfg.grid_n = *m.grid_n;
    if (m.b_exponent_set) cfg.b_exponent = m.b_exponent;
    validate_config(cfg);

    ScenarioResult r = run_scenario(cfg);
    const std::string dir = m.out.empty() ? "." : m.out;
    const int samples = int(cfg.values.count("samples") ? cfg.get("samples") : 200.0);
    for (std::size_t k = 0; k < r.paths.size(); ++k) {
        std::string name = cfg.id + (k == 0 ? "" : "_" + r.paths[k].name) + "_path.csv";
        auto f = open_out(dir, name);
        export_path_csv(f, r.paths[k].path, samples);
    }
    {
        auto f = open_out(dir, cfg.id + "_events.csv");
        export_events_csv(f, r);
    }
    {
        auto f = open_out(dir, "report.txt");
        write_report(f, r);
    }
    write_report(std::cout, r);
    return r.passed() ? ok : invariant_failed;
}

int cmd_verify(const Manifest& m, const std::string& suite)
{
    SuiteOptions opt;
    opt.seed = m.seed;
    opt.ctx = m.context();
    SuiteReport r = run_suite(suite, opt);
    write_suite_csv(std::cout, r);
    if (!m.out.empty()) {
        auto f = open_out(m.out, suite + "_verify.csv");
        write_suite_csv(f, r);
    }
    return r.passed() ? ok : invariant_failed;
}

int cmd_embed_export(const Manifest& m, const std::string& what, double lo, double hi, int points)
{
    if (!(hi > lo)) throw InputError("--hi must exceed --lo");
    if (points < 2) throw InputError("--points must be at least 2");
    auto emit = [&](std::ostream& os) {
        if (what == "mollifier") {
            export_mollifier_csv(os, standard_mollifier(), lo, hi, points);
            return;
        }
        Ctx c = m.context();
        GenNum b = embedding_scale(c, m.b_exponent);
        Expr f;
        if (what == "delta")
            f = embed_delta(b);
        else if (what == "heaviside")
            f = embed_heaviside(b);
        else if (what == "vp")
            f = embed_vp(b);
        else if (what == "delta_delta")
            f = compose(embed_delta(b), {embed_delta(b)});
        else
            throw InputError("unknown export '" + what + "' (mollifier, delta, heaviside, vp, delta_delta)");
        std::vector<double> xs(static_cast<std::size_t>(points));
        for (int k = 0; k < points; ++k) xs[std::size_t(k)] = lo + (hi - lo) * k / (points - 1);
        export_samples_csv(os, f, c, xs);
    };
    if (m.out.empty()) {
        emit(std::cout);
    } else {
        auto f = open_out(m.out, what + ".csv");
        emit(f);
    }
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"generalized smooth functions calculator"};
    app.require_subcommand(1);
    app.fallthrough();

    Manifest m;
    app.add_option("--gauge", m.gauge, "infinitesimal net")->check(CLI::IsMember({"identity", "exp_inv"}));
    app.add_option("--grid-n", m.grid_n, "eps samples");
    app.add_option("--grid-eps0", m.grid_eps0, "largest eps");
    app.add_option("--grid-ratio", m.grid_ratio, "geometric ratio of the eps grid");
    auto* bexp = app.add_option("--b-exponent", m.b_exponent, "embedding scale b = drho^-a");
    app.add_option("--seed", m.seed, "seed for the randomized suites");
    app.add_option("--out", m.out, "output directory");

    std::string text;
    auto* classify_cmd = app.add_subcommand("classify", "asymptotic class of a scalar expression");
    classify_cmd->add_option("expression", text)->required();

    std::string scenario, config;
    auto* sim = app.add_subcommand("simulate", "run a scenario and write path, event and report files");
    sim->add_option("scenario", scenario)->required();
    sim->add_option("--config", config, "config file with [scenario.<id>] sections");

    std::string suite;
    auto* ver = app.add_subcommand("verify", "run a property suite and print a CSV summary");
    ver->add_option("suite", suite)->required();

    std::string what;
    double lo = -2.0, hi = 2.0;
    int points = 201;
    auto* emb = app.add_subcommand("embed-export", "sample the mollifier or an embedded distribution");
    emb->add_option("what", what, "mollifier, delta, heaviside, vp or delta_delta")->required();
    emb->add_option("--lo", lo);
    emb->add_option("--hi", hi);
    emb->add_option("--points", points);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return input_error;
    }
    m.b_exponent_set = bexp->count() > 0;
    if (m.b_exponent_set && !(m.b_exponent > 0.0)) {
        std::cerr << "error: --b-exponent must be positive\n";
        return input_error;
    }

    try {
        if (*classify_cmd) return cmd_classify(m, text);
        if (*sim) return cmd_simulate(m, scenario, config);
        if (*ver) return cmd_verify(m, suite);
        return cmd_embed_export(m, what, lo, hi, points);
    } catch (const ParseError& e) {
        std::cerr << text << '\n' << std::string(e.position(), ' ') << "^\n" << "error: " << e.what() << '\n';
        return input_error;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return input_error;
    } catch (const std::exception& e) {
        std::cerr << "evaluation error: " << e.what() << '\n';
        return eval_error;
    }
}
