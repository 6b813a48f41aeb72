#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tcilab/analysis.hpp"
#include "tcilab/criteria.hpp"
#include "tcilab/grammar.hpp"
#include "tcilab/transport.hpp"
#include "tcilab/verify.hpp"

using namespace tcilab;
using nlohmann::json;

namespace {

struct Common {
    std::string mu = "exponential";
    std::string cost = "alpha1";
    std::string prefactor = "1";
    double scale = 1.0;
    std::uint64_t seed = 1;
    std::string out;
    std::string csv;
};

void emit(const json& j, const std::string& out_dir, const std::string& name) {
    if (out_dir.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / name;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << j.dump(2) << "\n";
    std::cerr << "wrote " << path.string() << "\n";
}

CostFunction cost_of(const Common& c) {
    const double k = parse_real(c.prefactor);
    return parse_cost(c.cost).scaled(k);
}

void common_flags(CLI::App* app, Common& c) {
    app->add_option("--mu", c.mu, "measure, e.g. 'gaussian sigma=0.7'");
    app->add_option("--cost", c.cost, "cost, e.g. 'alpha1' or '1/36*alpha1'");
    app->add_option("--scale-prefactor", c.prefactor, "multiplies the cost, e.g. 1/36");
    app->add_option("--scale", c.scale, "argument scale a in alpha(a(x-y))");
    app->add_option("--seed", c.seed, "seed");
    app->add_option("--out", c.out, "output directory (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tci-lab: transportation-cost inequalities on the real line"};
    app.require_subcommand(1);

    // analyze
    auto* an = app.add_subcommand("analyze", "run the full criteria battery on a (measure, cost) pair");
    std::string config_path, an_out, an_mu, an_cost;
    std::optional<std::uint64_t> an_seed;
    std::optional<double> an_scale;
    std::optional<std::size_t> an_samples, an_trials;
    an->add_option("--config", config_path, "JSON config");
    an->add_option("--out", an_out, "output directory");
    an->add_option("--seed", an_seed, "seed");
    an->add_option("--mu", an_mu, "measure");
    an->add_option("--cost", an_cost, "cost");
    an->add_option("--scale", an_scale, "verification scale");
    an->add_option("--samples", an_samples, "Monte Carlo samples");
    an->add_option("--trials", an_trials, "dual check trials");

    // transport
    auto* tr = app.add_subcommand("transport", "optimal transport cost between two measures");
    Common tc;
    std::string nu_spec = "gaussian";
    int atoms = 64;
    std::string method = "monotone";
    common_flags(tr, tc);
    tr->add_option("--nu", nu_spec, "source measure");
    tr->add_option("--method", method, "monotone (quantile coupling) or lp (on discretizations)")
        ->check(CLI::IsMember({"monotone", "lp"}));
    tr->add_option("--atoms", atoms, "atoms per discretization");

    // criteria
    auto* cr = app.add_subcommand("criteria", "evaluate one criterion");
    Common cc;
    std::string check = "lip";
    common_flags(cr, cc);
    cr->add_option("--check", check, "criterion")
        ->check(CLI::IsMember({"lip", "muckenhoupt", "logconcave", "char-lm", "char-logconcave",
                               "suff-cond", "lsi-tilde"}));

    // verify
    auto* vf = app.add_subcommand("verify", "numerical verification");
    vf->require_subcommand(1);
    Common vc;
    std::size_t trials = 10000, samples = 100000;
    int dim = 1, vatoms = 4;
    double lambda = 0.5;
    std::optional<double> lsi_C, lsi_t;
    std::vector<double> r_grid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
    std::vector<CLI::App*> kinds;
    for (const char* k : {"dual", "integrability", "marton", "tensor", "concentration", "lsi"}) {
        auto* s = vf->add_subcommand(k);
        common_flags(s, vc);
        s->add_option("--trials", trials, "trials");
        s->add_option("--samples", samples, "samples");
        s->add_option("--n", dim, "dimension");
        s->add_option("--atoms", vatoms, "atoms of the discretization (tensor)");
        s->add_option("--r", r_grid, "r grid (concentration)");
        s->add_option("--lambda", lambda, "lambda in (0,1) (lsi)");
        s->add_option("--C", lsi_C, "LSI constant C (lsi)");
        s->add_option("--t", lsi_t, "LSI constant t (lsi)");
        s->add_option("--csv", vc.csv, "CSV path for curves (concentration)");
        kinds.push_back(s);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (an->parsed()) {
            AnalysisConfig cfg = config_path.empty() ? AnalysisConfig{} : load_config(config_path);
            if (!an_mu.empty()) cfg.measure = an_mu;
            if (!an_cost.empty()) cfg.cost = an_cost;
            if (an_seed) cfg.seed = *an_seed;
            if (an_scale) cfg.scale = an_scale;
            if (an_samples) cfg.samples = *an_samples;
            if (an_trials) cfg.dual_trials = *an_trials;
            if (!an_out.empty()) cfg.out_dir = an_out;
            const AnalysisReport rep = run_analyze(cfg);
            if (cfg.out_dir.empty()) {
                std::cout << rep.body.dump(2) << "\n";
            } else {
                for (auto f : {ReportFormat::json, ReportFormat::text, ReportFormat::csv_curves}) {
                    for (const auto& p : emit_report(rep, f, cfg.out_dir)) std::cerr << "wrote " << p << "\n";
                }
            }
            return rep.stage_error ? 1 : 0;
        }
        if (tr->parsed()) {
            const Measure1D nu = parse_measure(nu_spec), mu = parse_measure(tc.mu);
            const CostFunction alpha = cost_of(tc);
            json j = {{"nu", nu_spec}, {"mu", tc.mu}, {"cost", alpha.name()}, {"scale", tc.scale},
                      {"method", method}};
            if (method == "monotone") {
                const MonotoneCost mc = cost_monotone(nu, mu, alpha, tc.scale);
                j["value"] = encode_real(mc.value);
                j["exact"] = mc.exact;
                j["diagnostics"] = mc.diagnostics;
            } else {
                const DiscreteMeasure dn = discretize(nu, atoms), dm = discretize(mu, atoms);
                const LpResult lp = cost_lp(dn, dm, alpha, tc.scale);
                j["value"] = lp.value;
                j["exact"] = true;
                j["diagnostics"] = {{"atoms", atoms},
                                    {"pivots", lp.pivots},
                                    {"marginal_error", lp.plan.marginal_error()},
                                    {"monotone_discrete", cost_monotone(dn, dm, alpha, tc.scale).value}};
            }
            j["relative_entropy"] = encode_real(relative_entropy(nu, mu));
            emit(j, tc.out, "transport.json");
            return 0;
        }
        if (cr->parsed()) {
            const Measure1D mu = parse_measure(cc.mu);
            const CostFunction alpha = cost_of(cc);
            json j;
            if (check == "lip") {
                j = to_json(lipschitz_check(mu));
            } else if (check == "muckenhoupt") {
                const MuckenhouptResult d = muckenhoupt(mu);
                j = {{"D+", encode_real(d.d_plus)},
                     {"D-", encode_real(d.d_minus)},
                     {"argmax+", encode_real(d.argmax_plus)},
                     {"argmax-", encode_real(d.argmax_minus)}};
            } else if (check == "logconcave") {
                j = to_json(is_log_concave(mu));
            } else if (check == "char-lm") {
                j = to_json(decide_strong_tci_lip(mu, alpha));
            } else if (check == "char-logconcave") {
                j = to_json(decide_strong_tci_logconcave(mu, alpha));
            } else if (check == "suff-cond") {
                j = to_json(suff_condition(mu, alpha));
            } else {
                const TildePotential tp = lsi_tilde_potential(mu);
                j = to_json(tp.verdict);
                j["a0"] = tp.a0;
            }
            j["check"] = check;
            emit(j, cc.out, "criteria.json");
            return 0;
        }
        for (CLI::App* s : kinds) {
            if (!s->parsed()) continue;
            const std::string kind = s->get_name();
            const Measure1D mu = parse_measure(vc.mu);
            const CostFunction alpha = cost_of(vc);
            json j = {{"kind", kind}, {"mu", vc.mu}, {"cost", alpha.name()}, {"scale", vc.scale}, {"seed", vc.seed}};
            if (kind == "dual") {
                DualCheckOptions o;
                o.trials = trials;
                o.seed = vc.seed;
                const DualTestReport r = dual_check_strong(mu, alpha, vc.scale, o);
                j["trials"] = r.trials;
                j["worst_product"] = encode_real(r.worst_product);
                j["worst_product_lower"] = encode_real(r.worst_product_lower);
                j["worst_kind"] = r.worst_kind;
                j["status"] = r.status();
                j["certified"] = r.certified();
            } else if (kind == "integrability") {
                j["verdict"] = to_json(integrability_check(mu, alpha, vc.scale));
            } else if (kind == "marton") {
                std::vector<std::pair<IntervalSet, IntervalSet>> pairs;
                const double m = mu.median();
                for (int t = 1; t <= 10; ++t) pairs.push_back({{{-kInf, m - t}}, {{m + t, kInf}}});
                j["verdict"] = to_json(marton_bound_check(mu, alpha, vc.scale, pairs));
            } else if (kind == "tensor") {
                TensorOptions o;
                o.n = dim < 2 ? 2 : dim;
                o.trials = trials;
                o.seed = vc.seed;
                j["verdict"] = to_json(tensor_check(discretize(mu, vatoms), alpha, vc.scale, o));
            } else if (kind == "concentration") {
                const ConcentrationTable t =
                    concentration_mc(mu, alpha, vc.scale, {mu.median(), kInf}, dim, r_grid, samples, vc.seed);
                json rows = json::array();
                for (const auto& r : t.rows) {
                    rows.push_back({{"r", r.r}, {"empirical", r.empirical}, {"lower_ci", r.lower_ci},
                                    {"upper_ci", r.upper_ci}, {"bound", r.bound}});
                }
                j["n"] = dim;
                j["samples"] = samples;
                j["mass_A"] = t.mass_A;
                j["rows"] = rows;
                j["verdict"] = to_json(t.verdict);
                if (!vc.csv.empty()) {
                    std::ofstream f(vc.csv);
                    f << concentration_csv(j);
                }
            } else {
                double C, t;
                if (lsi_C && lsi_t) {
                    C = *lsi_C;
                    t = *lsi_t;
                } else {
                    const Verdict d = decide_strong_tci_logconcave(mu, alpha);
                    if (!d.holds()) throw std::runtime_error("no scale for LSI constants: " + d.diagnostics);
                    C = lambda / (1.0 - lambda);
                    t = 1.0 / (d.at("a") * lambda);
                    j["a"] = d.at("a");
                }
                const LsiReport rep = lsi_check(mu, [&](double y) { return alpha.conjugate(y); }, C, t, lsi_family());
                j["C"] = C;
                j["t"] = t;
                j["verdict"] = to_json(rep.verdict);
            }
            emit(j, vc.out, "verify_" + kind + ".json");
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
