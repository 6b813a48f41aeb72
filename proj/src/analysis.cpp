#include "tcilab/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tcilab/criteria.hpp"
#include "tcilab/grammar.hpp"
#include "tcilab/verify.hpp"

namespace tcilab {

using nlohmann::json;

nlohmann::json config_to_json(const AnalysisConfig& c) {
    json j;
    j["measure"] = c.measure;
    j["cost"] = c.cost;
    j["scale"] = c.scale ? json(*c.scale) : json(nullptr);
    j["kappa"] = c.kappa;
    j["seed"] = c.seed;
    j["dual_trials"] = c.dual_trials;
    j["samples"] = c.samples;
    j["dims"] = c.dims;
    j["r_grid"] = c.r_grid;
    j["scan_scales"] = c.scan_scales;
    j["out_dir"] = c.out_dir;
    return j;
}

AnalysisConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    AnalysisConfig c;
    for (const auto& [k, v] : j.items()) {
        if (k == "measure") c.measure = v.get<std::string>();
        else if (k == "cost") c.cost = v.get<std::string>();
        else if (k == "scale") c.scale = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
        else if (k == "kappa") c.kappa = v.get<double>();
        else if (k == "seed") c.seed = v.get<std::uint64_t>();
        else if (k == "dual_trials") c.dual_trials = v.get<std::size_t>();
        else if (k == "samples") c.samples = v.get<std::size_t>();
        else if (k == "dims") c.dims = v.get<std::vector<int>>();
        else if (k == "r_grid") c.r_grid = v.get<std::vector<double>>();
        else if (k == "scan_scales") c.scan_scales = v.get<std::vector<double>>();
        else if (k == "out_dir") c.out_dir = v.get<std::string>();
        else throw std::invalid_argument("unknown config field '" + k + "'");
    }
    if (!(c.kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    if (c.scale && !(*c.scale > 0.0)) throw std::invalid_argument("scale must be positive");
    return c;
}

AnalysisConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    return config_from_json(json::parse(in));
}

std::string config_hash(const AnalysisConfig& c) {
    json j = config_to_json(c);
    j.erase("out_dir");
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json empty_report(const AnalysisConfig& config) {
    json r;
    r["schema"] = kReportSchema;
    r["provenance"] = {{"version", kVersion},
                       {"seed", config.seed},
                       {"config_hash", config_hash(config)},
                       {"config", config_to_json(config)}};
    // where the report is written is not part of its body
    r["provenance"]["config"].erase("out_dir");
    r["measure"] = json::object();
    r["criteria"] = json::object();
    r["verification"] = json::object();
    r["moduli"] = json::object();
    r["stages"] = json::array();
    r["overall"] = "inconclusive";
    return r;
}

namespace {

json concentration_json(const ConcentrationTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"r", r.r},
                        {"empirical", r.empirical},
                        {"lower_ci", r.lower_ci},
                        {"upper_ci", r.upper_ci},
                        {"bound", r.bound}});
    }
    return {{"n", t.n},
            {"samples", t.samples},
            {"seed", t.seed},
            {"mass_A", t.mass_A},
            {"empirical_mass_A", t.empirical_mass_A},
            {"rows", rows},
            {"verdict", to_json(t.verdict)}};
}

json reals(const std::vector<double>& xs) {
    json a = json::array();
    for (double x : xs) a.push_back(encode_real(x));
    return a;
}

json dual_json(const DualTestReport& d) {
    return {{"trials", d.trials},
            {"seed", d.seed},
            {"weak_form", d.weak_form},
            {"worst_product", encode_real(d.worst_product)},
            {"worst_product_lower", encode_real(d.worst_product_lower)},
            {"worst_kind", d.worst_kind},
            {"slack", d.slack},
            {"status", d.status()},
            {"certified", d.certified()}};
}

}  // namespace

AnalysisReport run_analyze(const AnalysisConfig& cfg) {
    AnalysisReport out;
    json& r = out.body;
    r = empty_report(cfg);
    CriteriaOptions opts;
    opts.kappa = cfg.kappa;

    auto stage = [&](const std::string& name, auto&& fn) {
        try {
            fn();
            r["stages"].push_back({{"name", name}, {"status", "ok"}});
            return true;
        } catch (const std::exception& e) {
            out.stage_error = true;
            r["stages"].push_back({{"name", name}, {"status", "error"}, {"message", e.what()}});
            return false;
        }
    };
    auto skipped = [&](const std::string& name, const std::string& why) {
        r["stages"].push_back({{"name", name}, {"status", "skipped"}, {"message", why}});
    };

    std::optional<Measure1D> mu;
    std::optional<CostFunction> alpha;
    if (!stage("measure", [&] {
            mu = parse_measure(cfg.measure);
            alpha = parse_cost(cfg.cost);
            const Support s = mu->support();
            r["measure"] = {{"spec", cfg.measure},
                            {"name", mu->name()},
                            {"median", mu->median()},
                            {"logZ", mu->log_normalizer()},
                            {"support", {encode_real(s.lo), encode_real(s.hi)}},
                            {"cost", alpha->name()},
                            {"cost_class_A", alpha->in_class_A()},
                            {"cost_convex", alpha->convex()}};
        })) {
        r["overall"] = "inconclusive";
        return out;
    }

    bool log_concave = false;
    stage("shape", [&] {
        const Verdict v = is_log_concave(*mu);
        log_concave = v.holds();
        r["measure"]["log_concave"] = to_json(v);
    });
    stage("lipschitz", [&] {
        const Verdict v = lipschitz_check(*mu, opts);
        r["criteria"]["lipschitz"] = to_json(v);
        const MuckenhouptResult d = muckenhoupt(*mu, opts);
        r["criteria"]["muckenhoupt"] = {{"D+", encode_real(d.d_plus)},
                                        {"D-", encode_real(d.d_minus)},
                                        {"argmax+", encode_real(d.argmax_plus)},
                                        {"argmax-", encode_real(d.argmax_minus)}};
    });
    stage("moduli", [&] {
        const RearrangementMap rm = rearrangement(*mu);
        const OmegaBounds ob = omega_bounds(rm, rm.h_grid, opts);
        r["moduli"] = {{"h", reals(rm.h_grid)},
                       {"omega", reals(rm.omega)},
                       {"delta", reals(rm.delta)},
                       {"omega_plus", reals(ob.plus)},
                       {"omega_minus", reals(ob.minus)},
                       {"omega_lower", reals(ob.lower)}};
    });

    std::optional<double> scale;
    std::optional<Verdict> lip_decision, lc_decision;
    stage("char-lm", [&] {
        lip_decision = decide_strong_tci_lip(*mu, *alpha, opts);
        r["criteria"]["char-lm"] = to_json(*lip_decision);
    });
    if (log_concave) {
        stage("char-logconcave", [&] {
            lc_decision = decide_strong_tci_logconcave(*mu, *alpha, opts);
            r["criteria"]["char-logconcave"] = to_json(*lc_decision);
        });
    } else {
        skipped("char-logconcave", "measure not shown log-concave");
    }
    if (lc_decision && lc_decision->holds()) {
        scale = lc_decision->at("scale");
    } else if (lip_decision && lip_decision->holds()) {
        scale = lip_decision->at("scale");
    }
    stage("suff-cond", [&] { r["criteria"]["suff-cond"] = to_json(suff_condition(*mu, *alpha, {}, opts)); });

    const std::optional<double> vscale = cfg.scale ? cfg.scale : scale;
    r["verification"]["scale"] = vscale ? json(*vscale) : json(nullptr);
    r["verification"]["scale_source"] = cfg.scale ? "config" : (scale ? "criteria" : "none");
    if (vscale) {
        stage("dual", [&] {
            DualCheckOptions d;
            d.trials = cfg.dual_trials;
            d.seed = cfg.seed;
            r["verification"]["dual"] = dual_json(dual_check_strong(*mu, *alpha, *vscale, d));
        });
    } else {
        skipped("dual", "no scale available");
    }
    bool refuted_everywhere = false;
    stage("integrability", [&] {
        if (vscale) {
            r["verification"]["integrability"] = to_json(integrability_check(*mu, *alpha, *vscale));
        } else {
            json scan = json::array();
            refuted_everywhere = !cfg.scan_scales.empty();
            for (double a : cfg.scan_scales) {
                const Verdict v = integrability_check(*mu, *alpha, a);
                refuted_everywhere = refuted_everywhere && v.fails();
                scan.push_back({{"scale", a}, {"verdict", to_json(v)}});
            }
            r["verification"]["integrability_scan"] = scan;
        }
    });
    if (vscale) {
        stage("concentration", [&] {
            json tables = json::array();
            const double m = mu->median();
            for (int n : cfg.dims) {
                const ConcentrationTable t = concentration_mc(*mu, *alpha, *vscale, {m, kInf}, n,
                                                              cfg.r_grid, cfg.samples, cfg.seed);
                tables.push_back(concentration_json(t));
            }
            r["verification"]["concentration"] = tables;
        });
    } else {
        skipped("concentration", "no scale available");
    }

    if (scale) {
        const bool dual_ok = !r["verification"].contains("dual") ||
                             r["verification"]["dual"]["status"] == "no_violation";
        r["overall"] = dual_ok ? "strong TCI holds (sufficient scale found)" : "inconclusive";
    } else if ((lip_decision && lip_decision->fails()) || refuted_everywhere) {
        r["overall"] = "no strong TCI found";
    } else {
        r["overall"] = "inconclusive";
    }
    return out;
}

namespace {

std::string escape_key(const std::string& k) {
    std::string o;
    for (char c : k) {
        switch (c) {
            case '%': o += "%25"; break;
            case '.': o += "%2E"; break;
            case '=': o += "%3D"; break;
            case '[': o += "%5B"; break;
            case '\n': o += "%0A"; break;
            default: o += c;
        }
    }
    return o;
}

std::string unescape_key(const std::string& k) {
    std::string o;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] == '%' && i + 2 < k.size()) {
            o += static_cast<char>(std::stoi(k.substr(i + 1, 2), nullptr, 16));
            i += 2;
        } else {
            o += k[i];
        }
    }
    return o;
}

void flatten(const json& j, const std::string& path, std::ostringstream& os) {
    if (j.is_object() && !j.empty()) {
        for (const auto& [k, v] : j.items()) {
            flatten(v, path.empty() ? escape_key(k) : path + "." + escape_key(k), os);
        }
    } else if (j.is_array() && !j.empty()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", os);
    } else {
        os << path << "=" << j.dump() << "\n";
    }
}

}  // namespace

std::string report_to_text(const nlohmann::json& body) {
    std::ostringstream os;
    flatten(body, "", os);
    return os.str();
}

nlohmann::json report_from_text(const std::string& text) {
    json root = json::object();
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad report line: " + line);
        const std::string path = line.substr(0, eq);
        json value = json::parse(line.substr(eq + 1));
        json* cur = &root;
        std::size_t i = 0;
        while (i < path.size()) {
            if (path[i] == '[') {
                const auto close = path.find(']', i);
                const std::size_t idx = std::stoul(path.substr(i + 1, close - i - 1));
                if (!cur->is_array()) *cur = json::array();
                while (cur->size() <= idx) cur->push_back(nullptr);
                cur = &(*cur)[idx];
                i = close + 1;
            } else {
                if (path[i] == '.') ++i;
                std::size_t e = i;
                while (e < path.size() && path[e] != '.' && path[e] != '[') ++e;
                const std::string key = unescape_key(path.substr(i, e - i));
                if (!cur->is_object()) *cur = json::object();
                cur = &(*cur)[key];
                i = e;
            }
        }
        *cur = std::move(value);
    }
    return root;
}

std::string concentration_csv(const nlohmann::json& table) {
    std::ostringstream os;
    os.precision(17);
    os << "r,empirical,lower_ci,bound\n";
    for (const auto& row : table.at("rows")) {
        os << row.at("r").get<double>() << "," << row.at("empirical").get<double>() << ","
           << row.at("lower_ci").get<double>() << "," << row.at("bound").get<double>() << "\n";
    }
    return os.str();
}

std::string moduli_csv(const nlohmann::json& m) {
    std::ostringstream os;
    os.precision(17);
    os << "h,omega,delta,omega_plus,omega_minus,omega_lower\n";
    const auto& h = m.at("h");
    for (std::size_t i = 0; i < h.size(); ++i) {
        os << decode_real(h[i]);
        for (const char* k : {"omega", "delta", "omega_plus", "omega_minus", "omega_lower"}) {
            os << "," << decode_real(m.at(k)[i]);
        }
        os << "\n";
    }
    return os.str();
}

std::vector<std::string> emit_report(const AnalysisReport& report, ReportFormat format,
                                     const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::vector<std::string> written;
    auto write = [&](const std::string& name, const std::string& content) {
        const std::string path = (fs::path(out_dir) / name).string();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << content;
        if (!f) throw std::runtime_error("cannot write " + path);
        written.push_back(path);
    };
    switch (format) {
        case ReportFormat::json: write("report.json", report.body.dump(2) + "\n"); break;
        case ReportFormat::text: write("report.txt", report_to_text(report.body)); break;
        case ReportFormat::csv_curves: {
            const json& v = report.body.at("verification");
            if (v.contains("concentration")) {
                for (const auto& t : v.at("concentration")) {
                    write("concentration_n" + std::to_string(t.at("n").get<int>()) + ".csv",
                          concentration_csv(t));
                }
            }
            const json& m = report.body.at("moduli");
            if (m.contains("h")) write("moduli.csv", moduli_csv(m));
            break;
        }
    }
    return written;
}

}  // namespace tcilab
