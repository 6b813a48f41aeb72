#include "tcilab/verdict.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tcilab {

const char* to_string(Status s) {
    switch (s) {
        case Status::holds: return "holds";
        case Status::fails: return "fails";
        case Status::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Status status_from_string(const std::string& s) {
    if (s == "holds") return Status::holds;
    if (s == "fails") return Status::fails;
    if (s == "inconclusive") return Status::inconclusive;
    throw std::invalid_argument("unknown status '" + s + "'");
}

double Verdict::at(const std::string& key) const {
    auto it = witness.find(key);
    if (it == witness.end()) throw std::out_of_range("verdict has no witness '" + key + "'");
    return it->second;
}

Verdict Verdict::holding(std::map<std::string, double> witness, std::string diagnostics) {
    for (const auto& [k, v] : witness) {
        if (!std::isfinite(v) || !(v > 0.0)) {
            throw std::logic_error("holding verdict with non-positive witness " + k);
        }
    }
    return {Status::holds, std::move(witness), std::move(diagnostics), nlohmann::json::object()};
}

Verdict Verdict::failing(std::string diagnostics, std::map<std::string, double> witness) {
    return {Status::fails, std::move(witness), std::move(diagnostics), nlohmann::json::object()};
}

Verdict Verdict::unknown(std::string diagnostics, std::map<std::string, double> witness) {
    return {Status::inconclusive, std::move(witness), std::move(diagnostics),
            nlohmann::json::object()};
}

nlohmann::json encode_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double decode_real(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw std::invalid_argument("not a real: " + j.dump());
}

nlohmann::json to_json(const Verdict& v) {
    nlohmann::json w = nlohmann::json::object();
    for (const auto& [k, x] : v.witness) w[k] = encode_real(x);
    return {{"status", to_string(v.status)},
            {"witness", w},
            {"diagnostics", v.diagnostics},
            {"details", v.details}};
}

Verdict verdict_from_json(const nlohmann::json& j) {
    Verdict v;
    v.status = status_from_string(j.at("status").get<std::string>());
    for (const auto& [k, x] : j.at("witness").items()) v.witness[k] = decode_real(x);
    v.diagnostics = j.value("diagnostics", "");
    v.details = j.value("details", nlohmann::json::object());
    return v;
}

}  // namespace tcilab
