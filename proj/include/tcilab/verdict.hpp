#pragma once

#include <map>
#include <string>

#include <json.hpp>

namespace tcilab {

enum class Status { holds, fails, inconclusive };

const char* to_string(Status s);
Status status_from_string(const std::string& s);

// Outcome of a criterion. Witness constants are the named numbers the
// criterion produced (a, b, K+, ...); details carries grids, probe tables and
// anything else needed to replay the decision.
struct Verdict {
    Status status = Status::inconclusive;
    std::map<std::string, double> witness;
    std::string diagnostics;
    nlohmann::json details = nlohmann::json::object();

    bool holds() const { return status == Status::holds; }
    bool fails() const { return status == Status::fails; }
    double at(const std::string& key) const;

    // Builds a holding verdict; throws if a witness is not finite and positive.
    static Verdict holding(std::map<std::string, double> witness, std::string diagnostics = {});
    static Verdict failing(std::string diagnostics, std::map<std::string, double> witness = {});
    static Verdict unknown(std::string diagnostics, std::map<std::string, double> witness = {});
};

// Doubles are written as numbers when finite and as "inf", "-inf" or "nan"
// strings otherwise, so the JSON stays standard.
nlohmann::json encode_real(double x);
double decode_real(const nlohmann::json& j);

nlohmann::json to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);

}  // namespace tcilab
