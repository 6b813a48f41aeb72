#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace tcilab {

inline constexpr int kReportSchema = 1;
inline constexpr const char* kVersion = "0.1.0";

// Fields missing from a config document keep these defaults. Command line
// flags override the document.
struct AnalysisConfig {
    std::string measure = "exponential";
    std::string cost = "alpha1";
    // Argument scale for the verification stages. Unset means the scale
    // assembled by the criteria.
    std::optional<double> scale;
    double kappa = 36.0;
    std::uint64_t seed = 1;
    std::size_t dual_trials = 2000;
    std::size_t samples = 100000;
    std::vector<int> dims = {1, 4};
    std::vector<double> r_grid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
    // scales tried by the integrability stage when no scale is available
    std::vector<double> scan_scales = {1.0, 0.25, 0.0625, 0.015625, 0.00390625};
    std::string out_dir;

    bool operator==(const AnalysisConfig&) const = default;
};

nlohmann::json config_to_json(const AnalysisConfig& c);
AnalysisConfig config_from_json(const nlohmann::json& j);
AnalysisConfig load_config(const std::string& path);

// FNV-1a of the compact JSON form, as 16 hex digits.
std::string config_hash(const AnalysisConfig& c);

struct AnalysisReport {
    nlohmann::json body;
    bool stage_error = false;
};

AnalysisReport run_analyze(const AnalysisConfig& config);

// Skeleton with every section present and empty.
nlohmann::json empty_report(const AnalysisConfig& config);

enum class ReportFormat { json, text, csv_curves };

// json: report.json; text: report.txt (one path=value line per leaf);
// csv_curves: concentration_n<N>.csv and moduli.csv. Returns the paths
// written.
std::vector<std::string> emit_report(const AnalysisReport& report, ReportFormat format,
                                     const std::string& out_dir);

std::string report_to_text(const nlohmann::json& body);
nlohmann::json report_from_text(const std::string& text);
std::string concentration_csv(const nlohmann::json& table);
std::string moduli_csv(const nlohmann::json& moduli);

}  // namespace tcilab
