// Scenario documents: strict JSON parsing into analysis settings.
#pragma once

#include "output.hpp"

#include "shuntlab/freq_analysis.hpp"
#include "shuntlab/simulate.hpp"
#include "shuntlab/stabilization.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shuntlab::cli {

/// Malformed or inconsistent scenario; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

const std::vector<std::string>& analysis_names();

struct GridSpec {
    double min = 0.9;  // omega / omega_sc
    double max = 1.15;
    std::size_t points = 2000;
    bool log = false;

    std::vector<double> values() const;
};

struct KcGridSpec {
    double min = 1e-3;
    double max = 0.3;
    std::size_t points = 40;
    bool log = true;

    std::vector<double> values() const;
};

enum class TuningKind { Optimal, Linearized, Explicit };
enum class TauUnit { Seconds, Normalized, Critical };

struct SweepSpec {
    double start = 0.9;     // omega / omega_sc
    double end = 1.15;
    double periods = 600.0; // sweep duration in periods of omega_sc
    double amplitude = 1.0; // N
    SweepConfig::Law law = SweepConfig::Law::Linear;

    SweepConfig to_config(const PiezoModel& model) const;
};

struct SimulationSpec {
    int substeps = 0;  // 0: max(10, ceil(32 tau omega_sc))
    double divergence_factor = 1e3;
    double tail_periods = -1.0;
    bool write_time_series = false;

    SimOptions options(const PiezoModel& model, double tau) const;
};

struct Scenario {
    int schema_version = kSchemaVersion;
    std::optional<std::string> analysis;

    std::optional<PiezoModel> model;
    Json model_description = Json::object();

    TuningKind tuning = TuningKind::Optimal;
    double inductance = 0.0;
    double resistance = 0.0;

    DelayModel::Kind variant = DelayModel::Kind::Zoh;
    std::vector<double> taus;
    TauUnit tau_unit = TauUnit::Seconds;

    std::optional<GridSpec> grid;
    std::optional<double> locus_tau_max;  // tau_unit
    std::optional<double> locus_dtau;
    SweepSpec sweep;
    SimulationSpec simulation;
    PinnedFactor pin;
    MarginOptions margins;
    std::optional<KcGridSpec> kc_grid;

    std::filesystem::path out_dir = "shuntlab_out";
    bool plot_scripts = false;

    /// Model or ConfigError when the scenario has none.
    const PiezoModel& require_model() const;
    ShuntParams shunt() const;

    /// Delays in seconds; `critical` multiplies the ZOH critical delay of the
    /// tuned shunt.
    std::vector<double> taus_seconds() const;
    double to_seconds(double value) const;
};

Scenario parse_scenario(const Json& doc);
Scenario load_scenario(const std::filesystem::path& path);

/// Creates the directory if needed and checks a file can be written there.
void ensure_writable_dir(const std::filesystem::path& dir);

PinnedFactor parse_pin(const std::string& text);

}  // namespace shuntlab::cli
