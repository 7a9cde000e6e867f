#include "scenario.hpp"

#include "shuntlab/delay_stability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace shuntlab::cli {

const std::vector<std::string>& analysis_names() {
    static const std::vector<std::string> names{"tune",     "margins",  "rootlocus", "critical",
                                                "frf",      "simulate", "stabilize", "reproduce"};
    return names;
}

std::vector<double> GridSpec::values() const { return log ? logspace(min, max, points) : linspace(min, max, points); }

std::vector<double> KcGridSpec::values() const { return log ? logspace(min, max, points) : linspace(min, max, points); }

SweepConfig SweepSpec::to_config(const PiezoModel& model) const {
    const double f_sc = model.omega_sc() / (2.0 * std::numbers::pi);
    SweepConfig s;
    s.f_start = start * f_sc;
    s.f_end = end * f_sc;
    s.duration = periods / f_sc;
    s.amplitude = amplitude;
    s.law = law;
    return s;
}

SimOptions SimulationSpec::options(const PiezoModel& model, double tau) const {
    SimOptions o;
    o.substeps = substeps > 0 ? substeps : std::max(10, static_cast<int>(std::ceil(32.0 * tau * model.omega_sc())));
    o.divergence_factor = divergence_factor;
    o.tail_periods = tail_periods;
    return o;
}

namespace {

/// One JSON object whose keys must all be consumed before finish().
class Section {
public:
    Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const Json& raw(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) throw ConfigError(path_ + ": missing required key '" + key + "'");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const Json& v = raw(key);
        if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(where(key) + ": must be finite");
        return d;
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : mark(key, fallback); }

    double positive(const std::string& key) {
        const double d = number(key);
        if (!(d > 0.0)) throw ConfigError(where(key) + ": must be positive");
        return d;
    }
    double positive(const std::string& key, double fallback) { return has(key) ? positive(key) : mark(key, fallback); }

    long long integer(const std::string& key, long long fallback, long long lo) {
        if (!has(key)) return mark(key, fallback);
        const Json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        const auto n = v.get<long long>();
        if (n < lo) throw ConfigError(where(key) + ": must be at least " + std::to_string(lo));
        return n;
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return mark(key, fallback);
        const Json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::string text(const std::string& key) {
        const Json& v = raw(key);
        if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) {
        return has(key) ? text(key) : mark(key, fallback);
    }

    std::string choice(const std::string& key, const std::vector<std::string>& options, const std::string& fallback) {
        const std::string v = text(key, fallback);
        if (std::find(options.begin(), options.end(), v) == options.end()) {
            std::string list;
            for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
            throw ConfigError(where(key) + ": '" + v + "' is not one of " + list);
        }
        return v;
    }

    Section child(const std::string& key) { return Section(raw(key), where(key)); }

    std::string where(const std::string& key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!used_.contains(key)) throw ConfigError(path_ + ": unknown key '" + key + "'");
    }

private:
    template <typename T>
    T mark(const std::string& key, T v) {
        used_.insert(key);
        return v;
    }

    const Json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void parse_model(Section s, Scenario& sc) {
    const std::string type =
        s.choice("type", {"frequencies_hz", "modal", "coupling", "physical", "normalized"}, "frequencies_hz");
    Json& d = sc.model_description;
    d["type"] = type;
    try {
        if (type == "frequencies_hz") {
            const double f_sc = s.positive("f_sc");
            const double f_oc = s.positive("f_oc");
            const double cp = s.positive("cp_eps");
            sc.model = PiezoModel::from_frequencies_hz(f_sc, f_oc, cp);
        } else if (type == "modal") {
            const double w_sc = s.positive("omega_sc");
            const double w_oc = s.positive("omega_oc");
            const double cp = s.positive("cp_eps");
            sc.model = PiezoModel::from_modal(w_sc, w_oc, cp);
        } else if (type == "coupling") {
            const double w_sc = s.positive("omega_sc");
            const double kc = s.number("kc");
            const double cp = s.positive("cp_eps");
            sc.model = PiezoModel::from_coupling(w_sc, kc, cp);
        } else if (type == "physical") {
            const double mass = s.positive("mass");
            const double k_oc = s.positive("k_oc");
            const double theta = s.number("theta_p");
            const double cp = s.positive("cp_eps");
            sc.model = PiezoModel::from_physical(mass, k_oc, theta, cp);
        } else {
            sc.model = PiezoModel::normalized(s.number("kc"));
        }
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    s.finish();
}

void parse_tuning(Section s, Scenario& sc) {
    const std::string type = s.choice("type", {"optimal", "linearized", "explicit"}, "optimal");
    if (type == "optimal") {
        sc.tuning = TuningKind::Optimal;
    } else if (type == "linearized") {
        sc.tuning = TuningKind::Linearized;
    } else {
        sc.tuning = TuningKind::Explicit;
        sc.inductance = s.positive("inductance");
        sc.resistance = s.number("resistance");
        if (sc.resistance < 0.0) throw ConfigError(s.where("resistance") + ": must be nonnegative");
    }
    s.finish();
}

void parse_delay(Section s, Scenario& sc) {
    const std::string variant = s.choice("variant", {"zoh", "pure", "none"}, "zoh");
    sc.variant = variant == "zoh" ? DelayModel::Kind::Zoh
                 : variant == "pure" ? DelayModel::Kind::PureDelay
                                     : DelayModel::Kind::None;
    const std::string unit = s.choice("unit", {"s", "normalized", "critical"}, "s");
    sc.tau_unit = unit == "s" ? TauUnit::Seconds : unit == "normalized" ? TauUnit::Normalized : TauUnit::Critical;
    if (s.has("tau") && s.has("taus")) throw ConfigError("delay: give either 'tau' or 'taus', not both");
    if (s.has("tau")) {
        sc.taus = {s.number("tau")};
    } else if (s.has("taus")) {
        const Json& list = s.raw("taus");
        if (!list.is_array() || list.empty()) throw ConfigError("delay.taus: expected a non-empty array");
        for (const Json& v : list) {
            if (!v.is_number() || !std::isfinite(v.get<double>()))
                throw ConfigError("delay.taus: expected finite numbers");
            sc.taus.push_back(v.get<double>());
        }
    }
    for (double t : sc.taus)
        if (t < 0.0) throw ConfigError("delay: tau values must be nonnegative");
    s.finish();
}

GridSpec parse_grid(Section s) {
    GridSpec g;
    g.min = s.positive("omega_min", g.min);
    g.max = s.positive("omega_max", g.max);
    g.points = static_cast<std::size_t>(s.integer("points", static_cast<long long>(g.points), 2));
    g.log = s.choice("spacing", {"linear", "log"}, "linear") == "log";
    if (!(g.max > g.min)) throw ConfigError("grid: omega_max must exceed omega_min");
    s.finish();
    return g;
}

KcGridSpec parse_kc_grid(Section s) {
    KcGridSpec g;
    g.min = s.positive("min", g.min);
    g.max = s.positive("max", g.max);
    g.points = static_cast<std::size_t>(s.integer("points", static_cast<long long>(g.points), 2));
    g.log = s.choice("spacing", {"linear", "log"}, "log") == "log";
    if (!(g.max > g.min)) throw ConfigError("kc_grid: max must exceed min");
    s.finish();
    return g;
}

}  // namespace

PinnedFactor parse_pin(const std::string& text) {
    if (text.size() < 2 || (text[0] != 'a' && text[0] != 'b') ||
        !std::all_of(text.begin() + 1, text.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw ConfigError("stabilization.pin: expected 'b<k>' or 'a<k>', got '" + text + "'");
    PinnedFactor p;
    p.side = text[0] == 'b' ? PinnedFactor::Side::Numerator : PinnedFactor::Side::Denominator;
    p.index = static_cast<std::size_t>(std::stoul(text.substr(1)));
    return p;
}

Scenario parse_scenario(const Json& doc) {
    Section root(doc, "scenario");
    Scenario sc;
    const Json& version = root.raw("schema_version");
    if (!version.is_number_integer() || version.get<long long>() != kSchemaVersion)
        throw ConfigError("scenario.schema_version: unsupported version " + version.dump() + " (expected " +
                          std::to_string(kSchemaVersion) + ")");

    if (root.has("analysis")) sc.analysis = root.choice("analysis", analysis_names(), "");
    if (root.has("model")) parse_model(root.child("model"), sc);
    if (root.has("tuning")) parse_tuning(root.child("tuning"), sc);
    if (root.has("delay")) parse_delay(root.child("delay"), sc);
    if (root.has("grid")) sc.grid = parse_grid(root.child("grid"));
    if (root.has("kc_grid")) sc.kc_grid = parse_kc_grid(root.child("kc_grid"));

    if (root.has("locus")) {
        Section s = root.child("locus");
        if (s.has("tau_max")) sc.locus_tau_max = s.positive("tau_max");
        if (s.has("dtau")) sc.locus_dtau = s.positive("dtau");
        s.finish();
    }
    if (root.has("sweep")) {
        Section s = root.child("sweep");
        sc.sweep.start = s.positive("start", sc.sweep.start);
        sc.sweep.end = s.positive("end", sc.sweep.end);
        sc.sweep.periods = s.positive("periods", sc.sweep.periods);
        sc.sweep.amplitude = s.number("amplitude", sc.sweep.amplitude);
        sc.sweep.law = s.choice("law", {"linear", "log"}, "linear") == "log" ? SweepConfig::Law::Logarithmic
                                                                             : SweepConfig::Law::Linear;
        s.finish();
    }
    if (root.has("simulation")) {
        Section s = root.child("simulation");
        sc.simulation.substeps = static_cast<int>(s.integer("substeps", 0, 0));
        if (sc.simulation.substeps != 0 && sc.simulation.substeps < 10)
            throw ConfigError("simulation.substeps: must be 0 (auto) or at least 10");
        sc.simulation.divergence_factor = s.positive("divergence_factor", sc.simulation.divergence_factor);
        sc.simulation.tail_periods = s.number("tail_periods", sc.simulation.tail_periods);
        sc.simulation.write_time_series = s.boolean("write_time_series", false);
        s.finish();
    }
    if (root.has("stabilization")) {
        Section s = root.child("stabilization");
        sc.pin = parse_pin(s.text("pin", "b0"));
        s.finish();
    }
    if (root.has("margins")) {
        Section s = root.child("margins");
        sc.margins.band_low = s.positive("band_low", sc.margins.band_low);
        sc.margins.band_high = s.positive("band_high", sc.margins.band_high);
        sc.margins.points = static_cast<std::size_t>(s.integer("points", static_cast<long long>(sc.margins.points), 2));
        if (!(sc.margins.band_high > sc.margins.band_low))
            throw ConfigError("margins: band_high must exceed band_low");
        s.finish();
    }
    if (root.has("output")) {
        Section s = root.child("output");
        sc.out_dir = s.text("dir", sc.out_dir.string());
        sc.plot_scripts = s.boolean("plot_scripts", false);
        s.finish();
    }
    root.finish();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read scenario file " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    Scenario sc = parse_scenario(doc);
    return sc;
}

void ensure_writable_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw ConfigError("output directory " + dir.string() + " cannot be created");
    const auto probe = dir / ".shuntlab_write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw ConfigError("output directory " + dir.string() + " is not writable");
    }
    std::filesystem::remove(probe, ec);
}

const PiezoModel& Scenario::require_model() const {
    if (!model) throw ConfigError("scenario: this analysis needs a 'model' section");
    return *model;
}

ShuntParams Scenario::shunt() const {
    const PiezoModel& m = require_model();
    try {
        switch (tuning) {
            case TuningKind::Optimal: return tune_series_rl(m);
            case TuningKind::Linearized: return tune_series_rl_linearized(m);
            case TuningKind::Explicit: return make_shunt(m, inductance, resistance);
        }
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("tuning: ") + e.what());
    }
    return {};
}

double Scenario::to_seconds(double value) const {
    const PiezoModel& m = require_model();
    switch (tau_unit) {
        case TauUnit::Seconds: return value;
        case TauUnit::Normalized: return value / m.omega_sc();
        case TauUnit::Critical: {
            const auto crit = critical_delay_numeric(m, shunt(), DelayModel::Kind::Zoh);
            if (!crit.finite) throw ConfigError("delay.unit 'critical': the loop has no finite critical delay");
            return value * crit.tau_c;
        }
    }
    return value;
}

std::vector<double> Scenario::taus_seconds() const {
    std::vector<double> out;
    out.reserve(taus.size());
    for (double t : taus) out.push_back(to_seconds(t));
    return out;
}

}  // namespace shuntlab::cli
