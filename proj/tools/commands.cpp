#include "commands.hpp"

#include "common.hpp"
#include "parallel.hpp"

#include "shuntlab/errors.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace shuntlab::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

Json base_summary(const std::string& command, const Scenario& sc) {
    Json j;
    j["command"] = command;
    j["schema_version"] = kSchemaVersion;
    const PiezoModel& m = sc.require_model();
    Json model = model_json(m);
    if (sc.model_description.contains("type")) model["input"] = sc.model_description["type"];
    j["model"] = std::move(model);
    j["shunt"] = shunt_json(sc.shunt(), tuning_name(sc.tuning));
    return j;
}

void write_summary(const fs::path& out, const Json& summary, std::ostream& log) {
    write_json(out / "summary.json", summary);
    log << "wrote " << (out / "summary.json").string() << "\n";
}

void meta_common(CsvWriter& csv, const std::string& command, const Scenario& sc) {
    const PiezoModel& m = sc.require_model();
    csv.meta("shuntlab", command);
    csv.meta("omega_sc [rad/s]", m.omega_sc());
    csv.meta("kc", m.kc());
    csv.meta("tuning", tuning_name(sc.tuning));
}

void run_tune(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const PiezoModel& m = sc.require_model();
    const ShuntParams shunt = sc.shunt();
    const ShuntParams lin = tune_series_rl_linearized(m);
    const double kc = m.kc();
    const double tau_pass = passivity_loss_delay(m);
    const double ts_unmod = max_sampling_period(kc, m.omega_sc(), false);
    const double ts_mod = max_sampling_period(kc, m.omega_sc(), true);
    const auto series = critical_delay_series(kc, m.omega_sc());

    CsvWriter csv(out / "tune.csv");
    meta_common(csv, "tune", sc);
    csv.header({{"quantity", "-"}, {"value", "SI"}, {"unit", "-"}});
    csv.row({std::string("inductance"), shunt.inductance, std::string("H")});
    csv.row({std::string("resistance"), shunt.resistance, std::string("Ohm")});
    csv.row({std::string("delta"), shunt.delta, std::string("-")});
    csv.row({std::string("zeta"), shunt.zeta, std::string("-")});
    csv.row({std::string("linearized_inductance"), lin.inductance, std::string("H")});
    csv.row({std::string("linearized_resistance"), lin.resistance, std::string("Ohm")});
    csv.row({std::string("passivity_loss_delay"), tau_pass, std::string("s")});
    csv.row({std::string("tau_c_series"), series.tau_c, std::string("s")});
    csv.row({std::string("max_sampling_period"), ts_unmod, std::string("s")});
    csv.row({std::string("max_sampling_period_modified"), ts_mod, std::string("s")});

    Json j = base_summary("tune", sc);
    Json lj;
    lj["inductance"] = lin.inductance;
    lj["resistance"] = lin.resistance;
    j["linearized"] = std::move(lj);
    j["passivity_loss_delay"] = number_or_null(tau_pass);
    j["tau_c_series"] = series.tau_c;
    Json ts;
    ts["unmodified"] = ts_unmod;
    ts["modified"] = ts_mod;
    j["max_sampling_period"] = std::move(ts);
    write_summary(out, j, log);
    log << "L = " << format_number(shunt.inductance) << " H, R = " << format_number(shunt.resistance) << " Ohm\n";
}

void run_margins(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const PiezoModel& m = sc.require_model();
    const RationalTF h = open_loop_tf(m, sc.shunt());
    const MarginReport rep = stability_margins(h, m.omega_sc(), sc.margins);

    const GridSpec grid = sc.grid.value_or(GridSpec{0.5, 2.0, 2000, true});
    const std::vector<double> wn = grid.values();
    std::vector<double> w(wn.size());
    for (std::size_t i = 0; i < wn.size(); ++i) w[i] = wn[i] * m.omega_sc();
    const std::vector<double> phase = unwrapped_phase_deg(h, w);

    CsvWriter csv(out / "bode.csv");
    meta_common(csv, "margins", sc);
    csv.header({{"omega_norm", "-"}, {"omega", "rad/s"}, {"magnitude_db", "dB"}, {"phase_deg", "deg"}});
    for (std::size_t i = 0; i < w.size(); ++i)
        csv.row({wn[i], w[i], 20.0 * std::log10(std::abs(h.at_frequency(w[i]))), phase[i]});

    Json j = base_summary("margins", sc);
    Json cross = Json::array();
    for (std::size_t i = 0; i < rep.gain_crossovers.size(); ++i) {
        Json c;
        c["omega_norm"] = rep.gain_crossovers[i] / m.omega_sc();
        c["phase_deg"] = rep.crossover_phase_deg[i];
        cross.push_back(std::move(c));
    }
    j["gain_crossovers"] = std::move(cross);
    j["phase_margin_deg"] = rep.phase_margin_deg;
    j["gain_margin_infinite"] = rep.gain_margin_infinite;
    j["gain_margin_db"] = rep.gain_margin_infinite ? Json(nullptr) : Json(rep.gain_margin_db);
    const double wc = rep.gain_crossovers.back();
    j["pure_delay_margin"] = 2.0 * rep.phase_margin_deg * kPi / 180.0 / wc;
    write_summary(out, j, log);

    if (sc.plot_scripts)
        write_text(out / "bode.gp", gnuplot_script({{"open-loop magnitude", "bode.csv", "omega/omega_sc", "dB", grid.log,
                                                     false, {{"1:3", "|H|"}}},
                                                    {"open-loop phase", "bode.csv", "omega/omega_sc", "deg", grid.log,
                                                     false, {{"1:4", "arg H"}}}}));
    log << "phase margin " << format_number(rep.phase_margin_deg) << " deg\n";
}

void run_rootlocus(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const PiezoModel& m = sc.require_model();
    if (sc.variant == DelayModel::Kind::None) throw ConfigError("rootlocus: delay.variant must be zoh or pure");
    const double w = m.omega_sc();
    const double tau_max = sc.locus_tau_max ? sc.to_seconds(*sc.locus_tau_max) : kPi / w;
    const double dtau = sc.locus_dtau ? sc.to_seconds(*sc.locus_dtau) : tau_max / 400.0;
    if (!(dtau > 0.0) || dtau > tau_max) throw ConfigError("locus: dtau must lie in (0, tau_max]");
    const RootLocus locus = root_locus(m, sc.shunt(), sc.variant, tau_max, dtau);

    CsvWriter csv(out / "rootlocus.csv");
    meta_common(csv, "rootlocus", sc);
    csv.meta("variant", variant_name(sc.variant));
    csv.header({{"tau", "s"}, {"tau_norm", "-"}, {"branch", "-"}, {"re_norm", "-"}, {"im_norm", "-"}});
    for (std::size_t i = 0; i < locus.taus.size(); ++i)
        for (std::size_t b = 0; b < locus.poles[i].size(); ++b)
            csv.row({locus.taus[i], locus.taus[i] * w, static_cast<long long>(b), locus.poles[i][b].real() / w,
                     locus.poles[i][b].imag() / w});

    Json j = base_summary("rootlocus", sc);
    j["variant"] = variant_name(sc.variant);
    j["tau_max"] = tau_max;
    j["dtau"] = dtau;
    j["branches"] = locus.poles.empty() ? 0 : locus.poles.front().size();
    if (locus.crossing) {
        Json c;
        c["tau"] = locus.crossing->tau;
        c["tau_norm"] = locus.crossing->tau * w;
        c["omega_norm"] = locus.crossing->omega / w;
        j["crossing"] = std::move(c);
    } else {
        j["crossing"] = nullptr;
    }
    write_summary(out, j, log);

    if (sc.plot_scripts) {
        PlotSpec p{"root locus", "rootlocus.csv", "Re(s)/omega_sc", "Im(s)/omega_sc", false, false, {}, "points pt 7 ps 0.3"};
        p.series.push_back({"4:5", "poles"});
        write_text(out / "rootlocus.gp", gnuplot_script({p}));
    }
}

Json critical_json(const CriticalDelayResult& r, double w, double period) {
    Json c;
    c["method"] = to_string(r.method);
    c["finite"] = r.finite;
    c["tau_c"] = r.finite ? Json(r.tau_c) : Json(nullptr);
    c["tau_c_norm"] = r.finite ? Json(r.tau_c * w) : Json(nullptr);
    c["omega_c_norm"] = r.finite ? Json(r.omega_c / w) : Json(nullptr);
    c["branch_k"] = r.branch_k;
    c["delay_margin_ratio"] = r.finite && r.tau_c > 0.0 ? Json(period / r.tau_c) : Json(nullptr);
    return c;
}

void run_critical(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const PiezoModel& m = sc.require_model();
    const double w = m.omega_sc();
    const ShuntParams shunt = sc.shunt();
    const std::vector<CriticalDelayResult> rows{critical_delay_numeric(m, shunt, DelayModel::Kind::Zoh),
                                                critical_delay_numeric(m, shunt, DelayModel::Kind::PureDelay),
                                                critical_delay_series(m.kc(), w)};

    CsvWriter csv(out / "critical.csv");
    meta_common(csv, "critical", sc);
    csv.header({{"method", "-"},
                {"tau_c", "s"},
                {"tau_c_norm", "-"},
                {"omega_c", "rad/s"},
                {"omega_c_norm", "-"},
                {"branch_k", "-"},
                {"finite", "-"}});
    for (const auto& r : rows)
        csv.row({std::string(to_string(r.method)), r.finite ? r.tau_c : INFINITY, r.finite ? r.tau_c * w : INFINITY,
                 r.omega_c, r.omega_c / w, static_cast<long long>(r.branch_k), static_cast<long long>(r.finite)});

    Json j = base_summary("critical", sc);
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back(critical_json(r, w, kPi / w));
    j["critical_delays"] = std::move(arr);
    Json ts;
    ts["unmodified"] = max_sampling_period(m.kc(), w, false);
    ts["modified"] = max_sampling_period(m.kc(), w, true);
    j["max_sampling_period"] = std::move(ts);

    if (sc.kc_grid) {
        const std::vector<double> kcs = sc.kc_grid->values();
        struct Row {
            double zoh, pure, series;
        };
        const auto table = parallel_map<Row>(kcs.size(), [&](std::size_t i) {
            const PiezoModel mk = PiezoModel::normalized(kcs[i]);
            const ShuntParams s = tune_series_rl(mk);
            return Row{critical_delay_numeric(mk, s, DelayModel::Kind::Zoh).tau_c,
                       critical_delay_numeric(mk, s, DelayModel::Kind::PureDelay).tau_c,
                       critical_delay_series(kcs[i], 1.0).tau_c};
        });
        CsvWriter grid(out / "critical_kc.csv");
        grid.meta("shuntlab", "critical");
        grid.meta("tuning", "optimal");
        grid.header({{"Kc", "-"}, {"tau_c_zoh", "1/omega_sc"}, {"tau_c_pure", "1/omega_sc"}, {"tau_c_series", "1/omega_sc"}});
        for (std::size_t i = 0; i < kcs.size(); ++i) grid.row({kcs[i], table[i].zoh, table[i].pure, table[i].series});
        j["kc_grid_points"] = kcs.size();
    }
    write_summary(out, j, log);
    if (rows[0].finite) log << "tau_c (zoh) = " << format_number(rows[0].tau_c) << " s\n";
}

void run_frf(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const PiezoModel& m = sc.require_model();
    const double w = m.omega_sc();
    const RationalTF y = shunt_admittance(sc.shunt());
    const std::vector<double> grid = sc.grid.value_or(GridSpec{}).values();

    // Curve 0 is the delay-free loop; the others follow the delay list.
    std::vector<double> taus{0.0};
    for (double t : sc.taus_seconds()) taus.push_back(t);
    const auto curves = parallel_map<FrfCurve>(taus.size(), [&](std::size_t i) {
        return closed_loop_frf(m, y, i == 0 ? DelayModel::none() : make_delay(sc.variant, taus[i]), grid);
    });

    CsvWriter csv(out / "frf.csv");
    meta_common(csv, "frf", sc);
    csv.meta("variant", variant_name(sc.variant));
    csv.header({{"curve", "-"},
                {"tau", "s"},
                {"tau_norm", "-"},
                {"omega_norm", "-"},
                {"magnitude", "-"},
                {"magnitude_db", "dB"},
                {"phase_deg", "deg"}});
    for (std::size_t c = 0; c < curves.size(); ++c)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Complex v = curves[c].value[i];
            csv.row({static_cast<long long>(c), taus[c], taus[c] * w, grid[i], std::abs(v), 20.0 * std::log10(std::abs(v)),
                     std::arg(v) * 180.0 / kPi});
        }

    Json j = base_summary("frf", sc);
    j["variant"] = variant_name(sc.variant);
    Json arr = Json::array();
    for (std::size_t c = 0; c < curves.size(); ++c) {
        Json e;
        e["curve"] = c;
        e["tau"] = taus[c];
        e["tau_norm"] = taus[c] * w;
        const auto peaks = find_peaks(curves[c]);
        e["peaks"] = peaks_json(peaks);
        double mx = 0.0;
        for (const Complex& v : curves[c].value) mx = std::max(mx, std::abs(v));
        e["max_amplitude"] = mx;
        e["warnings"] = curves[c].warnings;
        arr.push_back(std::move(e));
    }
    j["curves"] = std::move(arr);
    write_summary(out, j, log);

    if (sc.plot_scripts) {
        PlotSpec p{"closed-loop FRF", "frf.csv", "omega/omega_sc", "|x k_sc / f| (dB)", false, false, {}};
        for (std::size_t c = 0; c < taus.size(); ++c)
            p.series.push_back({using_where(1, static_cast<double>(c), 4, 6), "tau = " + format_number(taus[c]) + " s"});
        write_text(out / "frf.gp", gnuplot_script({p}));
    }
}

struct SimRun {
    SimResult result;
    int substeps = 0;
};

void run_simulate(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const PiezoModel& m = sc.require_model();
    const double w = m.omega_sc();
    const RationalTF y = shunt_admittance(sc.shunt());
    const std::vector<double> taus = sc.taus_seconds();
    if (taus.empty()) throw ConfigError("simulate: delay.tau or delay.taus is required");
    for (double t : taus)
        if (!(t > 0.0)) throw ConfigError("simulate: sampling periods must be positive");
    const SweepConfig sweep = sc.sweep.to_config(m);

    const auto runs = parallel_map<SimRun>(taus.size(), [&](std::size_t i) {
        const SimOptions opts = sc.simulation.options(m, taus[i]);
        return SimRun{simulate_swept_sine(m, tustin_discretize(y, taus[i]), taus[i], sweep, opts), opts.substeps};
    });

    CsvWriter csv(out / "envelope.csv");
    meta_common(csv, "simulate", sc);
    csv.meta("sweep", format_number(sc.sweep.start) + " to " + format_number(sc.sweep.end) + " omega_sc over " +
                          format_number(sc.sweep.periods) + " periods");
    csv.header({{"run", "-"}, {"tau", "s"}, {"tau_norm", "-"}, {"omega_norm", "-"}, {"amplitude", "-"}});
    for (std::size_t r = 0; r < runs.size(); ++r)
        for (const auto& p : runs[r].result.envelope)
            csv.row({static_cast<long long>(r), taus[r], taus[r] * w, p.omega_norm, p.amplitude});

    if (sc.simulation.write_time_series)
        for (std::size_t r = 0; r < runs.size(); ++r) {
            CsvWriter ts(out / ("timeseries_" + std::to_string(r) + ".csv"));
            meta_common(ts, "simulate", sc);
            ts.meta("tau [s]", taus[r]);
            ts.header({{"t", "s"}, {"x", "m"}, {"v_piezo", "V"}, {"i_inject", "A"}});
            const SimResult& s = runs[r].result;
            for (std::size_t i = 0; i < s.t.size(); ++i) ts.row({s.t[i], s.x[i], s.v_piezo[i], s.i_inject[i]});
        }

    Json j = base_summary("simulate", sc);
    Json sw;
    sw["start_norm"] = sc.sweep.start;
    sw["end_norm"] = sc.sweep.end;
    sw["periods"] = sc.sweep.periods;
    sw["amplitude"] = sc.sweep.amplitude;
    sw["law"] = sc.sweep.law == SweepConfig::Law::Linear ? "linear" : "log";
    j["sweep"] = std::move(sw);
    Json arr = Json::array();
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const SimResult& s = runs[r].result;
        Json e;
        e["run"] = r;
        e["tau"] = taus[r];
        e["tau_norm"] = taus[r] * w;
        e["substeps"] = runs[r].substeps;
        e["stable"] = s.stable;
        e["diverged"] = s.diverged;
        e["tail_growth_ratio"] = s.tail_growth_ratio;
        double mx = 0.0;
        std::vector<double> om, amp;
        for (const auto& p : s.envelope) {
            mx = std::max(mx, p.amplitude);
            om.push_back(p.omega_norm);
            amp.push_back(p.amplitude);
        }
        e["envelope_points"] = s.envelope.size();
        e["envelope_max"] = mx;
        e["envelope_peaks"] = om.size() >= 3 ? peaks_json(find_peaks(om, amp)) : Json::array();
        arr.push_back(std::move(e));
        log << "tau = " << format_number(taus[r]) << " s: " << (s.stable ? "stable" : "unstable") << "\n";
    }
    j["runs"] = std::move(arr);
    write_summary(out, j, log);

    if (sc.plot_scripts) {
        PlotSpec p{"simulated envelope", "envelope.csv", "omega/omega_sc", "|x| k_sc / F", false, false, {}};
        for (std::size_t r = 0; r < taus.size(); ++r)
            p.series.push_back({using_where(1, static_cast<double>(r), 4, 5), "tau = " + format_number(taus[r]) + " s"});
        write_text(out / "envelope.gp", gnuplot_script({p}));
    }
}

void run_stabilize(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const PiezoModel& m = sc.require_model();
    const double w = m.omega_sc();
    const RationalTF y = shunt_admittance(sc.shunt());
    const std::vector<double> taus = sc.taus_seconds();
    if (taus.empty()) throw ConfigError("stabilize: delay.tau or delay.taus is required");
    const std::vector<double> grid = sc.grid.value_or(GridSpec{}).values();
    const FrfCurve nominal = closed_loop_frf(m, y, DelayModel::none(), grid);

    struct Result {
        Stabilized st{RationalTF::constant(1.0), {}, {}};
        PlacementCheck check;
        FrfCurve delayed, modified;
    };
    const auto results = parallel_map<Result>(taus.size(), [&](std::size_t i) {
        Result r;
        r.st = stabilize(m, y, taus[i], sc.pin);
        r.check = verify_pole_placement(m, r.st.admittance, taus[i], r.st.target_poles);
        r.delayed = closed_loop_frf(m, y, DelayModel::zoh(taus[i]), grid);
        r.modified = closed_loop_frf(m, r.st.admittance, DelayModel::zoh(taus[i]), grid);
        return r;
    });

    auto factor_name = [](char side, std::size_t k) { return std::string(1, side) + std::to_string(k); };
    {
        CsvWriter csv(out / "factors.csv");
        meta_common(csv, "stabilize", sc);
        csv.meta("pinned", sc.pin.name());
        csv.header({{"tau", "s"}, {"tau_norm", "-"}, {"factor", "-"}, {"delta", "-"}, {"original", "SI"}, {"modified", "SI"}});
        for (std::size_t i = 0; i < taus.size(); ++i) {
            const auto& f = results[i].st.factors;
            const auto& mod = results[i].st.admittance;
            for (std::size_t k = 0; k < f.delta_b.size(); ++k)
                csv.row({taus[i], taus[i] * w, factor_name('b', k), f.delta_b[k], y.num()[k], mod.num()[k]});
            for (std::size_t k = 0; k < f.delta_a.size(); ++k)
                csv.row({taus[i], taus[i] * w, factor_name('a', k), f.delta_a[k], y.den()[k], mod.den()[k]});
        }
    }
    {
        CsvWriter csv(out / "placement.csv");
        meta_common(csv, "stabilize", sc);
        csv.header({{"tau", "s"},
                    {"tau_norm", "-"},
                    {"pole", "-"},
                    {"target_re_norm", "-"},
                    {"target_im_norm", "-"},
                    {"delayed_re_norm", "-"},
                    {"delayed_im_norm", "-"},
                    {"displacement", "-"},
                    {"residual", "-"},
                    {"converged", "-"}});
        for (std::size_t i = 0; i < taus.size(); ++i) {
            const auto& r = results[i];
            for (std::size_t k = 0; k < r.st.target_poles.size(); ++k)
                csv.row({taus[i], taus[i] * w, static_cast<long long>(k), r.st.target_poles[k].real() / w,
                         r.st.target_poles[k].imag() / w, r.check.delayed_poles[k].real() / w,
                         r.check.delayed_poles[k].imag() / w, r.check.displacements[k], r.check.residuals[k],
                         static_cast<long long>(r.check.converged[k])});
        }
    }
    {
        CsvWriter csv(out / "frf_stabilized.csv");
        meta_common(csv, "stabilize", sc);
        csv.header({{"tau", "s"},
                    {"tau_norm", "-"},
                    {"omega_norm", "-"},
                    {"nominal", "-"},
                    {"delayed", "-"},
                    {"modified", "-"}});
        for (std::size_t i = 0; i < taus.size(); ++i)
            for (std::size_t g = 0; g < grid.size(); ++g)
                csv.row({taus[i], taus[i] * w, grid[g], std::abs(nominal.value[g]), std::abs(results[i].delayed.value[g]),
                         std::abs(results[i].modified.value[g])});
    }

    auto max_abs = [](const FrfCurve& c) {
        double mx = 0.0;
        for (const Complex& v : c.value) mx = std::max(mx, std::abs(v));
        return mx;
    };
    const double nominal_max = max_abs(nominal);
    const auto crit = critical_delay_numeric(m, y, DelayModel::Kind::Zoh);

    Json j = base_summary("stabilize", sc);
    j["pinned"] = sc.pin.name();
    j["nominal_max_amplitude"] = nominal_max;
    j["tau_c_unmodified"] = crit.finite ? Json(crit.tau_c) : Json(nullptr);
    Json arr = Json::array();
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const auto& r = results[i];
        Json e;
        e["tau"] = taus[i];
        e["tau_norm"] = taus[i] * w;
        Json fj;
        for (std::size_t k = 0; k < r.st.factors.delta_b.size(); ++k) fj[factor_name('b', k)] = r.st.factors.delta_b[k];
        for (std::size_t k = 0; k < r.st.factors.delta_a.size(); ++k) fj[factor_name('a', k)] = r.st.factors.delta_a[k];
        e["factors"] = std::move(fj);
        e["residual_norm"] = r.st.factors.residual_norm;
        e["rank_deficient"] = r.st.factors.rank_deficient;
        e["sign_flips"] = r.st.factors.sign_flips;
        double dmax = 0.0;
        for (double d : r.check.displacements) dmax = std::max(dmax, d);
        e["max_pole_displacement"] = dmax;
        e["modified_stable"] = r.check.all_stable;
        e["unmodified_stable"] = crit.finite ? Json(taus[i] < crit.tau_c) : Json(true);
        e["modified_peak_change"] = max_abs(r.modified) / nominal_max - 1.0;
        e["unmodified_peak_change"] = max_abs(r.delayed) / nominal_max - 1.0;
        arr.push_back(std::move(e));
        log << "tau = " << format_number(taus[i]) << " s: pole displacement " << format_number(dmax) << "\n";
    }
    j["delays"] = std::move(arr);
    write_summary(out, j, log);

    if (sc.plot_scripts) {
        std::vector<PlotSpec> plots;
        for (std::size_t i = 0; i < taus.size(); ++i) {
            PlotSpec p{"tau = " + format_number(taus[i]) + " s", "frf_stabilized.csv", "omega/omega_sc", "|x k_sc / f|",
                       false, false, {}};
            p.series.push_back({using_where(1, taus[i], 3, 4), "nominal"});
            p.series.push_back({using_where(1, taus[i], 3, 5), "delayed"});
            p.series.push_back({using_where(1, taus[i], 3, 6), "modified"});
            plots.push_back(std::move(p));
        }
        write_text(out / "frf_stabilized.gp", gnuplot_script(plots));
    }
}

}  // namespace

void run_analysis(const std::string& command, const Scenario& sc, const fs::path& out, std::ostream& log) {
    if (command == "tune") return run_tune(sc, out, log);
    if (command == "margins") return run_margins(sc, out, log);
    if (command == "rootlocus") return run_rootlocus(sc, out, log);
    if (command == "critical") return run_critical(sc, out, log);
    if (command == "frf") return run_frf(sc, out, log);
    if (command == "simulate") return run_simulate(sc, out, log);
    if (command == "stabilize") return run_stabilize(sc, out, log);
    throw ConfigError("unknown command '" + command + "'");
}

int run(const RunRequest& request, std::ostream& log, std::ostream& err) {
    try {
        const auto& names = analysis_names();
        if (std::find(names.begin(), names.end(), request.command) == names.end())
            throw ConfigError("unknown command '" + request.command + "'");
        const bool reproduce = request.command == "reproduce";
        if (!reproduce && !request.config) throw ConfigError(request.command + ": --config is required");
        if (reproduce && !request.figure) throw ConfigError("reproduce: --figure is required");

        Scenario sc;
        if (request.config) sc = load_scenario(*request.config);
        if (sc.analysis && *sc.analysis != request.command)
            throw ConfigError("scenario requests '" + *sc.analysis + "' but the command is '" + request.command + "'");
        if (request.out) sc.out_dir = *request.out;
        if (request.plot_scripts) sc.plot_scripts = true;
        ensure_writable_dir(sc.out_dir);

        if (reproduce)
            reproduce_figure(*request.figure, sc, sc.out_dir, log);
        else
            run_analysis(request.command, sc, sc.out_dir, log);
        return kOk;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const Json::exception& e) {
        err << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::domain_error& e) {
        err << "domain error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace shuntlab::cli
