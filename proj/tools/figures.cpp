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
const std::vector<double> kPairKc{0.01, 0.1};

Json figure_summary(int figure) {
    Json j;
    j["command"] = "reproduce";
    j["schema_version"] = kSchemaVersion;
    j["figure"] = figure;
    return j;
}

void finish(const fs::path& out, int figure, const Json& summary, const Scenario& sc,
            const std::vector<PlotSpec>& plots, std::ostream& log) {
    write_json(out / "summary.json", summary);
    if (sc.plot_scripts) write_text(out / ("fig" + std::to_string(figure) + ".gp"), gnuplot_script(plots));
    log << "wrote figure " << figure << " data to " << out.string() << "\n";
}

std::string csv_name(int figure, const std::string& suffix = "") {
    return "fig" + std::to_string(figure) + suffix + ".csv";
}

CsvWriter open_csv(const fs::path& out, int figure, const std::string& suffix = "") {
    CsvWriter csv(out / csv_name(figure, suffix));
    csv.meta("shuntlab", "reproduce");
    csv.meta("figure", std::to_string(figure) + suffix);
    return csv;
}

double curve_max(const FrfCurve& c) {
    double mx = 0.0;
    for (const Complex& v : c.value) mx = std::max(mx, std::abs(v));
    return mx;
}

// Unity-gain controller sampled every tau: held output and its average over a
// window of one sampling period centred on t.
void figure3(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const double tau = 0.1;  // s, ten samples per input period
    const double freq = 1.0; // Hz
    DiscreteTF ctrl = tustin_discretize(RationalTF::constant(1.0), tau);
    const int samples = 20;
    std::vector<double> held(samples);
    for (int k = 0; k < samples; ++k) held[k] = ctrl.step(std::sin(2.0 * kPi * freq * k * tau));

    auto output = [&](double t) {
        const auto k = static_cast<int>(std::floor(t / tau + 1e-12));
        return k < 0 ? 0.0 : held[static_cast<std::size_t>(std::min(k, samples - 1))];
    };
    // Integral of the staircase from 0; the average is centred on t.
    auto integral = [&](double t) {
        if (t <= 0.0) return 0.0;
        const auto k = static_cast<int>(std::floor(t / tau + 1e-12));
        double sum = 0.0;
        for (int i = 0; i < std::min(k, samples); ++i) sum += held[static_cast<std::size_t>(i)] * tau;
        return sum + output(t) * (t - k * tau);
    };
    auto average = [&](double t) { return (integral(t + tau / 2.0) - integral(t - tau / 2.0)) / tau; };

    CsvWriter csv = open_csv(out, 3);
    csv.meta("tau [s]", tau);
    csv.meta("input frequency [Hz]", freq);
    csv.header({{"t", "s"}, {"input", "-"}, {"output", "-"}, {"output_average", "-"}, {"input_delayed_half_tau", "-"}});
    const std::vector<double> t = linspace(0.0, (samples - 1) * tau, 1901);
    double dev = 0.0;
    for (double ti : t) {
        const double avg = average(ti);
        const double delayed = std::sin(2.0 * kPi * freq * (ti - tau / 2.0));
        csv.row({ti, std::sin(2.0 * kPi * freq * ti), output(ti), avg, delayed});
        if (ti >= tau && ti <= (samples - 1.5) * tau) dev = std::max(dev, std::abs(avg - delayed));
    }

    Json j = figure_summary(3);
    j["tau"] = tau;
    j["input_frequency_hz"] = freq;
    j["max_average_vs_half_tau_delay"] = dev;
    PlotSpec p{"unity gain through sampler and hold", csv_name(3), "t (s)", "signal", false, false, {}};
    p.series = {{"1:2", "input"}, {"1:3", "output"}, {"1:4", "running average"}};
    finish(out, 3, j, sc, {p}, log);
}

// Blocks of the delayed loop at K_c = 0.05: dynamic capacitance, shunt
// admittance and ZOH multiplier.
void figure4(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const double kc = 0.05;
    const double tau = 0.1;
    const PiezoModel m = PiezoModel::normalized(kc);
    const RationalTF cap = dynamic_capacitance(m);
    const RationalTF y = shunt_admittance(tune_series_rl(m));
    const RationalTF h = open_loop_tf(m, y);
    const std::vector<double> grid = sc.grid.value_or(GridSpec{0.5, 2.0, 2000, true}).values();

    CsvWriter csv = open_csv(out, 4);
    csv.meta("Kc", kc);
    csv.meta("tau_norm", tau);
    csv.header({{"omega_norm", "-"},
                {"capacitance_mag", "C_p"},
                {"capacitance_phase", "deg"},
                {"admittance_mag", "C_p omega_sc"},
                {"admittance_phase", "deg"},
                {"zoh_mag", "-"},
                {"zoh_phase", "deg"},
                {"open_loop_mag_db", "dB"}});
    for (double w : grid) {
        const Complex c = cap.at_frequency(w);
        const Complex a = y.at_frequency(w);
        const Complex z = zoh_response(tau, Complex(0.0, w));
        csv.row({w, std::abs(c), std::arg(c) * 180.0 / kPi, std::abs(a), std::arg(a) * 180.0 / kPi, std::abs(z),
                 std::arg(z) * 180.0 / kPi, 20.0 * std::log10(std::abs(h.at_frequency(w)))});
    }
    Json j = figure_summary(4);
    j["kc"] = kc;
    j["tau_norm"] = tau;
    PlotSpec p{"loop blocks", csv_name(4), "omega/omega_sc", "magnitude", true, true, {}};
    p.series = {{"1:2", "dynamic capacitance"}, {"1:4", "admittance"}, {"1:6", "ZOH"}};
    finish(out, 4, j, sc, {p}, log);
}

void figure5(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const std::vector<double> bode_kc{0.01, 0.05, 0.1, 0.2};
    const std::vector<double> grid = sc.grid.value_or(GridSpec{0.8, 1.2, 2000, false}).values();

    CsvWriter a = open_csv(out, 5, "a");
    a.meta("tuning", "optimal");
    a.header({{"Kc", "-"}, {"omega_norm", "-"}, {"magnitude_db", "dB"}, {"phase_deg", "deg"}});
    Json j = figure_summary(5);
    Json bode = Json::array();
    for (double kc : bode_kc) {
        const PiezoModel m = PiezoModel::normalized(kc);
        const RationalTF h = open_loop_tf(m, tune_series_rl(m));
        const auto phase = unwrapped_phase_deg(h, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            a.row({kc, grid[i], 20.0 * std::log10(std::abs(h.at_frequency(grid[i]))), phase[i]});
        MarginOptions band = sc.margins;
        band.band_low = grid.front();
        band.band_high = grid.back();
        const MarginReport rep = stability_margins(h, 1.0, band);
        Json e;
        e["kc"] = kc;
        e["crossovers_in_band"] = rep.gain_crossovers.size();
        bode.push_back(std::move(e));
    }
    j["bode"] = std::move(bode);

    const KcGridSpec kg = sc.kc_grid.value_or(KcGridSpec{0.01, 0.2, 40, false});
    const std::vector<double> kcs = kg.values();
    const auto reports = parallel_map<MarginReport>(kcs.size(), [&](std::size_t i) {
        const PiezoModel m = PiezoModel::normalized(kcs[i]);
        return stability_margins(open_loop_tf(m, tune_series_rl(m)), 1.0, sc.margins);
    });
    CsvWriter b = open_csv(out, 5, "b");
    b.meta("tuning", "optimal");
    b.header({{"Kc", "-"}, {"phase_margin", "deg"}, {"omega_c_norm", "-"}, {"crossovers", "-"}});
    bool increasing = true;
    for (std::size_t i = 0; i < kcs.size(); ++i) {
        b.row({kcs[i], reports[i].phase_margin_deg, reports[i].gain_crossovers.back(),
               static_cast<long long>(reports[i].gain_crossovers.size())});
        if (i && !(reports[i].phase_margin_deg > reports[i - 1].phase_margin_deg)) increasing = false;
    }
    j["phase_margin_increasing"] = increasing;
    j["phase_margin_first"] = reports.front().phase_margin_deg;
    j["phase_margin_last"] = reports.back().phase_margin_deg;

    std::vector<PlotSpec> plots;
    PlotSpec mag{"open-loop magnitude", csv_name(5, "a"), "omega/omega_sc", "dB", false, false, {}};
    for (double kc : bode_kc) mag.series.push_back({using_where(1, kc, 2, 3), "Kc = " + format_number(kc)});
    plots.push_back(mag);
    PlotSpec pm{"phase margin", csv_name(5, "b"), "Kc", "deg", false, false, {{"1:2", "phase margin"}}};
    plots.push_back(pm);
    finish(out, 5, j, sc, plots, log);
}

// Delayed admittance in the complex plane, rotated clockwise by omega tau / 2.
void figure6(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const double kc = 0.1;
    const std::vector<double> taus{0.0, 0.1, 0.5, 1.0};
    const PiezoModel m = PiezoModel::normalized(kc);
    const RationalTF y = shunt_admittance(tune_series_rl(m));
    const std::vector<double> grid = sc.grid.value_or(GridSpec{}).values();

    CsvWriter csv = open_csv(out, 6);
    csv.meta("Kc", kc);
    csv.header({{"tau_norm", "-"}, {"omega_norm", "-"}, {"re", "C_p omega_sc"}, {"im", "C_p omega_sc"}});
    for (double tau : taus)
        for (double w : grid) {
            const Complex v = delayed_admittance(y, tau, w);
            csv.row({tau, w, v.real(), v.imag()});
        }
    Json j = figure_summary(6);
    j["kc"] = kc;
    j["passivity_loss_delay_norm"] = passivity_loss_delay(m);
    PlotSpec p{"delayed admittance", csv_name(6), "Re Y", "Im Y", false, false, {}};
    for (double tau : taus) p.series.push_back({using_where(1, tau, 3, 4), "tau = " + format_number(tau)});
    finish(out, 6, j, sc, {p}, log);
}

void figure7(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const KcGridSpec kg = sc.kc_grid.value_or(KcGridSpec{});
    const std::vector<double> kcs = kg.values();
    struct Row {
        double zoh, pure, series;
    };
    const auto rows = parallel_map<Row>(kcs.size(), [&](std::size_t i) {
        const PiezoModel m = PiezoModel::normalized(kcs[i]);
        const ShuntParams s = tune_series_rl(m);
        return Row{critical_delay_numeric(m, s, DelayModel::Kind::Zoh).tau_c,
                   critical_delay_numeric(m, s, DelayModel::Kind::PureDelay).tau_c,
                   critical_delay_series(kcs[i], 1.0).tau_c};
    });

    CsvWriter csv = open_csv(out, 7);
    csv.meta("tuning", "optimal");
    csv.header({{"Kc", "-"}, {"tau_c_zoh", "1/omega_sc"}, {"tau_c_pure", "1/omega_sc"}, {"tau_c_series", "1/omega_sc"}});
    double spread = 0.0;
    for (std::size_t i = 0; i < kcs.size(); ++i) {
        csv.row({kcs[i], rows[i].zoh, rows[i].pure, rows[i].series});
        if (kcs[i] <= 0.1) {
            const double lo = std::min({rows[i].zoh, rows[i].pure, rows[i].series});
            const double hi = std::max({rows[i].zoh, rows[i].pure, rows[i].series});
            spread = std::max(spread, hi / lo - 1.0);
        }
    }
    Json j = figure_summary(7);
    j["kc_min"] = kg.min;
    j["kc_max"] = kg.max;
    j["points"] = kcs.size();
    j["max_relative_spread_kc_le_0.1"] = spread;
    PlotSpec p{"critical delay", csv_name(7), "Kc", "tau_c omega_sc", true, true, {}};
    p.series = {{"1:2", "ZOH"}, {"1:3", "pure delay"}, {"1:4", "series"}};
    finish(out, 7, j, sc, {p}, log);
}

void figure8(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const std::vector<double> rel{0.0, 0.01, 0.1, 0.5, 0.8, 1.0};
    const std::vector<double> grid = sc.grid.value_or(GridSpec{}).values();
    CsvWriter csv = open_csv(out, 8);
    csv.meta("tuning", "optimal");
    csv.meta("delay", "zoh; tau_rel = 0 is the delay-free loop");
    csv.header({{"Kc", "-"},
                {"tau_rel", "tau_c"},
                {"tau_norm", "1/omega_sc"},
                {"omega_norm", "-"},
                {"magnitude", "-"},
                {"magnitude_db", "dB"}});
    Json j = figure_summary(8);
    Json arr = Json::array();
    std::vector<PlotSpec> plots;
    for (double kc : kPairKc) {
        const PiezoModel m = PiezoModel::normalized(kc);
        const RationalTF y = shunt_admittance(tune_series_rl(m));
        const double tau_c = critical_delay_numeric(m, y, DelayModel::Kind::Zoh).tau_c;
        const auto curves = parallel_map<FrfCurve>(rel.size(), [&](std::size_t i) {
            return closed_loop_frf(m, y, rel[i] == 0.0 ? DelayModel::none() : DelayModel::zoh(rel[i] * tau_c), grid);
        });
        PlotSpec p{"Kc = " + format_number(kc), csv_name(8), "omega/omega_sc", "|x k_sc / f| (dB)", false, false, {}};
        for (std::size_t i = 0; i < rel.size(); ++i) {
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const double a = std::abs(curves[i].value[g]);
                csv.row({kc, rel[i], rel[i] * tau_c, grid[g], a, 20.0 * std::log10(a)});
            }
            Json e;
            e["kc"] = kc;
            e["tau_rel"] = rel[i];
            e["tau_norm"] = rel[i] * tau_c;
            e["max_amplitude"] = curve_max(curves[i]);
            e["peaks"] = peaks_json(find_peaks(curves[i]));
            arr.push_back(std::move(e));
            p.series.push_back({"(column(1) == " + format_number(kc) + " ? column(4) : NaN):" +
                                    "(column(2) == " + format_number(rel[i]) + " ? column(6) : NaN)",
                                "tau = " + format_number(rel[i]) + " tau_c"});
        }
        plots.push_back(std::move(p));
    }
    j["curves"] = std::move(arr);
    finish(out, 8, j, sc, plots, log);
}

void figure9(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const std::vector<double> markers{0.01, 0.1, 1.0, kPi};
    CsvWriter csv = open_csv(out, 9);
    csv.meta("delay", "zoh");
    csv.header({{"Kc", "-"}, {"tau_norm", "1/omega_sc"}, {"branch", "-"}, {"re_norm", "-"}, {"im_norm", "-"}});
    CsvWriter mk = open_csv(out, 9, "_markers");
    mk.meta("delay", "zoh");
    mk.header({{"Kc", "-"}, {"tau_norm", "1/omega_sc"}, {"branch", "-"}, {"re_norm", "-"}, {"im_norm", "-"}});

    Json j = figure_summary(9);
    Json arr = Json::array();
    const double dtau = sc.locus_dtau.value_or(kPi / 400.0);
    for (double kc : kPairKc) {
        const PiezoModel m = PiezoModel::normalized(kc);
        const ShuntParams s = tune_series_rl(m);
        const RootLocus locus = root_locus(m, s, DelayModel::Kind::Zoh, kPi, dtau);
        for (std::size_t i = 0; i < locus.taus.size(); ++i)
            for (std::size_t b = 0; b < locus.poles[i].size(); ++b)
                csv.row({kc, locus.taus[i], static_cast<long long>(b), locus.poles[i][b].real(), locus.poles[i][b].imag()});

        // Marker delays sit off the sampling grid; each gets its own locus ending there.
        const auto marker_poles = parallel_map<std::vector<Complex>>(markers.size(), [&](std::size_t i) {
            return root_locus(m, s, DelayModel::Kind::Zoh, markers[i], markers[i] / 64.0).poles.back();
        });
        for (std::size_t b = 0; b < locus.poles.front().size(); ++b)
            mk.row({kc, 0.0, static_cast<long long>(b), locus.poles.front()[b].real(), locus.poles.front()[b].imag()});
        for (std::size_t i = 0; i < markers.size(); ++i)
            for (std::size_t b = 0; b < marker_poles[i].size(); ++b)
                mk.row({kc, markers[i], static_cast<long long>(b), marker_poles[i][b].real(), marker_poles[i][b].imag()});

        Json e;
        e["kc"] = kc;
        if (locus.crossing) {
            e["crossing_tau_norm"] = locus.crossing->tau;
            e["crossing_omega_norm"] = locus.crossing->omega;
        } else {
            e["crossing_tau_norm"] = nullptr;
            e["crossing_omega_norm"] = nullptr;
        }
        e["tau_c_zoh_norm"] = critical_delay_numeric(m, s, DelayModel::Kind::Zoh).tau_c;
        arr.push_back(std::move(e));
    }
    j["loci"] = std::move(arr);
    std::vector<PlotSpec> plots;
    for (double kc : kPairKc)
        plots.push_back({"Kc = " + format_number(kc), csv_name(9), "Re(s)/omega_sc", "Im(s)/omega_sc", false, false,
                         {{using_where(1, kc, 4, 5), "locus"}}, "points pt 7 ps 0.3"});
    finish(out, 9, j, sc, plots, log);
}

struct EnvelopeRun {
    double kc = 0.0;
    double tau_label = 0.0;  // value written in the tau column
    double tau_norm = 0.0;
    bool modified = false;
};

void envelope_figure(int figure, const std::vector<EnvelopeRun>& plan, const std::string& tau_column,
                     const Scenario& sc, const fs::path& out, std::ostream& log) {
    struct Outcome {
        SimResult sim;
        int substeps = 0;
        double factor_residual = 0.0;
    };
    const auto outcomes = parallel_map<Outcome>(plan.size(), [&](std::size_t i) {
        const PiezoModel m = PiezoModel::normalized(plan[i].kc);
        RationalTF y = shunt_admittance(tune_series_rl(m));
        Outcome o;
        if (plan[i].modified) {
            const Stabilized st = stabilize(m, y, plan[i].tau_norm, sc.pin);
            y = st.admittance;
            o.factor_residual = st.factors.residual_norm;
        }
        const SimOptions opts = sc.simulation.options(m, plan[i].tau_norm);
        o.substeps = opts.substeps;
        o.sim = simulate_swept_sine(m, tustin_discretize(y, plan[i].tau_norm), plan[i].tau_norm, sc.sweep.to_config(m),
                                    opts);
        return o;
    });

    CsvWriter csv = open_csv(out, figure);
    csv.meta("sweep", format_number(sc.sweep.start) + " to " + format_number(sc.sweep.end) + " omega_sc over " +
                          format_number(sc.sweep.periods) + " periods, amplitude " + format_number(sc.sweep.amplitude));
    csv.meta("admittance", plan.front().modified ? "modified" : "unmodified");
    csv.header({{"Kc", "-"}, {tau_column, tau_column == "tau_rel" ? "tau_c" : "1/omega_sc"}, {"tau_norm", "1/omega_sc"},
                {"omega_norm", "-"}, {"amplitude", "-"}});
    Json j = figure_summary(figure);
    Json arr = Json::array();
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const SimResult& s = outcomes[i].sim;
        double mx = 0.0;
        for (const auto& p : s.envelope) {
            csv.row({plan[i].kc, plan[i].tau_label, plan[i].tau_norm, p.omega_norm, p.amplitude});
            mx = std::max(mx, p.amplitude);
        }
        Json e;
        e["kc"] = plan[i].kc;
        e[tau_column] = plan[i].tau_label;
        e["tau_norm"] = plan[i].tau_norm;
        e["substeps"] = outcomes[i].substeps;
        e["stable"] = s.stable;
        e["diverged"] = s.diverged;
        e["tail_growth_ratio"] = s.tail_growth_ratio;
        e["envelope_max"] = mx;
        if (plan[i].modified) e["factor_residual"] = outcomes[i].factor_residual;
        arr.push_back(std::move(e));
    }
    j["runs"] = std::move(arr);

    std::vector<PlotSpec> plots;
    for (double kc : kPairKc) {
        PlotSpec p{"Kc = " + format_number(kc), csv_name(figure), "omega/omega_sc", "|x| k_sc / F", false, false, {}};
        for (const auto& r : plan)
            if (r.kc == kc)
                p.series.push_back({"(column(1) == " + format_number(kc) + " ? column(4) : NaN):" + "(column(2) == " +
                                        format_number(r.tau_label) + " ? column(5) : NaN)",
                                    tau_column + " = " + format_number(r.tau_label)});
        plots.push_back(std::move(p));
    }
    finish(out, figure, j, sc, plots, log);
}

void figure11(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const std::vector<double> rel{0.01, 0.1, 0.5, 0.8, 1.0, 1.01};
    std::vector<EnvelopeRun> plan;
    for (double kc : kPairKc) {
        const PiezoModel m = PiezoModel::normalized(kc);
        const double tau_c = critical_delay_numeric(m, tune_series_rl(m), DelayModel::Kind::Zoh).tau_c;
        for (double r : rel) plan.push_back({kc, r, r * tau_c, false});
    }
    envelope_figure(11, plan, "tau_rel", sc, out, log);
}

void figure13(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const std::vector<double> taus{0.0, 0.01, 0.1, 0.5, 1.0, kPi};
    const std::vector<double> grid = sc.grid.value_or(GridSpec{}).values();
    CsvWriter csv = open_csv(out, 13);
    csv.meta("tuning", "optimal, modified for the ZOH delay");
    csv.meta("pinned", sc.pin.name());
    csv.meta("delay", "zoh; tau_norm = 0 is the delay-free loop");
    csv.header({{"Kc", "-"}, {"tau_norm", "1/omega_sc"}, {"omega_norm", "-"}, {"magnitude", "-"}, {"magnitude_db", "dB"}});

    Json j = figure_summary(13);
    j["pinned"] = sc.pin.name();
    Json arr = Json::array();
    std::vector<PlotSpec> plots;
    for (double kc : kPairKc) {
        const PiezoModel m = PiezoModel::normalized(kc);
        const RationalTF y = shunt_admittance(tune_series_rl(m));
        struct Curve {
            FrfCurve frf;
            Stabilized st{RationalTF::constant(1.0), {}, {}};
            PlacementCheck check;
        };
        const auto curves = parallel_map<Curve>(taus.size(), [&](std::size_t i) {
            Curve c;
            if (taus[i] == 0.0) {
                c.frf = closed_loop_frf(m, y, DelayModel::none(), grid);
                return c;
            }
            c.st = stabilize(m, y, taus[i], sc.pin);
            c.check = verify_pole_placement(m, c.st.admittance, taus[i], c.st.target_poles);
            c.frf = closed_loop_frf(m, c.st.admittance, DelayModel::zoh(taus[i]), grid);
            return c;
        });
        const double nominal = curve_max(curves[0].frf);
        PlotSpec p{"Kc = " + format_number(kc), csv_name(13), "omega/omega_sc", "|x k_sc / f| (dB)", false, false, {}};
        for (std::size_t i = 0; i < taus.size(); ++i) {
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const double a = std::abs(curves[i].frf.value[g]);
                csv.row({kc, taus[i], grid[g], a, 20.0 * std::log10(a)});
            }
            Json e;
            e["kc"] = kc;
            e["tau_norm"] = taus[i];
            e["max_amplitude"] = curve_max(curves[i].frf);
            e["peak_change"] = curve_max(curves[i].frf) / nominal - 1.0;
            if (taus[i] > 0.0) {
                double dmax = 0.0;
                for (double d : curves[i].check.displacements) dmax = std::max(dmax, d);
                e["max_pole_displacement"] = dmax;
                e["modified_stable"] = curves[i].check.all_stable;
                e["residual_norm"] = curves[i].st.factors.residual_norm;
            }
            arr.push_back(std::move(e));
            p.series.push_back({"(column(1) == " + format_number(kc) + " ? column(3) : NaN):" + "(column(2) == " +
                                    format_number(taus[i]) + " ? column(5) : NaN)",
                                "tau = " + format_number(taus[i]) + " / omega_sc"});
        }
        plots.push_back(std::move(p));
    }
    j["curves"] = std::move(arr);
    finish(out, 13, j, sc, plots, log);
}

void figure14(const Scenario& sc, const fs::path& out, std::ostream& log) {
    const std::vector<double> taus{0.01, 0.1, 0.5, 1.0};
    std::vector<EnvelopeRun> plan;
    for (double kc : kPairKc)
        for (double t : taus) plan.push_back({kc, t, t, true});
    envelope_figure(14, plan, "tau_setting", sc, out, log);
}

}  // namespace

const std::vector<int>& reproducible_figures() {
    static const std::vector<int> figs{3, 4, 5, 6, 7, 8, 9, 11, 13, 14};
    return figs;
}

void reproduce_figure(int figure, const Scenario& sc, const fs::path& out, std::ostream& log) {
    switch (figure) {
        case 3: return figure3(sc, out, log);
        case 4: return figure4(sc, out, log);
        case 5: return figure5(sc, out, log);
        case 6: return figure6(sc, out, log);
        case 7: return figure7(sc, out, log);
        case 8: return figure8(sc, out, log);
        case 9: return figure9(sc, out, log);
        case 11: return figure11(sc, out, log);
        case 13: return figure13(sc, out, log);
        case 14: return figure14(sc, out, log);
        default: break;
    }
    std::string list;
    for (int f : reproducible_figures()) list += (list.empty() ? "" : ", ") + std::to_string(f);
    throw ConfigError("reproduce: no data target for figure " + std::to_string(figure) + " (available: " + list + ")");
}

}  // namespace shuntlab::cli
