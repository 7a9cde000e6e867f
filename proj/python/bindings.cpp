#include "shuntlab/delay_stability.hpp"
#include "shuntlab/errors.hpp"
#include "shuntlab/freq_analysis.hpp"
#include "shuntlab/model.hpp"
#include "shuntlab/simulate.hpp"
#include "shuntlab/stabilization.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace shuntlab;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bindings to the shuntlab C++ core";
    m.attr("__version__") = "0.1.0";
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<RationalTF>(m, "RationalTF")
        .def(py::init<Coeffs, Coeffs>(), py::arg("num"), py::arg("den"),
             "Coefficients in ascending powers of s.")
        .def_property_readonly("num", &RationalTF::num)
        .def_property_readonly("den", &RationalTF::den)
        .def("__call__", &RationalTF::operator(), py::arg("s"))
        .def("at_frequency", &RationalTF::at_frequency, py::arg("omega"));

    py::class_<PiezoModel>(m, "PiezoModel")
        .def_static("from_modal", &PiezoModel::from_modal, py::arg("omega_sc"), py::arg("omega_oc"), py::arg("cp_eps"))
        .def_static("from_coupling", &PiezoModel::from_coupling, py::arg("omega_sc"), py::arg("kc"), py::arg("cp_eps"))
        .def_static("from_frequencies_hz", &PiezoModel::from_frequencies_hz, py::arg("f_sc"), py::arg("f_oc"),
                    py::arg("cp_eps"))
        .def_static("from_physical", &PiezoModel::from_physical, py::arg("mass"), py::arg("k_oc"), py::arg("theta_p"),
                    py::arg("cp_eps"))
        .def_static("normalized", &PiezoModel::normalized, py::arg("kc"))
        .def_property_readonly("omega_sc", &PiezoModel::omega_sc)
        .def_property_readonly("omega_oc", &PiezoModel::omega_oc)
        .def_property_readonly("cp_eps", &PiezoModel::cp_eps)
        .def_property_readonly("kc", &PiezoModel::kc)
        .def_property_readonly("k_sc", &PiezoModel::k_sc)
        .def_property_readonly("mass", [](const PiezoModel& p) { return p.mass(); })
        .def("to_normalized", &PiezoModel::to_normalized)
        .def("rescaled", &PiezoModel::rescaled, py::arg("alpha"), py::arg("beta"));

    py::class_<ShuntParams>(m, "ShuntParams")
        .def_readonly("inductance", &ShuntParams::inductance)
        .def_readonly("resistance", &ShuntParams::resistance)
        .def_readonly("delta", &ShuntParams::delta)
        .def_readonly("zeta", &ShuntParams::zeta)
        .def("__repr__", [](const ShuntParams& s) {
            return "ShuntParams(L=" + std::to_string(s.inductance) + ", R=" + std::to_string(s.resistance) + ")";
        });

    m.def("eemcf", &eemcf, py::arg("omega_sc"), py::arg("omega_oc"));
    m.def("max_tunable_kc", &max_tunable_kc);
    m.def("tune_series_rl", &tune_series_rl, py::arg("model"));
    m.def("tune_series_rl_linearized", &tune_series_rl_linearized, py::arg("model"));
    m.def("make_shunt", &make_shunt, py::arg("model"), py::arg("inductance"), py::arg("resistance"));
    m.def("shunt_admittance", &shunt_admittance, py::arg("shunt"));
    m.def("dynamic_capacitance", &dynamic_capacitance, py::arg("model"));

    py::class_<DelayModel> delay(m, "DelayModel");
    py::enum_<DelayModel::Kind>(delay, "Kind")
        .value("NONE", DelayModel::Kind::None)
        .value("PURE_DELAY", DelayModel::Kind::PureDelay)
        .value("ZOH", DelayModel::Kind::Zoh);
    delay.def_static("none", &DelayModel::none)
        .def_static("pure_delay", &DelayModel::pure_delay, py::arg("tau"))
        .def_static("zoh", &DelayModel::zoh, py::arg("tau"))
        .def_property_readonly("kind", &DelayModel::kind)
        .def_property_readonly("tau", &DelayModel::tau)
        .def("multiplier", &DelayModel::multiplier, py::arg("s"));

    m.def("zoh_response", &zoh_response, py::arg("tau"), py::arg("s"));
    m.def("open_loop_tf", py::overload_cast<const PiezoModel&, const ShuntParams&>(&open_loop_tf), py::arg("model"),
          py::arg("shunt"));
    m.def("open_loop_tf_admittance", py::overload_cast<const PiezoModel&, const RationalTF&>(&open_loop_tf),
          py::arg("model"), py::arg("admittance"));

    py::class_<MarginOptions>(m, "MarginOptions")
        .def(py::init<>())
        .def_readwrite("band_low", &MarginOptions::band_low)
        .def_readwrite("band_high", &MarginOptions::band_high)
        .def_readwrite("points", &MarginOptions::points);
    py::class_<MarginReport>(m, "MarginReport")
        .def_readonly("gain_crossovers", &MarginReport::gain_crossovers)
        .def_readonly("crossover_phase_deg", &MarginReport::crossover_phase_deg)
        .def_readonly("phase_margin_deg", &MarginReport::phase_margin_deg)
        .def_readonly("gain_margin_infinite", &MarginReport::gain_margin_infinite)
        .def_readonly("gain_margin_db", &MarginReport::gain_margin_db);
    m.def("stability_margins", &stability_margins, py::arg("open_loop"), py::arg("omega_ref"),
          py::arg("options") = MarginOptions{});
    m.def("unwrapped_phase_deg", &unwrapped_phase_deg, py::arg("open_loop"), py::arg("omega"));
    m.def("delayed_admittance", &delayed_admittance, py::arg("admittance"), py::arg("tau"), py::arg("omega"));
    m.def("passivity_loss_delay", &passivity_loss_delay, py::arg("model"));

    py::class_<FrfCurve>(m, "FrfCurve")
        .def_readonly("omega", &FrfCurve::omega)
        .def_readonly("value", &FrfCurve::value)
        .def_readonly("warnings", &FrfCurve::warnings);
    py::class_<Peak>(m, "Peak").def_readonly("omega", &Peak::omega).def_readonly("amplitude", &Peak::amplitude);
    m.def("closed_loop_compliance", &closed_loop_compliance, py::arg("model"), py::arg("admittance"), py::arg("delay"),
          py::arg("omega"));
    m.def("closed_loop_frf", &closed_loop_frf, py::arg("model"), py::arg("admittance"), py::arg("delay"),
          py::arg("omega_norm"));
    m.def("find_peaks", py::overload_cast<const FrfCurve&>(&find_peaks), py::arg("curve"));
    m.def("linspace", &linspace);
    m.def("logspace", &logspace);
    m.def("default_resonant_grid", &default_resonant_grid);

    m.def("closed_loop_poles", &closed_loop_poles, py::arg("model"), py::arg("admittance"));
    m.def("nominal_poles", &nominal_poles, py::arg("model"), py::arg("shunt"));

    py::class_<LocusCrossing>(m, "LocusCrossing")
        .def_readonly("tau", &LocusCrossing::tau)
        .def_readonly("omega", &LocusCrossing::omega);
    py::class_<RootLocus>(m, "RootLocus")
        .def_readonly("taus", &RootLocus::taus)
        .def_readonly("poles", &RootLocus::poles)
        .def_readonly("crossing", &RootLocus::crossing);
    m.def(
        "root_locus",
        [](const PiezoModel& model, const RationalTF& y, DelayModel::Kind variant, double tau_max, double dtau) {
            return root_locus(model, y, variant, tau_max, dtau);
        },
        py::arg("model"), py::arg("admittance"), py::arg("variant"), py::arg("tau_max"), py::arg("dtau"));

    py::enum_<CriticalDelayMethod>(m, "CriticalDelayMethod")
        .value("ZOH_NUMERIC", CriticalDelayMethod::ZohNumeric)
        .value("PURE_DELAY_NUMERIC", CriticalDelayMethod::PureDelayNumeric)
        .value("SERIES", CriticalDelayMethod::Series);
    py::class_<CriticalDelayResult>(m, "CriticalDelayResult")
        .def_readonly("omega_c", &CriticalDelayResult::omega_c)
        .def_readonly("tau_c", &CriticalDelayResult::tau_c)
        .def_readonly("branch_k", &CriticalDelayResult::branch_k)
        .def_readonly("method", &CriticalDelayResult::method)
        .def_readonly("finite", &CriticalDelayResult::finite);
    m.def("critical_delay_numeric",
          py::overload_cast<const PiezoModel&, const RationalTF&, DelayModel::Kind>(&critical_delay_numeric),
          py::arg("model"), py::arg("admittance"), py::arg("variant"));
    m.def("critical_delay_series", &critical_delay_series, py::arg("kc"), py::arg("omega_sc"));
    m.def("max_sampling_period", &max_sampling_period, py::arg("kc"), py::arg("omega_sc"), py::arg("modified"));

    py::class_<PinnedFactor>(m, "PinnedFactor")
        .def(py::init([](const std::string& side, std::size_t index) {
                 if (side != "b" && side != "a") throw py::value_error("side must be 'b' or 'a'");
                 return PinnedFactor{side == "b" ? PinnedFactor::Side::Numerator : PinnedFactor::Side::Denominator,
                                     index};
             }),
             py::arg("side") = "b", py::arg("index") = 0)
        .def_property_readonly("name", &PinnedFactor::name);
    py::class_<ModificationFactors>(m, "ModificationFactors")
        .def_readonly("delta_b", &ModificationFactors::delta_b)
        .def_readonly("delta_a", &ModificationFactors::delta_a)
        .def_readonly("residual_norm", &ModificationFactors::residual_norm)
        .def_readonly("rank_deficient", &ModificationFactors::rank_deficient)
        .def_readonly("sign_flips", &ModificationFactors::sign_flips);
    py::class_<Stabilized>(m, "Stabilized")
        .def_readonly("admittance", &Stabilized::admittance)
        .def_readonly("factors", &Stabilized::factors)
        .def_readonly("target_poles", &Stabilized::target_poles);
    py::class_<PlacementCheck>(m, "PlacementCheck")
        .def_readonly("residuals", &PlacementCheck::residuals)
        .def_readonly("delayed_poles", &PlacementCheck::delayed_poles)
        .def_readonly("displacements", &PlacementCheck::displacements)
        .def_readonly("converged", &PlacementCheck::converged)
        .def_readonly("all_stable", &PlacementCheck::all_stable);
    m.def("stabilize", &stabilize, py::arg("model"), py::arg("admittance"), py::arg("tau"),
          py::arg("pinned") = PinnedFactor{});
    m.def("apply_modification", &apply_modification, py::arg("admittance"), py::arg("factors"));
    m.def(
        "verify_pole_placement",
        [](const PiezoModel& model, const RationalTF& y, double tau, const std::vector<Complex>& targets) {
            return verify_pole_placement(model, y, tau, targets);
        },
        py::arg("model"), py::arg("modified_admittance"), py::arg("tau"), py::arg("target_poles"));

    py::class_<DiscreteTF>(m, "DiscreteTF")
        .def_property_readonly("num_z", &DiscreteTF::num_z)
        .def_property_readonly("den_z", &DiscreteTF::den_z)
        .def_property_readonly("tau", &DiscreteTF::tau)
        .def("step", &DiscreteTF::step, py::arg("input"))
        .def("reset", &DiscreteTF::reset)
        .def("__call__", &DiscreteTF::operator(), py::arg("z"));
    m.def("tustin_discretize", &tustin_discretize, py::arg("admittance"), py::arg("tau"));

    py::class_<SweepConfig> sweep(m, "SweepConfig");
    py::enum_<SweepConfig::Law>(sweep, "Law")
        .value("LINEAR", SweepConfig::Law::Linear)
        .value("LOGARITHMIC", SweepConfig::Law::Logarithmic);
    sweep.def(py::init<>())
        .def_readwrite("f_start", &SweepConfig::f_start)
        .def_readwrite("f_end", &SweepConfig::f_end)
        .def_readwrite("duration", &SweepConfig::duration)
        .def_readwrite("amplitude", &SweepConfig::amplitude)
        .def_readwrite("law", &SweepConfig::law)
        .def("frequency_at", &SweepConfig::frequency_at, py::arg("t"));
    m.def("default_sweep", &default_sweep, py::arg("model"));

    py::class_<SimOptions>(m, "SimOptions")
        .def(py::init<>())
        .def_readwrite("substeps", &SimOptions::substeps)
        .def_readwrite("divergence_factor", &SimOptions::divergence_factor)
        .def_readwrite("tail_periods", &SimOptions::tail_periods);
    py::class_<EnvelopePoint>(m, "EnvelopePoint")
        .def_readonly("omega_norm", &EnvelopePoint::omega_norm)
        .def_readonly("amplitude", &EnvelopePoint::amplitude);
    py::class_<SimResult>(m, "SimResult")
        .def_readonly("t", &SimResult::t)
        .def_readonly("x", &SimResult::x)
        .def_readonly("envelope", &SimResult::envelope)
        .def_readonly("stable", &SimResult::stable)
        .def_readonly("diverged", &SimResult::diverged)
        .def_readonly("tail_growth_ratio", &SimResult::tail_growth_ratio);
    m.def("simulate_swept_sine", &simulate_swept_sine, py::arg("model"), py::arg("controller"), py::arg("tau"),
          py::arg("sweep"), py::arg("options") = SimOptions{}, py::call_guard<py::gil_scoped_release>());
}
