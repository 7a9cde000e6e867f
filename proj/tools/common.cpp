#include "common.hpp"

#include <numbers>
#include <sstream>

namespace shuntlab::cli {

Json model_json(const PiezoModel& model) {
    Json j;
    j["omega_sc"] = model.omega_sc();
    j["omega_oc"] = model.omega_oc();
    j["f_sc_hz"] = model.omega_sc() / (2.0 * std::numbers::pi);
    j["f_oc_hz"] = model.omega_oc() / (2.0 * std::numbers::pi);
    j["kc"] = model.kc();
    j["cp_eps"] = model.cp_eps();
    j["mass"] = model.mass() ? Json(*model.mass()) : Json(nullptr);
    j["theta_p"] = model.theta_p() ? Json(*model.theta_p()) : Json(nullptr);
    return j;
}

Json shunt_json(const ShuntParams& shunt, const std::string& tuning) {
    Json j;
    j["tuning"] = tuning;
    j["inductance"] = shunt.inductance;
    j["resistance"] = shunt.resistance;
    j["delta"] = shunt.delta;
    j["zeta"] = shunt.zeta;
    return j;
}

std::string tuning_name(TuningKind kind) {
    switch (kind) {
        case TuningKind::Optimal: return "optimal";
        case TuningKind::Linearized: return "linearized";
        case TuningKind::Explicit: return "explicit";
    }
    return "?";
}

std::string variant_name(DelayModel::Kind kind) {
    switch (kind) {
        case DelayModel::Kind::None: return "none";
        case DelayModel::Kind::PureDelay: return "pure";
        case DelayModel::Kind::Zoh: return "zoh";
    }
    return "?";
}

DelayModel make_delay(DelayModel::Kind kind, double tau) {
    switch (kind) {
        case DelayModel::Kind::None: return DelayModel::none();
        case DelayModel::Kind::PureDelay: return DelayModel::pure_delay(tau);
        case DelayModel::Kind::Zoh: return DelayModel::zoh(tau);
    }
    return DelayModel::none();
}

Json peaks_json(const std::vector<Peak>& peaks) {
    Json arr = Json::array();
    for (const Peak& p : peaks) {
        Json j;
        j["omega_norm"] = p.omega;
        j["amplitude"] = p.amplitude;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::string using_where(int group_col, double value, int x_col, int y_col) {
    std::ostringstream s;
    s << "(column(" << group_col << ") == " << format_number(value) << " ? column(" << x_col << ") : NaN):" << y_col;
    return s.str();
}

std::string gnuplot_script(const std::vector<PlotSpec>& plots) {
    std::ostringstream s;
    s << "set datafile separator ','\n";
    s << "set datafile commentschars '#'\n";
    s << "set grid\n";
    if (plots.size() > 1) s << "set multiplot layout " << plots.size() << ",1\n";
    for (const PlotSpec& p : plots) {
        s << "set title '" << p.title << "'\n";
        s << "set xlabel '" << p.xlabel << "'\n";
        s << "set ylabel '" << p.ylabel << "'\n";
        s << (p.logx ? "set logscale x\n" : "unset logscale x\n");
        s << (p.logy ? "set logscale y\n" : "unset logscale y\n");
        s << "plot ";
        for (std::size_t i = 0; i < p.series.size(); ++i) {
            if (i) s << ", \\\n     ";
            s << "'" << p.csv << "' every ::1 using " << p.series[i].using_expr << " with " << p.style << " title '"
              << p.series[i].title << "'";
        }
        s << "\n";
    }
    if (plots.size() > 1) s << "unset multiplot\n";
    return s.str();
}

}  // namespace shuntlab::cli
