// Helpers shared by the command and figure implementations.
#pragma once

#include "output.hpp"
#include "scenario.hpp"

#include "shuntlab/delay_stability.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace shuntlab::cli {

Json model_json(const PiezoModel& model);
Json shunt_json(const ShuntParams& shunt, const std::string& tuning);
std::string tuning_name(TuningKind kind);
std::string variant_name(DelayModel::Kind kind);
DelayModel make_delay(DelayModel::Kind kind, double tau);

/// Peaks of |value| over a grid, as [{omega_norm, amplitude}].
Json peaks_json(const std::vector<Peak>& peaks);

struct PlotSeries {
    std::string using_expr;  // gnuplot `using` clause, e.g. "3:4"
    std::string title;
};

struct PlotSpec {
    std::string title;
    std::string csv;  // file name relative to the script
    std::string xlabel;
    std::string ylabel;
    bool logx = false;
    bool logy = false;
    std::vector<PlotSeries> series;
    std::string style = "lines";
};

/// gnuplot commands reading one CSV file; several specs become a multiplot.
std::string gnuplot_script(const std::vector<PlotSpec>& plots);

/// `(column(c) == v ? column(x) : NaN):column(y)` for long-format files.
std::string using_where(int group_col, double value, int x_col, int y_col);

}  // namespace shuntlab::cli
